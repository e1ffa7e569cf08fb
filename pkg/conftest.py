"""
Shared fixture algebras and random generators for the test suite.
"""
import random
from fractions import Fraction
from typing import Dict, Tuple

import pytest

from app.services.forms import PolyForm
from app.services.slie import BasisSymbol, Element, InftyMorphism, SLieAlgebra

F = Fraction


def vec(**coefficients) -> Element:
    """Element of L from keyword coefficients, e.g. vec(x=1, z=-1)."""
    return Element.from_vector({k: F(v) for k, v in coefficients.items()})


def random_form(rng: random.Random, dim: int, max_degree: int = 3, terms: int = 4) -> PolyForm:
    """A random polynomial form on Δ^dim with small rational coefficients."""
    out: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Fraction] = {}
    for _ in range(terms):
        exps = [0] * dim
        for _ in range(rng.randint(0, max_degree)):
            if dim:
                exps[rng.randrange(dim)] += 1
        dts = tuple(sorted(rng.sample(range(1, dim + 1), rng.randint(0, dim))))
        key = (tuple(exps), dts)
        out[key] = out.get(key, F(0)) + F(rng.randint(-3, 3), rng.randint(1, 3))
    return PolyForm(dim, out)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def line():
    """𝕜 in degree 0 with ∂ = 0."""
    return SLieAlgebra([BasisSymbol("u", 0, 1)], {}, {}, 1, 0, "line")


@pytest.fixture
def acyclic():
    """x in degree 0, y in degree 1, ∂x = y."""
    return SLieAlgebra([BasisSymbol("x", 0, 1), BasisSymbol("y", 1, 1)], {"x": {"y": F(1)}}, {}, 1, 0, "acyclic")


@pytest.fixture
def quadratic():
    """∂ = 0 and {x, x} = y with x of weight 1 and y of weight 2."""
    return SLieAlgebra([BasisSymbol("x", 0, 1), BasisSymbol("y", 1, 2)], {}, {("x", "x"): {"y": F(1)}},
                       2, 2, "quadratic")


@pytest.fixture
def curved():
    """{x, x} = 2y and ∂z = y, so x - z is Maurer–Cartan."""
    return SLieAlgebra([BasisSymbol("x", 0, 1), BasisSymbol("z", 0, 2), BasisSymbol("y", 1, 2)],
                       {"z": {"y": F(1)}}, {("x", "x"): {"y": F(2)}}, 2, 2, "curved")


GAUGE_SYMBOLS = [
    BasisSymbol("e", -1, 1),
    BasisSymbol("x", 0, 1),
    BasisSymbol("z", 0, 2),
    BasisSymbol("y", 1, 2),
]


def gauge_algebra(name: str = "gauge") -> SLieAlgebra:
    """
    The curved example with a gauge direction e: ∂e = x, ∂z = y,
    {x, x} = 2y and {e, x} = -2z. MC elements are a·x - a²·z.
    """
    return SLieAlgebra(GAUGE_SYMBOLS, {"e": {"x": F(1)}, "z": {"y": F(1)}},
                       {("x", "x"): {"y": F(2)}, ("e", "x"): {"z": F(-2)}}, 2, 2, name)


@pytest.fixture
def gauge():
    return gauge_algebra()


@pytest.fixture
def gauge_plus():
    """The gauge algebra plus an acyclic pair v → w of weight 2."""
    symbols = GAUGE_SYMBOLS + [BasisSymbol("v", -1, 2), BasisSymbol("w", 0, 2)]
    return SLieAlgebra(symbols, {"e": {"x": F(1)}, "z": {"y": F(1)}, "v": {"w": F(1)}},
                       {("x", "x"): {"y": F(2)}, ("e", "x"): {"z": F(-2)}}, 2, 2, "gauge_plus")


@pytest.fixture
def quadratic_morphism(gauge, gauge_plus):
    """Identity on shared names with U'_2(x, x) = w and U'_2(e, x) = v."""
    taylor = {(s.name,): {s.name: F(1)} for s in gauge.symbols}
    taylor[("x", "x")] = {"w": F(1)}
    taylor[("e", "x")] = {"v": F(1)}
    return InftyMorphism(gauge, gauge_plus, taylor, 2, "U")


@pytest.fixture
def ternary():
    """A single degree-0 generator with a nonzero 3-bracket {x, x, x} = y, N = 3."""
    return SLieAlgebra([BasisSymbol("x", 0, 1), BasisSymbol("y", 1, 3)], {}, {("x", "x", "x"): {"y": F(6)}},
                       3, 3, "ternary")


@pytest.fixture
def projection():
    """Strict surjection a, b, c → a' killing the acyclic pair b → c."""
    source = SLieAlgebra([BasisSymbol("a", 0, 1), BasisSymbol("b", -1, 1), BasisSymbol("c", 0, 1)],
                         {"b": {"c": F(1)}}, {}, 1, 0, "S")
    target = SLieAlgebra([BasisSymbol("a'", 0, 1)], {}, {}, 1, 0, "T")
    return InftyMorphism(source, target, {("a",): {"a'": F(1)}}, 1, "p")


@pytest.fixture
def killing(line):
    """The zero map 𝕜 → 𝕜 in degree 0, which kills a nonzero class."""
    target = SLieAlgebra([BasisSymbol("u", 0, 1)], {}, {}, 1, 0, "line2")
    return InftyMorphism(line, target, {}, 1, "zero")


@pytest.fixture
def quartic():
    """
    N = 4 with brackets of every arity up to 4 landing in closed degree-1 symbols.
    MC elements are a·x - a²·z - a⁴·w.
    """
    symbols = [BasisSymbol("x", 0, 1), BasisSymbol("z", 0, 2), BasisSymbol("w", 0, 4),
               BasisSymbol("y2", 1, 2), BasisSymbol("y3", 1, 3), BasisSymbol("y4", 1, 4)]
    brackets = {
        ("x", "x"): {"y2": F(2)},
        ("x", "z"): {"y3": F(1)},
        ("z", "z"): {"y4": F(1)},
        ("x", "x", "x"): {"y3": F(6)},
        ("x", "x", "z"): {"y4": F(1)},
        ("x", "x", "x", "x"): {"y4": F(24)},
    }
    return SLieAlgebra(symbols, {"z": {"y2": F(1)}, "w": {"y4": F(1)}}, brackets, 4, 4, "quartic")


@pytest.fixture
def coupled():
    """∂x = y, ∂r = -2q, {x, x} = r and {x, y} = q: brackets see the curvature."""
    symbols = [BasisSymbol("x", 0, 1), BasisSymbol("y", 1, 1), BasisSymbol("r", 1, 2), BasisSymbol("q", 2, 2)]
    return SLieAlgebra(symbols, {"x": {"y": F(1)}, "r": {"q": F(-2)}},
                       {("x", "x"): {"r": F(1)}, ("x", "y"): {"q": F(1)}}, 2, 2, "coupled")


@pytest.fixture
def inclusion(line):
    """𝕜 → (t → u), a chain map into an acyclic complex."""
    target = SLieAlgebra([BasisSymbol("t", -1, 1), BasisSymbol("u", 0, 1)], {"t": {"u": F(1)}}, {}, 1, 0, "cone")
    return InftyMorphism(line, target, {("u",): {"u": F(1)}}, 1, "i")


def random_rational(rng: random.Random) -> Fraction:
    return F(rng.randint(-3, 3), rng.randint(1, 3))


def random_element(rng: random.Random, algebra: SLieAlgebra, degree: int = 0) -> Element:
    """A random element of L spanned by the symbols of one degree."""
    return Element.from_vector({s.name: random_rational(rng) for s in algebra.symbols if s.degree == degree})


def random_path(rng: random.Random, names, max_degree: int = 2) -> Element:
    """A polynomial path Σ_k c_k t_0^k in the given symbols, as 0-forms on Δ^1."""
    t0 = PolyForm.coordinate(1, 0)
    terms = {}
    for name in names:
        form = PolyForm.constant(1, rng.randint(1, 3))
        power = PolyForm.constant(1, 1)
        for _ in range(rng.randint(0, max_degree)):
            power = power * t0
            form = form + power.scale(random_rational(rng))
        terms[name] = form
    return Element(1, terms)
