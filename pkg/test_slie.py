"""
Tests for truncated filtered shifted L∞-algebras and ∞-morphisms.
"""
import random
from fractions import Fraction
from math import factorial

import pytest

from app.errors import InputError, PreconditionError, UnsupportedArityError
from app.services import forms
from app.services.forms import PolyForm
from app.services.slie import (
    BasisSymbol,
    Element,
    InftyMorphism,
    OrdinaryLInfinity,
    SLieAlgebra,
    check_infty_morphism,
    check_slie,
    extend_morphism_to_forms,
    extend_to_forms,
    koszul_sign,
    pushforward,
    quotient,
    quotient_morphism,
    shift_convention,
    twist_algebra,
    twist_morphism,
    unshift_convention,
)
from conftest import random_element, vec

F = Fraction


class TestKoszulSign:
    def test_identity(self):
        assert koszul_sign([0, 1, 2], [1, 1, 1]) == 1

    def test_odd_swap(self):
        assert koszul_sign([1, 0], [1, 3]) == -1

    def test_mixed_swap(self):
        assert koszul_sign([1, 0], [0, 1]) == 1

    def test_not_a_permutation(self):
        with pytest.raises(InputError):
            koszul_sign([0, 0], [1, 1])


class TestConstruction:
    def test_symbols_above_truncation_are_dropped(self):
        algebra = SLieAlgebra([BasisSymbol("x", 0, 1), BasisSymbol("y", 1, 3)], {}, {("x", "x"): {"y": 1}}, 2, 2)
        assert [s.name for s in algebra.symbols] == ["x"]
        assert algebra.brackets == {}

    def test_odd_repeat_rejected(self):
        with pytest.raises(InputError):
            SLieAlgebra([BasisSymbol("e", -1, 1), BasisSymbol("x", 0, 2)], {}, {("e", "e"): {"x": 1}}, 2, 2)

    def test_unknown_name(self):
        with pytest.raises(InputError):
            SLieAlgebra([BasisSymbol("x", 0, 1)], {"x": {"q": 1}}, {}, 1, 0)

    def test_weight_below_one(self):
        with pytest.raises(InputError):
            SLieAlgebra([BasisSymbol("x", 0, 0)], {}, {}, 1, 0)

    def test_bracket_keys_are_sorted_with_sign(self, gauge):
        assert gauge.brackets[("e", "x")] == {"z": F(-2)}
        swapped = SLieAlgebra(gauge.symbols, gauge.differential, {("x", "e"): {"z": -2}, ("x", "x"): {"y": 2}}, 2, 2)
        assert swapped.brackets == gauge.brackets


class TestBrackets:
    def test_bilinear(self, quadratic):
        assert quadratic.bracket_eval([vec(x=2), vec(x=1)]) == vec(y=2)

    def test_missing_entry_is_zero(self, quadratic):
        assert quadratic.bracket_eval([vec(x=1), vec(y=1)]).is_zero()

    def test_truncation(self, curved):
        assert curved.bracket_eval([vec(x=1), vec(z=1)]).is_zero()

    def test_arity_above_maximum(self, quadratic):
        with pytest.raises(UnsupportedArityError):
            quadratic.bracket_eval([vec(x=1)] * 3)

    def test_forms_move_right(self, quadratic):
        t1 = PolyForm.coordinate(1, 1)
        one = PolyForm.constant(1, 1)
        result = quadratic.bracket_eval([Element.tensor({"x": F(1)}, t1), Element.tensor({"x": F(1)}, one)])
        assert result == Element.tensor({"y": F(1)}, t1)

    def test_dt_squared_vanishes(self, quadratic):
        dx = Element.tensor({"x": F(1)}, PolyForm.differential(1, 1))
        assert quadratic.bracket_eval([dx, dx]).is_zero()

    def test_odd_symbol_passes_a_form(self, gauge):
        dt1 = PolyForm.differential(1, 1)
        one = PolyForm.constant(1, 1)
        # {x dt_1, e} = -{x, e} dt_1 since dt_1 moves past the odd e
        left = gauge.bracket_eval([Element.tensor({"x": F(1)}, dt1), Element.tensor({"e": F(1)}, one)])
        assert left == Element.tensor({"z": F(2)}, dt1)


class TestChecks:
    def test_abelian_passes(self, acyclic):
        assert check_slie(acyclic).ok

    def test_quadratic_passes(self, quadratic, curved, gauge, gauge_plus, ternary):
        for algebra in (quadratic, curved, gauge, gauge_plus, ternary):
            report = check_slie(algebra)
            assert report.ok, report.violations
            assert report.checked > 0

    def test_weight_precheck(self):
        algebra = SLieAlgebra([BasisSymbol("x", 0, 1), BasisSymbol("y", 1, 2)], {},
                              {("x", "x", "x"): {"y": 1}}, 3, 3)
        report = check_slie(algebra)
        assert not report.ok
        assert report.violations[0].rule == "bracket-weight"

    def test_jacobi_failure(self):
        # ∂e = x and {x, x} = 2y with no {e, x} to cancel {∂e, x}
        algebra = SLieAlgebra([BasisSymbol("e", -1, 1), BasisSymbol("x", 0, 1), BasisSymbol("y", 1, 2)],
                              {"e": {"x": 1}}, {("x", "x"): {"y": 2}}, 2, 2)
        report = check_slie(algebra)
        assert not report.ok
        assert report.violations[0].rule == "jacobi"
        assert report.violations[0].inputs == ("e", "x")

    def test_identity_morphism(self, gauge):
        assert check_infty_morphism(InftyMorphism.identity(gauge)).ok

    def test_quadratic_morphism(self, quadratic_morphism):
        report = check_infty_morphism(quadratic_morphism)
        assert report.ok, report.violations

    def test_bracket_not_respected(self, quadratic):
        abelian = SLieAlgebra(quadratic.symbols, {}, {}, 2, 2, "flat")
        morphism = InftyMorphism(quadratic, abelian, {("x",): {"x": 1}, ("y",): {"y": 1}}, 1)
        report = check_infty_morphism(morphism)
        assert not report.ok
        violation = report.violations[0]
        assert violation.inputs == ("x", "x")
        assert violation.residual == {"y": F(1)}

    def test_strict_chain_map(self, projection):
        assert check_infty_morphism(projection).ok


class TestCurvature:
    def test_abelian(self, acyclic):
        assert acyclic.curv(vec(x=3)) == vec(y=3)

    @pytest.mark.parametrize("c", [F(1), F(-2), F(1, 3)])
    def test_quadratic(self, quadratic, c):
        assert quadratic.curv(vec(x=c)) == vec(y=c * c / 2)

    def test_curved_mc(self, curved):
        assert curved.curv(vec(x=1, z=-1)).is_zero()

    def test_ternary(self, ternary):
        assert ternary.curv(vec(x=2)) == vec(y=8)

    def test_wrong_degree(self, curved):
        with pytest.raises(InputError):
            curved.curv(vec(y=1))

    def test_quartic_mc_family(self, quartic):
        for a in (F(1), F(-2), F(1, 3), F(3, 2)):
            alpha = vec(x=a, z=-a ** 2, w=-a ** 4)
            assert quartic.curv(alpha).is_zero()
        assert quartic.curv(vec(x=1)) == vec(y2=1, y3=1, y4=1)

    def test_fixtures_are_algebras(self, quartic, coupled):
        assert check_slie(quartic).ok
        assert check_slie(coupled).ok


IDENTITY_FIXTURES = ["acyclic", "quadratic", "curved", "gauge", "gauge_plus", "ternary", "quartic", "coupled"]
SAMPLES = 50


def exponential_sum(algebra: SLieAlgebra, alpha: Element, beta: Element) -> Element:
    """Σ_{m≥2} 1/m! {β, …, β}^α over the arities the algebra carries."""
    out = Element(beta.dim)
    for m in range(2, algebra.max_arity + 1):
        out = out + algebra.twisted_bracket(alpha, [beta] * m).scale(F(1, factorial(m)))
    return out


def pushed_curvature(morphism: InftyMorphism, alpha: Element) -> Element:
    """Σ_{m≥0} 1/m! U'_{m+1}(α, …, α, curv α)."""
    c = morphism.source.curv(alpha)
    out = Element(alpha.dim)
    for m in range(morphism.max_arity):
        out = out + morphism.apply([alpha] * m + [c]).scale(F(1, factorial(m)))
    return out


class TestCurvatureIdentities:
    """Identities that hold for every degree-0 element, Maurer–Cartan or not."""

    @pytest.mark.parametrize("fixture", IDENTITY_FIXTURES)
    def test_bianchi(self, request, rng, fixture):
        algebra = request.getfixturevalue(fixture)
        for _ in range(SAMPLES):
            alpha = random_element(rng, algebra)
            assert algebra.twisted_differential(alpha, algebra.curv(alpha)).is_zero()

    @pytest.mark.parametrize("fixture", IDENTITY_FIXTURES)
    def test_square_of_twisted_differential(self, request, rng, fixture):
        algebra = request.getfixturevalue(fixture)
        degrees = sorted({s.degree for s in algebra.symbols})
        for _ in range(SAMPLES):
            alpha = random_element(rng, algebra)
            v = random_element(rng, algebra, rng.choice(degrees))
            c = algebra.curv(alpha)
            twice = algebra.twisted_differential(alpha, algebra.twisted_differential(alpha, v))
            if algebra.max_arity >= 2:
                assert twice == -algebra.twisted_bracket(alpha, [c, v])
            else:
                assert twice.is_zero()

    @pytest.mark.parametrize("fixture", IDENTITY_FIXTURES)
    def test_curvature_of_a_sum(self, request, rng, fixture):
        algebra = request.getfixturevalue(fixture)
        for _ in range(SAMPLES):
            alpha = random_element(rng, algebra)
            beta = random_element(rng, algebra)
            expected = (algebra.curv(alpha) + algebra.twisted_differential(alpha, beta)
                        + exponential_sum(algebra, alpha, beta))
            assert algebra.curv(alpha + beta) == expected

    @pytest.mark.parametrize("fixture", IDENTITY_FIXTURES)
    def test_pushforward_of_curvature_under_identity(self, request, rng, fixture):
        algebra = request.getfixturevalue(fixture)
        morphism = InftyMorphism.identity(algebra)
        for _ in range(SAMPLES):
            alpha = random_element(rng, algebra)
            assert algebra.curv(pushforward(morphism, alpha)) == pushed_curvature(morphism, alpha)

    def test_pushforward_of_curvature(self, rng, quadratic_morphism):
        target = quadratic_morphism.target
        for _ in range(SAMPLES):
            alpha = random_element(rng, quadratic_morphism.source)
            assert target.curv(pushforward(quadratic_morphism, alpha)) == pushed_curvature(quadratic_morphism, alpha)

    def test_curvature_feeds_back_into_the_bracket(self, coupled):
        # curv(x) = y + r/2, so {curv x, x} = q
        alpha = vec(x=1)
        twice = coupled.twisted_differential(alpha, coupled.twisted_differential(alpha, vec(x=1)))
        assert twice == vec(q=-1)
        assert coupled.twisted_bracket(alpha, [coupled.curv(alpha), vec(x=1)]) == vec(q=1)


class TestTwisting:
    def test_twist_by_zero(self, gauge):
        twisted = twist_algebra(gauge, Element())
        assert twisted.differential == gauge.differential
        assert twisted.brackets == gauge.brackets

    def test_twisted_differential(self, gauge):
        twisted = twist_algebra(gauge, vec(x=1, z=-1))
        # ∂^α x = {x - z, x} = 2y, ∂^α e = x + {x - z, e} = x - 2z
        assert twisted.differential["x"] == {"y": F(2)}
        assert twisted.differential["e"] == {"x": F(1), "z": F(-2)}
        assert check_slie(twisted).ok

    def test_twist_requires_mc(self, gauge):
        with pytest.raises(PreconditionError) as excinfo:
            twist_algebra(gauge, vec(x=1))
        assert excinfo.value.residual == vec(y=1)

    @pytest.mark.parametrize("b", [F(2), F(-1), F(1, 2), F(0)])
    def test_twist_twice(self, gauge, b):
        alpha = vec(x=1, z=-1)
        beta = vec(x=b, z=-b * b) - alpha
        twice = twist_algebra(twist_algebra(gauge, alpha), beta)
        once = twist_algebra(gauge, alpha + beta)
        assert twice == once
        assert check_slie(twice).ok

    @pytest.mark.parametrize("b, c", [(F(3), F(1)), (F(-1, 2), F(-2))])
    def test_twist_twice_with_acyclic_pair(self, gauge_plus, b, c):
        alpha = vec(x=1, z=-1)
        beta = vec(x=b, z=-b * b, w=c) - alpha
        assert twist_algebra(twist_algebra(gauge_plus, alpha), beta) == twist_algebra(gauge_plus, alpha + beta)

    @pytest.mark.parametrize("a, b", [(F(1), F(2)), (F(-1), F(1, 2)), (F(2, 3), F(-3))])
    def test_twist_twice_quartic(self, quartic, a, b):
        alpha = vec(x=a, z=-a ** 2, w=-a ** 4)
        target = vec(x=b, z=-b ** 2, w=-b ** 4)
        twice = twist_algebra(twist_algebra(quartic, alpha), target - alpha)
        assert twice == twist_algebra(quartic, target)
        assert check_slie(twice).ok

    def test_twist_morphism(self, quadratic_morphism):
        alpha = vec(x=1, z=-1)
        twisted = twist_morphism(quadratic_morphism, alpha)
        # (U^α)'_1(x) = x + U'_2(α, x) = x + w
        assert twisted.taylor[("x",)] == {"x": F(1), "w": F(1)}
        assert check_infty_morphism(twisted).ok


class TestPushforward:
    def test_quadratic_term(self, quadratic_morphism):
        for c in (F(1), F(3), F(-1, 2)):
            assert pushforward(quadratic_morphism, vec(x=c)) == vec(x=c, w=c * c / 2)

    def test_zero(self, quadratic_morphism):
        assert pushforward(quadratic_morphism, Element()).is_zero()

    def test_strict(self, projection):
        assert pushforward(projection, vec(a=2, c=5)) == Element.from_vector({"a'": F(2)})


class TestQuotient:
    def test_full_and_empty(self, curved):
        assert quotient(curved, 3) == curved
        assert quotient(curved, 1).symbols == []

    def test_abelian_quotient(self, curved):
        low = quotient(curved, 2)
        assert [s.name for s in low.symbols] == ["x"]
        assert low.is_abelian()

    def test_out_of_range(self, curved):
        with pytest.raises(InputError):
            quotient(curved, 4)


class TestConventions:
    def test_dg_lie_bracket(self):
        ordinary = OrdinaryLInfinity([BasisSymbol("a", 1, 1), BasisSymbol("b", 2, 2)], {},
                                     {("a", "a"): {"b": 1}}, 2, 2)
        shifted = shift_convention(ordinary)
        assert shifted.degree_of == {"a": 0, "b": 1}
        assert check_slie(shifted).ok

    def test_mc_elements_correspond(self):
        # curv(s^-1 x) = -s^-1(dx + ½[x, x]); a - z is Maurer–Cartan on both sides
        ordinary = OrdinaryLInfinity([BasisSymbol("a", 1, 1), BasisSymbol("z", 1, 2), BasisSymbol("b", 2, 2)],
                                     {"z": {"b": F(1)}}, {("a", "a"): {"b": F(2)}}, 2, 2)
        shifted = shift_convention(ordinary)
        for x in ({"a": F(1), "z": F(-1)}, {"a": F(2), "z": F(1)}, {"a": F(1, 2)}):
            residual = ordinary.mc_residual(x)
            expected = Element.from_vector({k: -v for k, v in residual.items()})
            assert shifted.curv(Element.from_vector(x)) == expected

    def test_round_trip(self):
        rng = random.Random(23)
        for _ in range(10):
            symbols = [BasisSymbol("p", rng.randint(-1, 1), 1), BasisSymbol("q", rng.randint(-1, 1), 1),
                       BasisSymbol("r", rng.randint(-1, 2), 2)]
            degrees = {s.name: s.degree for s in symbols}
            brackets = {}
            for key in (("p", "q"), ("p", "p"), ("q", "q")):
                if degrees["r"] == degrees[key[0]] + degrees[key[1]] + 1 and rng.random() < 0.7:
                    if key[0] == key[1] and degrees[key[0]] % 2:
                        continue
                    brackets[key] = {"r": F(rng.randint(1, 3))}
            algebra = SLieAlgebra(symbols, {}, brackets, 2, 2, "R")
            back = shift_convention(unshift_convention(algebra))
            assert back == algebra


class TestExtendedDifferential:
    def test_squares_to_zero(self, acyclic):
        rng = random.Random(29)
        for _ in range(10):
            element = Element(2, {"x": forms.wedge(PolyForm.coordinate(2, 1), PolyForm.differential(2, 2))
                                  .scale(rng.randint(1, 3)),
                                  "y": PolyForm.coordinate(2, 2).scale(rng.randint(-2, 2))})
            once = acyclic.total_differential(element)
            assert acyclic.total_differential(once).is_zero()

    def test_curvature_on_forms(self, quadratic):
        t1 = PolyForm.coordinate(1, 1)
        extended = extend_to_forms(quadratic, 1)
        alpha = Element.tensor({"x": F(1)}, t1)
        expected = Element(1, {"x": PolyForm.differential(1, 1), "y": (t1 * t1).scale(F(1, 2))})
        assert extended.curv(alpha) == expected

    def test_rejects_other_dimensions(self, quadratic):
        with pytest.raises(InputError):
            extend_to_forms(quadratic, 1).bracket([vec(x=1), vec(x=1)])

    def test_morphism_on_forms(self, quadratic_morphism):
        t1 = PolyForm.coordinate(1, 1)
        extended = extend_morphism_to_forms(quadratic_morphism, 1)
        expected = Element(1, {"x": t1, "w": (t1 * t1).scale(F(1, 2))})
        assert extended.pushforward(Element.tensor({"x": F(1)}, t1)) == expected
        with pytest.raises(InputError):
            extended.pushforward(vec(x=1))


class TestTwistedOperations:
    def test_twisted_bracket(self, gauge):
        assert gauge.twisted_bracket(vec(x=1, z=-1), [vec(e=1), vec(x=1)]) == vec(z=-2)

    def test_twisted_bracket_needs_two_inputs(self, gauge):
        with pytest.raises(InputError):
            gauge.twisted_bracket(vec(x=1, z=-1), [vec(e=1)])

    def test_quotient_morphism(self, quadratic_morphism):
        reduced = quotient_morphism(quadratic_morphism, 2)
        assert reduced.source.truncation == 1
        assert check_infty_morphism(reduced).ok
        assert pushforward(reduced, vec(x=3)) == vec(x=3)
