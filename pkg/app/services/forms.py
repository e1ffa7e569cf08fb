"""
Polynomial de Rham forms on the geometric n-simplex.

A form is stored in the coordinates t_1..t_n only; t_0 = 1 - Σ t_i and
dt_0 = -Σ dt_i are eliminated on construction, which makes the stored term map
a canonical normal form. Besides the dg-algebra structure this module provides
the simplicial maps, the vertex homotopies h^i, Whitney elementary forms and
the Dupont projection/homotopy onto simplicial cochains.
"""
import logging
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.errors import InputError

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
DtIndex = Tuple[int, ...]
TermKey = Tuple[Monomial, DtIndex]


def _merge_dt(a: DtIndex, b: DtIndex) -> Tuple[int, Optional[DtIndex]]:
    """Sign and sorted index tuple of dt_a ∧ dt_b, or (0, None) when they overlap."""
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


class PolyForm:
    """
    Polynomial differential form on Δ^n with rational coefficients.

    Terms map (exponents of t_1..t_n, increasing dt indices) to a nonzero
    Fraction. Instances are treated as immutable.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Optional[Dict[TermKey, Fraction]] = None):
        if dim < 0:
            raise InputError(f"Negative simplex dimension {dim}")
        self.dim = dim
        self.terms: Dict[TermKey, Fraction] = {}
        for (exps, dts), c in (terms or {}).items():
            if len(exps) != dim or any(e < 0 for e in exps):
                raise InputError(f"Bad exponent vector {exps} for Ω_{dim}")
            if any(not 1 <= i <= dim for i in dts) or list(dts) != sorted(set(dts)):
                raise InputError(f"Bad dt index list {dts} for Ω_{dim}")
            c = Fraction(c)
            if c != 0:
                self.terms[(tuple(exps), tuple(dts))] = c

    # Constructors

    @classmethod
    def zero(cls, dim: int) -> "PolyForm":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c) -> "PolyForm":
        return cls(dim, {((0,) * dim, ()): Fraction(c)})

    @classmethod
    def coordinate(cls, dim: int, i: int) -> "PolyForm":
        """t_i for 0 ≤ i ≤ dim, with t_0 expanded as 1 - Σ t_j."""
        if not 0 <= i <= dim:
            raise InputError(f"Coordinate t_{i} does not exist on Δ^{dim}")
        if i > 0:
            return cls(dim, {(_unit(dim, i), ()): Fraction(1)})
        terms = {((0,) * dim, ()): Fraction(1)}
        for j in range(1, dim + 1):
            terms[(_unit(dim, j), ())] = Fraction(-1)
        return cls(dim, terms)

    @classmethod
    def differential(cls, dim: int, i: int) -> "PolyForm":
        """dt_i for 0 ≤ i ≤ dim, with dt_0 expanded as -Σ dt_j."""
        if not 0 <= i <= dim:
            raise InputError(f"Differential dt_{i} does not exist on Δ^{dim}")
        if i > 0:
            return cls(dim, {((0,) * dim, (i,)): Fraction(1)})
        return cls(dim, {((0,) * dim, (j,)): Fraction(-1) for j in range(1, dim + 1)})

    # Structure

    def is_zero(self) -> bool:
        return not self.terms

    def form_degrees(self) -> List[int]:
        return sorted({len(dts) for _, dts in self.terms})

    def form_degree(self) -> Optional[int]:
        """Form degree of a homogeneous form (None for the zero form)."""
        degrees = self.form_degrees()
        if len(degrees) > 1:
            raise InputError(f"Form is not homogeneous (degrees {degrees})")
        return degrees[0] if degrees else None

    def homogeneous_parts(self) -> Dict[int, "PolyForm"]:
        parts: Dict[int, Dict[TermKey, Fraction]] = {}
        for key, c in self.terms.items():
            parts.setdefault(len(key[1]), {})[key] = c
        return {k: PolyForm(self.dim, v) for k, v in sorted(parts.items())}

    def polynomial_degree(self) -> int:
        return max((sum(exps) for exps, _ in self.terms), default=0)

    def is_constant_function(self) -> bool:
        return all(not any(exps) and not dts for exps, dts in self.terms)

    # Arithmetic

    def __add__(self, other: "PolyForm") -> "PolyForm":
        _same_dim(self, other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + c
        return PolyForm(self.dim, terms)

    def __neg__(self) -> "PolyForm":
        return PolyForm(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        c = Fraction(c)
        if c == 0:
            return PolyForm(self.dim)
        return PolyForm(self.dim, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PolyForm):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"PolyForm[{self.dim}](0)"
        parts = []
        for (exps, dts), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = "".join(f"t{i + 1}^{e}" if e > 1 else f"t{i + 1}" for i, e in enumerate(exps) if e)
            diff = "".join(f"dt{i}" for i in dts)
            parts.append(f"{c}{'*' + mono if mono else ''}{'*' + diff if diff else ''}")
        return f"PolyForm[{self.dim}](" + " + ".join(parts) + ")"

    # Serialization

    def to_terms(self) -> List[dict]:
        """Canonically ordered [{"coef", "t", "dt"}] terms, dt indices 1-based."""
        from app.services.exact_linalg import format_rational
        return [
            {"coef": format_rational(c), "t": list(exps), "dt": list(dts)}
            for (exps, dts), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ]

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable[dict]) -> "PolyForm":
        from app.services.exact_linalg import parse_rational
        out = cls(dim)
        for term in terms:
            exps = tuple(term.get("t") or (0,) * dim)
            dts = tuple(term.get("dt") or ())
            if len(exps) != dim:
                raise InputError(f"Exponent list {list(exps)} does not have length {dim}")
            if list(dts) != sorted(set(dts)):
                raise InputError(f"dt indices must be strictly increasing, got {list(dts)}")
            out = out + cls(dim, {(exps, dts): parse_rational(term["coef"])})
        return out


def _unit(dim: int, i: int) -> Monomial:
    return tuple(1 if j == i - 1 else 0 for j in range(dim))


def _same_dim(a: PolyForm, b: PolyForm) -> None:
    if a.dim != b.dim:
        raise InputError(f"Forms live on different simplices (Ω_{a.dim} vs Ω_{b.dim})")


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    """Graded-commutative product a ∧ b."""
    _same_dim(a, b)
    terms: Dict[TermKey, Fraction] = {}
    for (ea, da), ca in a.terms.items():
        for (eb, db), cb in b.terms.items():
            sign, dts = _merge_dt(da, db)
            if not sign:
                continue
            key = (tuple(x + y for x, y in zip(ea, eb)), dts)
            terms[key] = terms.get(key, Fraction(0)) + sign * ca * cb
    return PolyForm(a.dim, terms)


def d(omega: PolyForm) -> PolyForm:
    """de Rham differential."""
    terms: Dict[TermKey, Fraction] = {}
    for (exps, dts), c in omega.terms.items():
        for k in range(1, omega.dim + 1):
            e = exps[k - 1]
            if not e or k in dts:
                continue
            sign = -1 if sum(1 for j in dts if j < k) % 2 else 1
            new_exps = tuple(x - 1 if j == k - 1 else x for j, x in enumerate(exps))
            key = (new_exps, tuple(sorted(dts + (k,))))
            terms[key] = terms.get(key, Fraction(0)) + sign * e * c
    return PolyForm(omega.dim, terms)


def pullback(omega: PolyForm, vertex_map: Sequence[int]) -> PolyForm:
    """
    Pull a form on Δ^n back along the affine map Δ^m → Δ^n sending vertex j to vertex_map[j].

    The target coordinate t_k pulls back to the sum of the source coordinates
    t_j with vertex_map[j] = k.
    """
    m = len(vertex_map) - 1
    n = omega.dim
    if m < 0 or any(not 0 <= v <= n for v in vertex_map):
        raise InputError(f"Vertex map {list(vertex_map)} does not land in Δ^{n}")
    images = []
    for k in range(n + 1):
        image = PolyForm(m)
        for j, v in enumerate(vertex_map):
            if v == k:
                image = image + PolyForm.coordinate(m, j)
        images.append(image)
    diffs = [d(image) for image in images]
    powers: Dict[Tuple[int, int], PolyForm] = {}

    def power(k: int, e: int) -> PolyForm:
        if e == 0:
            return PolyForm.constant(m, 1)
        if (k, e) not in powers:
            powers[(k, e)] = wedge(power(k, e - 1), images[k])
        return powers[(k, e)]

    out = PolyForm(m)
    for (exps, dts), c in omega.terms.items():
        piece = PolyForm.constant(m, c)
        for k, e in enumerate(exps, start=1):
            if e:
                piece = wedge(piece, power(k, e))
        for k in dts:
            piece = wedge(piece, diffs[k])
            if piece.is_zero():
                break
        out = out + piece
    return out


class SimplicialKind(str, Enum):
    """Kinds of simplicial structure maps."""
    FACE = "face"
    DEGENERACY = "degeneracy"


def face(omega: PolyForm, i: int) -> PolyForm:
    """Restriction to the i-th face: t_i := 0, remaining coordinates renumbered."""
    n = omega.dim
    if n < 1 or not 0 <= i <= n:
        raise InputError(f"Face {i} does not exist on Δ^{n}")
    return pullback(omega, [j if j < i else j + 1 for j in range(n)])


def degeneracy(omega: PolyForm, j: int) -> PolyForm:
    """Pullback along the j-th codegeneracy: t_j := t_j + t_{j+1}."""
    n = omega.dim
    if not 0 <= j <= n:
        raise InputError(f"Degeneracy {j} does not exist on Δ^{n}")
    return pullback(omega, [k if k <= j else k - 1 for k in range(n + 2)])


def simplicial_map(omega: PolyForm, kind: SimplicialKind, index: int) -> PolyForm:
    if SimplicialKind(kind) is SimplicialKind.FACE:
        return face(omega, index)
    return degeneracy(omega, index)


def eval_vertex(omega: PolyForm, i: int) -> Fraction:
    """Value at vertex i; positive-degree terms evaluate to 0."""
    if not 0 <= i <= omega.dim:
        raise InputError(f"Vertex {i} does not exist on Δ^{omega.dim}")
    total = Fraction(0)
    for (exps, dts), c in omega.terms.items():
        if dts:
            continue
        if all(e == 0 for j, e in enumerate(exps) if j != i - 1):
            total += c
    return total


def _integral_factor(exps: Monomial, m: int, i: int, c: Fraction) -> Dict[Monomial, Fraction]:
    """∫_0^1 u^{m-1} f(u t + (1-u) e_i) du for f = c t^exps, as a polynomial."""
    total = sum(exps)
    if i == 0:
        return {exps: c / (m + total)}
    e_i = exps[i - 1]
    rest = total - e_i
    out: Dict[Monomial, Fraction] = {}
    for a in range(e_i + 1):
        p = m - 1 + rest + a
        q = e_i - a
        beta = Fraction(factorial(p) * factorial(q), factorial(p + q + 1))
        mono = tuple(a if j == i - 1 else e for j, e in enumerate(exps))
        out[mono] = out.get(mono, Fraction(0)) + c * comb(e_i, a) * beta
    return out


def h(i: int, omega: PolyForm) -> PolyForm:
    """
    Homotopy operator contracting Ω_n onto the vertex i.

    h(f dt_{k_1}…dt_{k_m}) = Σ_j (-1)^{j-1} (t_{k_j} - δ_{i,k_j}) dt_{k_1}…(omit k_j)…dt_{k_m}
                              · ∫_0^1 u^{m-1} f(u t + (1-u) e_i) du

    It satisfies d h + h d = id - ε^i and h h = 0. Zero-forms map to zero.
    """
    n = omega.dim
    if not 0 <= i <= n:
        raise InputError(f"Vertex {i} does not exist on Δ^{n}")
    terms: Dict[TermKey, Fraction] = {}
    for (exps, dts), c in omega.terms.items():
        m = len(dts)
        if m == 0:
            continue
        poly = _integral_factor(exps, m, i, c)
        for j, k in enumerate(dts):
            sign = -1 if j % 2 else 1
            rest = dts[:j] + dts[j + 1:]
            for mono, coef in poly.items():
                raised = tuple(e + 1 if idx == k - 1 else e for idx, e in enumerate(mono))
                key = (raised, rest)
                terms[key] = terms.get(key, Fraction(0)) + sign * coef
                if k == i:
                    key = (mono, rest)
                    terms[key] = terms.get(key, Fraction(0)) - sign * coef
    return PolyForm(n, terms)


def path_integral(f: PolyForm) -> PolyForm:
    """
    ∫_0^{t_0} f du for a function on Δ^1 written in the parameter t_0.

    Realised as h^1(f dt_0), which vanishes at vertex 1 (t_0 = 0).
    """
    if f.dim != 1:
        raise InputError("path_integral expects a form on Δ^1")
    if any(dts for _, dts in f.terms):
        raise InputError("path_integral expects a 0-form")
    return h(1, wedge(f, PolyForm.differential(1, 0)))


def _check_vertex_list(vertices: Sequence[int], n: int) -> Tuple[int, ...]:
    vertices = tuple(vertices)
    if not vertices or list(vertices) != sorted(set(vertices)) or vertices[0] < 0 or vertices[-1] > n:
        raise InputError(f"Invalid face {list(vertices)} of Δ^{n}")
    return vertices


def whitney(vertices: Sequence[int], n: int) -> PolyForm:
    """Elementary form k! Σ_j (-1)^j t_{i_j} dt_{i_0}…(omit i_j)…dt_{i_k}."""
    vertices = _check_vertex_list(vertices, n)
    k = len(vertices) - 1
    out = PolyForm(n)
    for j, v in enumerate(vertices):
        piece = PolyForm.coordinate(n, v)
        for other in vertices:
            if other != v:
                piece = wedge(piece, PolyForm.differential(n, other))
        out = out + (piece if j % 2 == 0 else -piece)
    return out.scale(factorial(k))


def integrate_face(omega: PolyForm, vertices: Sequence[int]) -> Fraction:
    """
    Integral over the face spanned by the vertices, oriented by vertex order.

    Raises:
        InputError: If some term's form degree is not len(vertices) - 1
    """
    vertices = _check_vertex_list(vertices, omega.dim)
    k = len(vertices) - 1
    if any(len(dts) != k for _, dts in omega.terms):
        raise InputError(f"Only {k}-forms can be integrated over a {k}-face")
    total = Fraction(0)
    for (exps, _), c in pullback(omega, vertices).terms.items():
        numerator = 1
        for e in exps:
            numerator *= factorial(e)
        total += c * Fraction(numerator, factorial(sum(exps) + k))
    return total


class ElementaryCochain:
    """
    Simplicial cochain on Δ^n: coefficients on faces given by increasing vertex lists.
    """

    def __init__(self, dim: int, coefficients: Optional[Dict[Tuple[int, ...], Fraction]] = None):
        self.dim = dim
        self.coefficients: Dict[Tuple[int, ...], Fraction] = {}
        for vertices, c in (coefficients or {}).items():
            vertices = _check_vertex_list(vertices, dim)
            c = Fraction(c)
            if c != 0:
                self.coefficients[vertices] = self.coefficients.get(vertices, Fraction(0)) + c
        self.coefficients = {k: v for k, v in self.coefficients.items() if v != 0}

    @classmethod
    def indicator(cls, vertices: Sequence[int], dim: int) -> "ElementaryCochain":
        return cls(dim, {tuple(vertices): Fraction(1)})

    def __add__(self, other: "ElementaryCochain") -> "ElementaryCochain":
        coefficients = dict(self.coefficients)
        for key, c in other.coefficients.items():
            coefficients[key] = coefficients.get(key, Fraction(0)) + c
        return ElementaryCochain(self.dim, coefficients)

    def scale(self, c) -> "ElementaryCochain":
        return ElementaryCochain(self.dim, {k: v * Fraction(c) for k, v in self.coefficients.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementaryCochain):
            return NotImplemented
        return self.dim == other.dim and self.coefficients == other.coefficients

    def __repr__(self) -> str:
        return f"ElementaryCochain[{self.dim}]({dict(sorted(self.coefficients.items()))})"

    def coboundary(self) -> "ElementaryCochain":
        """(δc)(J) = Σ_p (-1)^p c(J minus its p-th vertex)."""
        out: Dict[Tuple[int, ...], Fraction] = {}
        for vertices, c in self.coefficients.items():
            for v in range(self.dim + 1):
                if v in vertices:
                    continue
                bigger = tuple(sorted(vertices + (v,)))
                p = bigger.index(v)
                out[bigger] = out.get(bigger, Fraction(0)) + (-c if p % 2 else c)
        return ElementaryCochain(self.dim, out)

    def face(self, i: int) -> "ElementaryCochain":
        """Pullback along the i-th coface."""
        if self.dim < 1 or not 0 <= i <= self.dim:
            raise InputError(f"Face {i} does not exist on Δ^{self.dim}")
        out = {}
        for vertices, c in self.coefficients.items():
            if i in vertices:
                continue
            out[tuple(x if x < i else x - 1 for x in vertices)] = c
        return ElementaryCochain(self.dim - 1, out)

    def degeneracy(self, j: int) -> "ElementaryCochain":
        """Pullback along the j-th codegeneracy (faces it collapses get 0)."""
        if not 0 <= j <= self.dim:
            raise InputError(f"Degeneracy {j} does not exist on Δ^{self.dim}")
        out: Dict[Tuple[int, ...], Fraction] = {}
        for vertices, c in self.coefficients.items():
            lifted = [x if x < j else x + 1 for x in vertices if x != j]
            choices = [[]] if j not in vertices else [[j], [j + 1]]
            for extra in choices:
                key = tuple(sorted(lifted + extra))
                out[key] = out.get(key, Fraction(0)) + c
        return ElementaryCochain(self.dim + 1, out)

    def to_form(self) -> PolyForm:
        """Inclusion into Ω_n through the Whitney forms."""
        out = PolyForm(self.dim)
        for vertices, c in sorted(self.coefficients.items()):
            out = out + whitney(vertices, self.dim).scale(c)
        return out


def dupont_P(omega: PolyForm) -> ElementaryCochain:
    """Projection onto cochains: integrate every k-form part over every k-face."""
    n = omega.dim
    coefficients = {}
    for k, part in omega.homogeneous_parts().items():
        if k > n:
            continue
        for vertices in combinations(range(n + 1), k + 1):
            value = integrate_face(part, vertices)
            if value:
                coefficients[vertices] = value
    return ElementaryCochain(n, coefficients)


def dupont_projection(omega: PolyForm) -> PolyForm:
    """P as an endomorphism of Ω_n."""
    return dupont_P(omega).to_form()


def dupont_s(omega: PolyForm) -> PolyForm:
    """
    Dupont's homotopy: s = Σ_{k=0}^{n-1} (-1)^k Σ_{|I|=k+1} ω_I ∧ h^{i_k} ⋯ h^{i_0}.

    Satisfies d s + s d = id - P and P s = 0, and commutes with faces and
    degeneracies.
    """
    n = omega.dim
    out = PolyForm(n)
    for k in range(n):
        for vertices in combinations(range(n + 1), k + 1):
            x = omega
            for v in vertices:
                x = h(v, x)
                if x.is_zero():
                    break
            if x.is_zero():
                continue
            piece = wedge(whitney(vertices, n), x)
            out = out + (-piece if k % 2 else piece)
    return out
