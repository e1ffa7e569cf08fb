"""
The Deligne–Getzler–Hinich ∞-groupoid of a truncated filtered algebra.

MC simplices are degree-0 elements of L ⊗ Ω_n with zero curvature. Edges are
written β = β_0(t_0) + β_1(t_0) ⊗ dt_1: they start at vertex 1 (t_0 = 0) and
end at vertex 0 (t_0 = 1), and satisfy dβ_0/dt_0 = ∂^{β_0} β_1.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from app.config import settings
from app.errors import ContractViolation, ConvergenceError, InputError, PreconditionError
from app.services import forms
from app.services.forms import PolyForm
from app.services.slie import (
    Element,
    InftyMorphism,
    SLieAlgebra,
    extend_morphism_to_forms,
    extend_to_forms,
    twist_algebra,
)

logger = logging.getLogger(__name__)


@dataclass
class MCCheck:
    """Result of an MC test: the residual is curv(α)."""
    ok: bool
    residual: Element


@dataclass
class MCSimplex:
    """
    A degree-0 element of L ⊗ Ω_n together with the algebra it lives in.

    ``certified`` is only set by operations that ran an independent
    curvature check on the value.
    """
    algebra: SLieAlgebra
    value: Element
    certified: bool = False

    @property
    def dim(self) -> int:
        return self.value.dim

    @property
    def beta0(self) -> Element:
        """The 0-form part β_0(t_0) of an edge."""
        self._require_edge()
        return Element(1, {n: f.homogeneous_parts().get(0, PolyForm(1)) for n, f in self.value.terms.items()})

    @property
    def beta1(self) -> Element:
        """The dt_1 coefficient β_1(t_0) of an edge, as a 0-form."""
        self._require_edge()
        out = {}
        for name, form in self.value.terms.items():
            coefficient = {(exps, ()): c for (exps, dts), c in form.terms.items() if dts == (1,)}
            out[name] = PolyForm(1, coefficient)
        return Element(1, out)

    @property
    def start(self) -> Element:
        return self.algebra.eval_vertex_elem(self.value, 1 if self.dim else 0)

    @property
    def end(self) -> Element:
        return self.algebra.eval_vertex_elem(self.value, 0)

    def _require_edge(self) -> None:
        if self.dim != 1:
            raise InputError(f"Expected an edge, got a {self.dim}-simplex")


@dataclass
class StubElement:
    """A degree-0 element ν of L ⊗ Ω_n that is (∂+d)-exact and vanishes at vertex i."""
    nu: Element
    vertex: int

    def violations(self, algebra: SLieAlgebra) -> Optional[Tuple[str, Element]]:
        if algebra.element_degree(self.nu) not in (None, 0):
            return "stub has nonzero degree", self.nu
        closed = extend_to_forms(algebra, self.nu.dim).differential(self.nu)
        if not closed.is_zero():
            return "stub is not (∂+d)-closed", closed
        at_vertex = algebra.eval_vertex_elem(self.nu, self.vertex)
        if not at_vertex.is_zero():
            return f"stub does not vanish at vertex {self.vertex}", at_vertex
        return None

    def validate(self, algebra: SLieAlgebra) -> None:
        """
        Raises:
            PreconditionError: If ν is not in the stub space at its vertex
        """
        found = self.violations(algebra)
        if found:
            message, residual = found
            raise PreconditionError(message, residual=residual)


def lift(element: Element, dim: int) -> Element:
    """Constant extension of an element of L to L ⊗ Ω_n."""
    return Element.from_vector(element.to_vector(), dim)


def is_mc(algebra: SLieAlgebra, alpha: Element) -> MCCheck:
    residual = extend_to_forms(algebra, alpha.dim).curv(alpha)
    return MCCheck(ok=residual.is_zero(), residual=residual)


def _require_mc(algebra: SLieAlgebra, alpha: Element, what: str) -> None:
    check = is_mc(algebra, alpha)
    if not check.ok:
        raise PreconditionError(f"{what} is not Maurer–Cartan", residual=check.residual)


def certify(algebra: SLieAlgebra, value: Element, what: str = "result") -> MCSimplex:
    """
    Raises:
        ContractViolation: If the value has nonzero curvature
    """
    check = is_mc(algebra, value)
    if not check.ok:
        logger.error(f"Contract violation: {what} has nonzero curvature")
        raise ContractViolation(f"{what} is not Maurer–Cartan", residual=check.residual)
    return MCSimplex(algebra, value, certified=True)


def simplex_face(simplex: MCSimplex, i: int) -> MCSimplex:
    return MCSimplex(simplex.algebra, simplex.value.face(i), simplex.certified)


def simplex_degeneracy(simplex: MCSimplex, j: int) -> MCSimplex:
    return MCSimplex(simplex.algebra, simplex.value.degeneracy(j), simplex.certified)


def stub_of(simplex: MCSimplex, i: int) -> StubElement:
    """ν = (∂+d) h^i(s)."""
    algebra = simplex.algebra
    return StubElement(algebra.total_differential(algebra.h_elem(simplex.value, i)), i)


def _iteration_limit(algebra: SLieAlgebra) -> int:
    return algebra.truncation + settings.ITERATION_SLACK


def ezra_iterates(algebra: SLieAlgebra, i: int, mu: Element, stub: StubElement, dim: int) -> List[Element]:
    """
    Iterates α^(0) = μ + ν, α^(k+1) = α^(0) - Σ_{m≥2} 1/m! h^i{α^(k), …, α^(k)}_m
    up to and including the first repeated one.

    Raises:
        ConvergenceError: If no iterate repeats within N + ITERATION_SLACK steps
    """
    start = lift(mu, dim) + stub.nu
    iterates = [start]
    for _ in range(_iteration_limit(algebra)):
        current = iterates[-1]
        following = start - algebra.h_elem(algebra.power_sum(current, [], 2), i)
        iterates.append(following)
        if following == current:
            return iterates
    raise ConvergenceError(f"Reconstruction did not stabilise in {_iteration_limit(algebra)} steps",
                           residual=iterates[-1] - iterates[-2])


def reconstruct(algebra: SLieAlgebra, dim: int, i: int, mu: Element, stub) -> MCSimplex:
    """
    Rebuild the MC simplex with value μ at vertex i and stub ν.

    Args:
        algebra: The algebra
        dim: Simplex dimension n
        i: Vertex 0 ≤ i ≤ n
        mu: An MC element of L
        stub: A StubElement, or its ν as an Element

    Returns:
        The certified simplex

    Raises:
        PreconditionError: If μ is not MC or ν is not a stub at vertex i
        ConvergenceError: If the recursion does not stabilise
        ContractViolation: If the result fails its independent checks
    """
    if not 0 <= i <= dim:
        raise InputError(f"Vertex {i} does not exist on Δ^{dim}")
    if not isinstance(stub, StubElement):
        stub = StubElement(stub, i)
    if stub.nu.dim != dim:
        raise InputError(f"Stub lives on Δ^{stub.nu.dim}, expected Δ^{dim}")
    if mu.dim != 0:
        raise InputError("The vertex value must be an element of L")
    _require_mc(algebra, mu, "vertex value μ")
    stub.validate(algebra)
    iterates = ezra_iterates(algebra, i, mu, stub, dim)
    logger.debug(f"Reconstruction at vertex {i} of Δ^{dim} used {len(iterates) - 2} iterations")
    simplex = certify(algebra, iterates[-1], "reconstructed simplex")
    if algebra.eval_vertex_elem(simplex.value, i) != mu:
        raise ContractViolation("Reconstructed simplex has the wrong vertex value")
    if stub_of(simplex, i).nu != stub.nu:
        raise ContractViolation("Reconstructed simplex has the wrong stub")
    return simplex


def _path_integral(element: Element) -> Element:
    return element.map_forms(forms.path_integral, 1)


def integrate_edge(algebra: SLieAlgebra, start: Element, rho1: Element) -> MCSimplex:
    """
    Solve β_0(t_0) = start + ∫_0^{t_0} ∂^{β_0(u)} ρ_1(u) du by Picard iteration.

    Args:
        algebra: The algebra
        start: MC element at t_0 = 0
        rho1: Degree -1 path (an element of L, or 0-forms on Δ^1)

    Returns:
        The certified edge β_0 + ρ_1 ⊗ dt_1

    Raises:
        PreconditionError: If start is not MC
        ConvergenceError: If the iteration does not stabilise
    """
    _require_mc(algebra, start, "start point")
    if rho1.dim == 0:
        rho1 = lift(rho1, 1)
    if rho1.dim != 1 or any(f.form_degrees() != [0] for f in rho1.terms.values()):
        raise InputError("ρ_1 must be a polynomial path of 0-forms on Δ^1")
    if algebra.element_degree(rho1) not in (None, -1):
        raise InputError("ρ_1 must have degree -1")
    base = lift(start, 1)
    path = base
    for _ in range(_iteration_limit(algebra) + 1):
        following = base + _path_integral(algebra.twisted_partial(path, rho1))
        if following == path:
            break
        path = following
    else:
        raise ConvergenceError("Picard iteration did not stabilise", residual=following - path)
    value = path + rho1.wedge_form(PolyForm.differential(1, 1))
    return certify(algebra, value, "integrated edge")


def edge_endpoints(edge: MCSimplex) -> Tuple[Element, Element]:
    edge._require_edge()
    return edge.start, edge.end


def is_rectified(edge: MCSimplex) -> bool:
    """Whether β_1 is constant in t_0."""
    return all(f.is_constant_function() for f in edge.beta1.terms.values())


def reverse_edge(edge: MCSimplex) -> MCSimplex:
    edge._require_edge()
    return MCSimplex(edge.algebra, edge.value.pullback([1, 0]), edge.certified)


def _sigma_layer(algebra: SLieAlgebra, triangle: Element, weight: int) -> List[Element]:
    """
    Coefficients σ_s (s = 0, 1, …) of the weight-w part of σ_1(t_2), where
    the t_1 = 0 face is σ_0(t_2) + dt_2 σ_1(t_2).

    Raises:
        ContractViolation: If σ_1 has a nonzero part below the weight
    """
    bottom = triangle.face(1)
    layers: dict = {}
    for name, form in bottom.terms.items():
        for (exps, dts), c in form.terms.items():
            if dts != (1,):
                continue
            if algebra.weight_of[name] < weight:
                raise ContractViolation(
                    f"Rectification layer {weight}: σ_1 has a term of weight {algebra.weight_of[name]}")
            if algebra.weight_of[name] == weight:
                layers.setdefault(exps[0], {})[name] = -c
    if not layers:
        return []
    return [Element.from_vector(layers.get(s, {})) for s in range(max(layers) + 1)]


def rectify(algebra: SLieAlgebra, edge: MCSimplex, floor: int = 1) -> MCSimplex:
    """
    Replace an edge by one with the same endpoints and constant β_1 ∈ F_floor.

    Works on the triangle γ = e(t_2) and, for each weight m from the floor to N,
    corrects it by (∂+d)Δ with Δ = Σ_s Δ_s t_0 t_2^s chosen so that the t_1 = 0
    face loses its weight-m dt_2 part; the t_2 = 0 face is then rectified.

    Raises:
        PreconditionError: If β_1 has a term of weight below the floor
    """
    edge._require_edge()
    _require_mc(algebra, edge.value, "edge")
    low = algebra.min_weight(edge.beta1)
    if low is not None and low < floor:
        raise PreconditionError(f"β_1 has weight {low} below the floor {floor}", residual=edge.beta1)
    if is_rectified(edge):
        return MCSimplex(algebra, edge.value, True)
    start, end = edge.start, edge.end
    triangle = edge.value.pullback([1, 1, 0])
    t0 = PolyForm.coordinate(2, 0)
    t2 = PolyForm.coordinate(2, 2)
    for m in range(floor, algebra.truncation + 1):
        sigma = _sigma_layer(algebra, triangle, m)
        if not sigma:
            continue
        top = len(sigma) - 1
        deltas: List[Element] = [Element() for _ in sigma]
        deltas[top] = sigma[top].scale(Fraction(1, top + 1))
        for s in range(top - 1, -1, -1):
            deltas[s] = sigma[s].scale(Fraction(1, s + 1)) + deltas[s + 1]
        correction = Element(2)
        power = PolyForm.constant(2, 1)
        for s in range(top + 1):
            correction = correction + Element.tensor(deltas[s].to_vector(), forms.wedge(t0, power))
            power = forms.wedge(power, t2)
        nu = algebra.total_differential(correction + algebra.h_elem(triangle, 1))
        triangle = reconstruct(algebra, 2, 1, start, StubElement(nu, 1)).value
        logger.debug(f"Rectification layer {m} solved with {top + 1} coefficients")
    if _sigma_layer(algebra, triangle, algebra.truncation + 1):
        raise ContractViolation("Rectification left a nonzero bottom face")
    result = certify(algebra, triangle.face(2), "rectified edge")
    if not is_rectified(result):
        raise ContractViolation("Rectified edge has a non-constant β_1", residual=result.beta1)
    if result.start != start or result.end != end:
        raise ContractViolation("Rectification moved an endpoint")
    return result


@dataclass
class Composition:
    """A filled horn: the triangle and its third edge."""
    triangle: MCSimplex
    composite: MCSimplex


def compose_edges(algebra: SLieAlgebra, left: MCSimplex, right: MCSimplex) -> Composition:
    """
    Fill the 1-horn spanned by two edges (left.end = right.start).

    The triangle has left as its 0-th face, right as its 2-nd face and the
    composite, running from left.start to right.end, as its 1-st face.

    Raises:
        InputError: If the endpoints do not match
    """
    left._require_edge()
    right._require_edge()
    if left.end != right.start:
        raise InputError("Edges do not chain: left end differs from right start")
    _require_mc(algebra, left.value, "left edge")
    _require_mc(algebra, right.value, "right edge")
    gamma = algebra.h_elem(left.value, 0)
    rho = algebra.h_elem(right.value, 1)
    nu = algebra.total_differential(gamma.pullback([0, 0, 1]) + rho.pullback([0, 1, 1]))
    triangle = reconstruct(algebra, 2, 1, right.start, StubElement(nu, 1))
    if triangle.value.face(0) != left.value:
        raise ContractViolation("Triangle's 0-th face differs from the left edge")
    if triangle.value.face(2) != right.value:
        raise ContractViolation("Triangle's 2-nd face differs from the right edge")
    composite = certify(algebra, triangle.value.face(1), "composite edge")
    return Composition(triangle=triangle, composite=composite)


def concatenate(algebra: SLieAlgebra, edges: Sequence[MCSimplex]) -> MCSimplex:
    """
    Concatenate a chain of edges where the n-th edge (1-based) has β_1 ∈ F_n.

    Raises:
        InputError: If the list is empty or the endpoints do not chain
        PreconditionError: If the weight schedule is violated
    """
    if not edges:
        raise InputError("Nothing to concatenate")
    for n, edge in enumerate(edges, start=1):
        edge._require_edge()
        low = algebra.min_weight(edge.beta1)
        if low is not None and low < n:
            raise PreconditionError(f"Edge {n} has β_1 of weight {low} < {n}", residual=edge.beta1)
    for n in range(len(edges) - 1):
        if edges[n].end != edges[n + 1].start:
            raise InputError(f"Edge {n + 1} does not end where edge {n + 2} starts")
    result = edges[0]
    for edge in edges[1:]:
        result = compose_edges(algebra, result, edge).composite
    if len(edges) == 1:
        result = certify(algebra, result.value, "edge")
    logger.info(f"Concatenated {len(edges)} edges")
    return result


def shift_base(algebra: SLieAlgebra, alpha: Element, simplex: MCSimplex) -> MCSimplex:
    """
    α + s for an MC simplex s of the twisted algebra L^α.

    Raises:
        PreconditionError: If α is not MC in L or s is not MC in L^α
    """
    twisted = twist_algebra(algebra, alpha)
    _require_mc(twisted, simplex.value, "simplex of the twisted algebra")
    return certify(algebra, lift(alpha, simplex.dim) + simplex.value, "shifted simplex")


def unshift_base(algebra: SLieAlgebra, alpha: Element, simplex: MCSimplex) -> MCSimplex:
    """s - α, the inverse of shift_base."""
    twisted = twist_algebra(algebra, alpha)
    _require_mc(algebra, simplex.value, "simplex")
    return certify(twisted, simplex.value - lift(alpha, simplex.dim), "unshifted simplex")


def pushforward_simplex(morphism: InftyMorphism, simplex: MCSimplex) -> MCSimplex:
    """U_* applied levelwise on L ⊗ Ω_n."""
    image = extend_morphism_to_forms(morphism, simplex.dim).pushforward(simplex.value)
    return certify(morphism.target, image, "pushed-forward simplex")


class GroupoidService:
    """
    Service for working in the MC ∞-groupoid.

    This service provides:
    - MC checks, faces, degeneracies and stubs
    - Horn filling through the reconstruction recursion
    - Edge integration, rectification, composition and concatenation
    - Base-point shifting
    """

    def __init__(self):
        logger.info("GroupoidService initialized successfully")

    def is_mc(self, algebra: SLieAlgebra, alpha: Element) -> MCCheck:
        return is_mc(algebra, alpha)

    def reconstruct(self, algebra: SLieAlgebra, dim: int, i: int, mu: Element, nu: Element) -> MCSimplex:
        return reconstruct(algebra, dim, i, mu, StubElement(nu, i))

    def rectify(self, algebra: SLieAlgebra, edge: MCSimplex, floor: int = 1) -> MCSimplex:
        return rectify(algebra, edge, floor)

    def compose(self, algebra: SLieAlgebra, left: MCSimplex, right: MCSimplex) -> Composition:
        return compose_edges(algebra, left, right)

    def concatenate(self, algebra: SLieAlgebra, edges: Sequence[MCSimplex]) -> MCSimplex:
        return concatenate(algebra, edges)

    def is_ready(self) -> bool:
        return True


# Global groupoid service instance
_groupoid_service = None


def get_groupoid_service() -> GroupoidService:
    """Get or create the global groupoid service instance."""
    global _groupoid_service
    if _groupoid_service is None:
        _groupoid_service = GroupoidService()
    return _groupoid_service
