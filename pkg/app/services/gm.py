"""
Goldman–Millson transfer along a filtered quasi-isomorphism, and homotopy
groups of abelian algebras through the Moore complex.

Both transfer constructions work one filtration layer at a time: every
"there exists" of the induction becomes a linear system on associated graded
pieces, solved by ``exact_linalg``. An unsolvable layer refutes the
quasi-isomorphism hypothesis and is raised as ``HypothesisRefuted``.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from app.errors import ContractViolation, HypothesisRefuted, InputError, PreconditionError
from app.services.exact_linalg import (
    CochainComplex,
    CohomologyDecision,
    Matrix,
    Vector,
    independent_modulo,
    nullspace,
    rank,
    solve_linear,
)
from app.services.forms import ElementaryCochain, PolyForm
from app.services.mc import (
    MCSimplex,
    concatenate,
    integrate_edge,
    is_mc,
    pushforward_simplex,
    reconstruct,
    rectify,
    reverse_edge,
)
from app.services.slie import Element, InftyMorphism, SLieAlgebra, phi_graded, pushforward

logger = logging.getLogger(__name__)


class SimplicialVectorSpace:
    """
    Finite truncation of a simplicial vector space.

    Level n has dimension dims[n]; faces[n][i]: V_n → V_{n-1} and
    degeneracies[n][j]: V_n → V_{n+1} are matrices in the level bases.
    """

    def __init__(self, dims: Sequence[int], faces: Sequence[Sequence[Matrix]],
                 degeneracies: Sequence[Sequence[Matrix]], validate: bool = True):
        self.dims = list(dims)
        self.faces = [list(level) for level in faces]
        self.degeneracies = [list(level) for level in degeneracies]
        self.levels = len(self.dims)
        if validate:
            self.validate()

    def _check_shapes(self) -> None:
        if len(self.faces) != self.levels or len(self.degeneracies) != self.levels:
            raise InputError("Face and degeneracy lists must have one entry per level")
        for n in range(self.levels):
            expected = n + 1 if n else 0
            if len(self.faces[n]) != expected:
                raise InputError(f"Level {n} needs {expected} face maps")
            for m in self.faces[n]:
                if (m.rows, m.cols) != (self.dims[n - 1], self.dims[n]):
                    raise InputError(f"Face map at level {n} has shape ({m.rows}, {m.cols})")
            expected = n + 1 if n + 1 < self.levels else 0
            if len(self.degeneracies[n]) != expected:
                raise InputError(f"Level {n} needs {expected} degeneracy maps")
            for m in self.degeneracies[n]:
                if (m.rows, m.cols) != (self.dims[n + 1], self.dims[n]):
                    raise InputError(f"Degeneracy map at level {n} has shape ({m.rows}, {m.cols})")

    def validate(self) -> None:
        """
        Raises:
            InputError: If shapes are wrong or a simplicial identity fails
        """
        self._check_shapes()
        d, s = self.faces, self.degeneracies
        for n in range(2, self.levels):
            for j in range(n + 1):
                for i in range(j):
                    if d[n - 1][i] @ d[n][j] != d[n - 1][j - 1] @ d[n][i]:
                        raise InputError(f"d_{i} d_{j} ≠ d_{j - 1} d_{i} at level {n}")
        for n in range(self.levels - 2):
            for j in range(n + 1):
                for i in range(j + 1):
                    if s[n + 1][i] @ s[n][j] != s[n + 1][j + 1] @ s[n][i]:
                        raise InputError(f"s_{i} s_{j} ≠ s_{j + 1} s_{i} at level {n}")
        for n in range(self.levels - 1):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = d[n + 1][i] @ s[n][j]
                    if i == j or i == j + 1:
                        rhs = Matrix.identity(self.dims[n])
                    elif i < j:
                        if n == 0:
                            continue
                        rhs = s[n - 1][j - 1] @ d[n][i]
                    else:
                        if n == 0:
                            continue
                        rhs = s[n - 1][j] @ d[n][i - 1]
                    if lhs != rhs:
                        raise InputError(f"Face {i} after degeneracy {j} fails at level {n}")

    def moore_differential(self, n: int) -> Matrix:
        """Σ_j (-1)^j d_j: V_n → V_{n-1}."""
        total = Matrix(self.dims[n - 1], self.dims[n])
        for j, face in enumerate(self.faces[n]):
            total = total + (face if j % 2 == 0 else face.scaled(Fraction(-1)))
        return total


@dataclass
class MooreHomology:
    degree: int
    dimension: int
    basis: List[List[Fraction]]


def moore_homology(space: SimplicialVectorSpace, i: int, levels: Optional[int] = None) -> MooreHomology:
    """
    H_i of the Moore complex using levels 0..levels-1.

    Raises:
        InputError: If fewer than i + 2 levels are available
    """
    levels = space.levels if levels is None else levels
    if i < 0 or levels < i + 2 or levels > space.levels:
        raise InputError(f"H_{i} needs levels ≥ {i + 2} (have {min(levels, space.levels)})")
    size = space.dims[i]
    if i == 0:
        cycles = [[Fraction(int(r == c)) for r in range(size)] for c in range(size)]
    else:
        cycles = nullspace(space.moore_differential(i)) if size else []
    incoming = space.moore_differential(i + 1)
    boundaries = [incoming.column(c) for c in range(incoming.cols)]
    chosen = independent_modulo(boundaries, cycles, size) if size else []
    basis = [cycles[k] for k in chosen]
    return MooreHomology(degree=i, dimension=len(basis), basis=basis)


def constant_simplicial_space(dim: int, levels: int) -> SimplicialVectorSpace:
    """The constant simplicial vector space on ℚ^dim."""
    ident = Matrix.identity(dim)
    faces = [[ident] * (n + 1) if n else [] for n in range(levels)]
    degeneracies = [[ident] * (n + 1) if n + 1 < levels else [] for n in range(levels)]
    return SimplicialVectorSpace([dim] * levels, faces, degeneracies)


def _cochain_coordinates(algebra: SLieAlgebra, n: int, degree: int) -> List[Tuple[str, Tuple[int, ...]]]:
    """Pairs (v, I) spanning degree `degree` of L ⊗ C(Δ^n), with |v| + |I| - 1 = degree."""
    out = []
    for size in range(1, n + 2):
        for face in combinations(range(n + 1), size):
            for s in algebra.symbols:
                if s.degree + size - 1 == degree:
                    out.append((s.name, face))
    return out


def _cochain_level(algebra: SLieAlgebra, n: int):
    """Ambient coordinates of degree 0 and a basis of Z^0(L ⊗ C(Δ^n)) as columns."""
    source = _cochain_coordinates(algebra, n, 0)
    target = _cochain_coordinates(algebra, n, 1)
    target_index = {c: k for k, c in enumerate(target)}
    entries: Dict[Tuple[int, int], Fraction] = {}
    for col, (name, face) in enumerate(source):
        for t, c in algebra.differential.get(name, {}).items():
            row = target_index[(t, face)]
            entries[(row, col)] = entries.get((row, col), Fraction(0)) + c
        sign = -1 if algebra.degree_of[name] % 2 else 1
        for bigger, c in ElementaryCochain.indicator(face, n).coboundary().coefficients.items():
            row = target_index[(name, bigger)]
            entries[(row, col)] = entries.get((row, col), Fraction(0)) + sign * c
    cocycles = nullspace(Matrix(len(target), len(source), entries)) if source else []
    return source, cocycles


def _express(columns: List[List[Fraction]], vector: List[Fraction]) -> List[Fraction]:
    if not columns:
        if any(vector):
            raise ContractViolation("Image of a cocycle left the cocycle space")
        return []
    x = solve_linear(Matrix.from_columns(columns, len(vector)), vector)
    if x is None:
        raise ContractViolation("Image of a cocycle left the cocycle space")
    return x


def cochain_simplicial_space(algebra: SLieAlgebra, levels: int) -> SimplicialVectorSpace:
    """
    The simplicial vector space n ↦ Z^0(L ⊗ C(Δ^n)) for an abelian algebra,
    with faces and degeneracies induced by those of the simplicial cochains.
    """
    if not algebra.is_abelian():
        raise InputError(f"{algebra.name} has brackets; the cochain model needs an abelian algebra")
    data = [_cochain_level(algebra, n) for n in range(levels)]

    def transport(n_from: int, n_to: int, action) -> Matrix:
        source_coords, source_basis = data[n_from]
        target_coords, target_basis = data[n_to]
        index = {c: k for k, c in enumerate(target_coords)}
        columns = []
        for vector in source_basis:
            image = [Fraction(0)] * len(target_coords)
            for (name, face), c in zip(source_coords, vector):
                if not c:
                    continue
                cochain = action(ElementaryCochain.indicator(face, n_from))
                for new_face, v in cochain.coefficients.items():
                    image[index[(name, new_face)]] += c * v
            columns.append(_express(target_basis, image))
        return Matrix.from_columns(columns, len(target_basis))

    dims = [len(data[n][1]) for n in range(levels)]
    faces = [[transport(n, n - 1, lambda c, i=i: c.face(i)) for i in range(n + 1)] if n else []
             for n in range(levels)]
    degeneracies = [[transport(n, n + 1, lambda c, j=j: c.degeneracy(j)) for j in range(n + 1)]
                    if n + 1 < levels else [] for n in range(levels)]
    logger.debug(f"Cochain model of {algebra.name}: level dimensions {dims}")
    return SimplicialVectorSpace(dims, faces, degeneracies)


@dataclass
class AbelianHomotopy:
    degree: int
    dimension: int
    moore_dimension: Optional[int] = None


def abelian_homotopy(algebra: SLieAlgebra, i: int, cross_check: bool = False) -> AbelianHomotopy:
    """
    π_i of the MC space of an abelian algebra as dim H^{-i} of the truncation
    ⋯ → L^{-1} → Z^0(L).

    Raises:
        InputError: If the algebra has brackets or i < 0
        ContractViolation: If the Moore-complex cross-check disagrees
    """
    if not algebra.is_abelian():
        raise InputError(f"{algebra.name} has brackets; π_i is only available for abelian algebras")
    if i < 0:
        raise InputError(f"Negative homotopy degree {i}")
    full = algebra.complex()
    degree_zero = full.names_in(0)
    cycles = nullspace(full.differential_matrix(0)) if degree_zero else []
    cycle_names = [f"z{k}" for k in range(len(cycles))]
    basis: Dict[int, List[str]] = {d: list(names) for d, names in full.basis.items() if d < 0}
    if cycle_names:
        basis[0] = cycle_names
    differential: Dict[str, Vector] = {}
    for name in full.names_in(-1):
        column = full.to_column(full.apply({name: Fraction(1)}), 0) if degree_zero else []
        coords = _express(cycles, column)
        image = {cycle_names[k]: c for k, c in enumerate(coords) if c}
        if image:
            differential[name] = image
    for name, image in full.differential.items():
        if full.degree_of[name] < -1:
            differential[name] = image
    degrees = [d for d in basis] or [0]
    truncated = CochainComplex(basis, differential, window=(min(min(degrees), -i) - 1, 1))
    dimension = CohomologyDecision(truncated, -i).dimension
    result = AbelianHomotopy(degree=i, dimension=dimension)
    if cross_check:
        space = cochain_simplicial_space(algebra, i + 2)
        result.moore_dimension = moore_homology(space, i).dimension
        if result.moore_dimension != dimension:
            raise ContractViolation(
                f"π_{i}: truncation gives {dimension}, Moore complex gives {result.moore_dimension}")
    return result


@dataclass
class QisoFailure:
    weight: int
    degree: int
    reason: str
    witness: Vector = field(default_factory=dict)


@dataclass
class QisoReport:
    morphism: str
    checked: int = 0
    failures: List[QisoFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _phi_matrix(morphism: InftyMorphism, weight: int, source: CochainComplex, target: CochainComplex,
                degree: int) -> Matrix:
    columns = []
    for name in source.names_in(degree):
        image = phi_graded(morphism, weight, {name: Fraction(1)})
        columns.append(target.to_column(image, degree))
    return Matrix.from_columns(columns, len(target.names_in(degree)))


def check_filtered_qiso(morphism: InftyMorphism) -> QisoReport:
    """
    Check that φ induces isomorphisms H(gr_w L) → H(gr_w L̃) for w = 1..N in every degree.
    """
    report = QisoReport(morphism=morphism.name)
    for weight in range(1, morphism.source.truncation + 1):
        source = morphism.source.graded_piece(weight)
        target = morphism.target.graded_piece(weight)
        low = min(source.window[0], target.window[0])
        high = max(source.window[1], target.window[1])
        for degree in range(low + 1, high):
            source_h = CohomologyDecision(source, degree)
            target_h = CohomologyDecision(target, degree)
            report.checked += 1
            images = []
            for rep in source_h.representatives:
                image = phi_graded(morphism, weight, rep)
                if not target_h.is_cocycle(image):
                    report.failures.append(QisoFailure(weight, degree, "φ does not map cocycles to cocycles", rep))
                    break
                images.append(target_h.classify(image))
            else:
                rows = target_h.dimension
                matrix = Matrix.from_columns(images, rows)
                r = rank(matrix)
                if r < source_h.dimension:
                    kernel = nullspace(matrix)[0]
                    witness: Vector = {}
                    for coef, rep in zip(kernel, source_h.representatives):
                        for name, c in rep.items():
                            witness[name] = witness.get(name, Fraction(0)) + coef * c
                    report.failures.append(QisoFailure(weight, degree, "a nonzero class maps to zero",
                                                       {k: v for k, v in witness.items() if v}))
                if r < rows:
                    unit = [[Fraction(int(a == b)) for a in range(rows)] for b in range(rows)]
                    missed = independent_modulo(images, unit, rows)[0]
                    report.failures.append(QisoFailure(weight, degree, "a class is not in the image",
                                                       target_h.representatives[missed]))
    if report.failures:
        first = report.failures[0]
        logger.warning(f"{morphism.name} is not a filtered quasi-isomorphism: "
                       f"weight {first.weight}, degree {first.degree}: {first.reason}")
    return report


def _refute_unless_qiso(morphism: InftyMorphism) -> None:
    report = check_filtered_qiso(morphism)
    if not report.ok:
        first = report.failures[0]
        raise HypothesisRefuted(f"Not a filtered quasi-isomorphism: {first.reason}",
                                first.weight, first.degree, Element.from_vector(first.witness), report)


@dataclass
class Layer:
    """Witnesses chosen while solving one filtration layer."""
    weight: int
    witnesses: Dict[str, Element] = field(default_factory=dict)


@dataclass
class TransferCertificate:
    """
    Output of a transfer construction with everything needed to re-check it.

    kind "preimage": inputs {alpha_tilde}, result {alpha}, edge β̃ in the target.
    kind "connect": inputs {alpha, alpha_prime}, input_edge β̃, edge in the source.
    """
    kind: str
    morphism: str
    inputs: Dict[str, Element]
    result: Dict[str, Element]
    edge: MCSimplex
    layers: List[Layer] = field(default_factory=list)
    input_edge: Optional[MCSimplex] = None


def _split(x: List[Fraction], first: CochainComplex, first_degree: int,
           second: CochainComplex, second_degree: int) -> Tuple[Vector, Vector]:
    cut = len(first.names_in(first_degree))
    return first.to_vector(x[:cut], first_degree), second.to_vector(x[cut:], second_degree)


def mc_preimage(morphism: InftyMorphism, alpha_tilde: Element) -> TransferCertificate:
    """
    Find an MC element α of the source and an edge β̃ from α̃ to U_*(α).

    Raises:
        HypothesisRefuted: If U fails the graded check or a layer is unsolvable
        PreconditionError: If α̃ is not MC
    """
    source, target = morphism.source, morphism.target
    _refute_unless_qiso(morphism)
    check = is_mc(target, alpha_tilde)
    if not check.ok:
        raise PreconditionError("α̃ is not Maurer–Cartan", residual=check.residual)
    top = source.truncation
    alpha = Element()
    beta1: Vector = {}
    edge = integrate_edge(target, alpha_tilde, Element.from_vector(beta1))
    certificate = TransferCertificate("preimage", morphism.name, {"alpha_tilde": alpha_tilde}, {}, edge)
    for n in range(top):
        weight = n + 1
        gr_source = source.graded_piece(weight)
        gr_target = target.graded_piece(weight)
        c = target.weight_part(edge.end - pushforward(morphism, alpha), weight).to_vector()
        matrix = Matrix.block([
            [gr_source.differential_matrix(0), Matrix(len(gr_source.names_in(1)), len(gr_target.names_in(-1)))],
            [_phi_matrix(morphism, weight, gr_source, gr_target, 0),
             gr_target.differential_matrix(-1).scaled(Fraction(-1))],
        ])
        rhs = [Fraction(0)] * len(gr_source.names_in(1)) + gr_target.to_column(c, 0)
        x = solve_linear(matrix, rhs)
        if x is None:
            logger.warning(f"Preimage layer {weight} has no solution")
            raise HypothesisRefuted(f"Endpoint defect at weight {weight} is not hit by φ modulo boundaries",
                                    weight, 0, Element.from_vector(c))
        gamma, xi = _split(x, gr_source, 0, gr_target, -1)
        alpha = alpha + Element.from_vector(gamma)
        for name, v in xi.items():
            beta1[name] = beta1.get(name, Fraction(0)) + v
        edge = integrate_edge(target, alpha_tilde, Element.from_vector(beta1))
        sigma: Vector = {}
        if weight + 1 <= top:
            gr_next = source.graded_piece(weight + 1)
            defect = source.weight_part(source.curv(alpha), weight + 1).to_vector()
            y = solve_linear(gr_next.differential_matrix(0),
                             [-v for v in gr_next.to_column(defect, 1)])
            if y is None:
                logger.warning(f"Curvature at weight {weight + 1} is not a coboundary")
                raise HypothesisRefuted(f"Curvature at weight {weight + 1} is not a coboundary",
                                        weight + 1, 1, Element.from_vector(defect))
            sigma = gr_next.to_vector(y, 0)
            alpha = alpha + Element.from_vector(sigma)
        certificate.layers.append(Layer(weight, {
            "gamma": Element.from_vector(gamma),
            "xi": Element.from_vector(xi),
            "sigma": Element.from_vector(sigma),
            "alpha": alpha,
            "endpoint": edge.end,
        }))
        logger.debug(f"Preimage layer {weight} solved")
    if not is_mc(source, alpha).ok:
        raise ContractViolation("Preimage is not Maurer–Cartan", residual=source.curv(alpha))
    if edge.start != alpha_tilde or edge.end != pushforward(morphism, alpha):
        raise ContractViolation("Preimage edge has the wrong endpoints")
    certificate.result = {"alpha": alpha}
    certificate.edge = edge
    logger.info(f"Found an MC preimage along {morphism.name} in {top} layers")
    return certificate


def transfer_connect(morphism: InftyMorphism, alpha: Element, alpha_prime: Element,
                     beta: MCSimplex) -> TransferCertificate:
    """
    Lift an edge β̃ from U_*(α) to U_*(α') to an edge from α to α' in the source.

    Raises:
        HypothesisRefuted: If U fails the graded check or a layer is unsolvable
        InputError: If β̃ does not connect U_*(α) to U_*(α')
        PreconditionError: If α, α' or β̃ is not MC
    """
    source, target = morphism.source, morphism.target
    _refute_unless_qiso(morphism)
    for what, value, algebra in (("α", alpha, source), ("α'", alpha_prime, source), ("β̃", beta.value, target)):
        check = is_mc(algebra, value)
        if not check.ok:
            raise PreconditionError(f"{what} is not Maurer–Cartan", residual=check.residual)
    if beta.start != pushforward(morphism, alpha) or beta.end != pushforward(morphism, alpha_prime):
        raise InputError("The target edge does not connect U_*(α) to U_*(α')")
    top = source.truncation
    current_beta = rectify(target, beta, 1)
    current = alpha
    edges: List[MCSimplex] = []
    certificate = TransferCertificate("connect", morphism.name, {"alpha": alpha, "alpha_prime": alpha_prime},
                                      {}, beta, input_edge=beta)
    t0 = PolyForm.coordinate(2, 0)
    t2 = PolyForm.coordinate(2, 2)
    rotation = t2 * PolyForm.differential(2, 0) - t0 * PolyForm.differential(2, 2)
    for n in range(1, top + 1):
        gr_source = source.graded_piece(n)
        gr_target = target.graded_piece(n)
        delta = source.weight_part(alpha_prime - current, n).to_vector()
        beta1 = current_beta.beta1.face(1).to_vector()
        b = target.weight_part(Element.from_vector(beta1), n).to_vector()
        matrix = Matrix.block([
            [gr_source.differential_matrix(-1), Matrix(len(gr_source.names_in(0)), len(gr_target.names_in(-2)))],
            [_phi_matrix(morphism, n, gr_source, gr_target, -1), gr_target.differential_matrix(-2)],
        ])
        rhs = gr_source.to_column(delta, 0) + gr_target.to_column(b, -1)
        x = solve_linear(matrix, rhs)
        if x is None:
            logger.warning(f"Connecting layer {n} has no solution")
            raise HypothesisRefuted(f"Layer {n} of the connecting problem is unsolvable", n, -1,
                                    Element.from_vector(delta) if delta else Element.from_vector(b))
        rho1, gamma_tilde = _split(x, gr_source, -1, gr_target, -2)
        rho = integrate_edge(source, current, Element.from_vector(rho1))
        edges.append(rho)
        following = rho.end
        certificate.layers.append(Layer(n, {
            "rho1": Element.from_vector(rho1),
            "gamma_tilde": Element.from_vector(gamma_tilde),
            "beta1": Element.from_vector(beta1),
            "alpha": following,
        }))
        if n < top:
            rho_tilde = pushforward_simplex(morphism, rho)
            xi = target.h_elem(rho_tilde.value, 1)
            nu = target.total_differential(
                xi.pullback([1, 1, 0])
                + Element.tensor(beta1, t0)
                + Element.tensor(gamma_tilde, rotation))
            triangle = reconstruct(target, 2, 1, pushforward(morphism, current), nu)
            if triangle.value.face(2) != current_beta.value:
                raise ContractViolation(f"Layer {n}: horn filler does not restrict to β̃ on its 2-nd face")
            if triangle.value.face(0) != reverse_edge(rho_tilde).value:
                raise ContractViolation(f"Layer {n}: horn filler does not restrict to U_*(ρ) on its 0-th face")
            current_beta = rectify(target, MCSimplex(target, triangle.value.face(1)), n + 1)
        current = following
        logger.debug(f"Connecting layer {n} solved")
    result = concatenate(source, edges) if edges else integrate_edge(source, alpha, Element())
    if result.start != alpha or result.end != alpha_prime:
        raise ContractViolation("Connecting edge has the wrong endpoints")
    certificate.result = {"alpha_final": current}
    certificate.edge = result
    logger.info(f"Connected two MC elements along {morphism.name} in {top} layers")
    return certificate


@dataclass
class VerificationReport:
    ok: bool = True
    failures: List[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.ok = False
        self.failures.append(message)


_PREIMAGE_WITNESSES = ("gamma", "xi", "sigma", "alpha", "endpoint")
_CONNECT_WITNESSES = ("rho1", "gamma_tilde", "beta1", "alpha")


def _missing_witnesses(witnesses: Dict[str, Element], required: Sequence[str]) -> List[str]:
    return [k for k in required if k not in witnesses]


def verify_certificate(morphism: InftyMorphism, certificate: TransferCertificate) -> VerificationReport:
    """Re-check a certificate using only MC tests, endpoint equalities and filtration inclusions."""
    source, target = morphism.source, morphism.target
    report = VerificationReport()
    if certificate.kind == "preimage":
        alpha_tilde = certificate.inputs["alpha_tilde"]
        if "alpha" not in certificate.result:
            report.fail("certificate has no resulting α")
            return report
        alpha = certificate.result["alpha"]
        if not is_mc(target, alpha_tilde).ok:
            report.fail("α̃ is not Maurer–Cartan")
        if not is_mc(source, alpha).ok:
            report.fail("α is not Maurer–Cartan")
        if not is_mc(target, certificate.edge.value).ok:
            report.fail("β̃ is not Maurer–Cartan")
        if certificate.edge.start != alpha_tilde:
            report.fail("β̃ does not start at α̃")
        if certificate.edge.end != pushforward(morphism, alpha):
            report.fail("β̃ does not end at U_*(α)")
        previous = Element()
        for layer in certificate.layers:
            w, got = layer.weight, layer.witnesses
            missing = _missing_witnesses(got, _PREIMAGE_WITNESSES)
            if missing:
                report.fail(f"layer {w}: missing witnesses {missing}")
                continue
            if not source.in_filtration(got["gamma"], w):
                report.fail(f"layer {w}: γ is not in F_{w}")
            if not target.in_filtration(got["xi"], w):
                report.fail(f"layer {w}: ξ̃ is not in F_{w}")
            if not source.in_filtration(got["sigma"], w + 1):
                report.fail(f"layer {w}: σ is not in F_{w + 1}")
            if not source.in_filtration(source.curv(got["alpha"]), w + 2):
                report.fail(f"layer {w}: curv(α) is not in F_{w + 2}")
            if not source.in_filtration(got["alpha"] - previous, w):
                report.fail(f"layer {w}: α moved below weight {w}")
            if not target.in_filtration(got["endpoint"] - pushforward(morphism, got["alpha"]), w + 1):
                report.fail(f"layer {w}: endpoint defect is not in F_{w + 1}")
            previous = got["alpha"]
        if certificate.layers and previous != alpha:
            report.fail("last layer does not produce α")
    elif certificate.kind == "connect":
        alpha = certificate.inputs["alpha"]
        alpha_prime = certificate.inputs["alpha_prime"]
        for what, value, algebra in (("α", alpha, source), ("α'", alpha_prime, source),
                                     ("output edge", certificate.edge.value, source)):
            if not is_mc(algebra, value).ok:
                report.fail(f"{what} is not Maurer–Cartan")
        if certificate.input_edge is not None:
            beta = certificate.input_edge
            if not is_mc(target, beta.value).ok:
                report.fail("β̃ is not Maurer–Cartan")
            if beta.start != pushforward(morphism, alpha) or beta.end != pushforward(morphism, alpha_prime):
                report.fail("β̃ does not connect U_*(α) to U_*(α')")
        if certificate.edge.start != alpha:
            report.fail("output edge does not start at α")
        if certificate.edge.end != alpha_prime:
            report.fail("output edge does not end at α'")
        previous = alpha
        for layer in certificate.layers:
            n, got = layer.weight, layer.witnesses
            missing = _missing_witnesses(got, _CONNECT_WITNESSES)
            if missing:
                report.fail(f"layer {n}: missing witnesses {missing}")
                continue
            for key, algebra in (("rho1", source), ("gamma_tilde", target), ("beta1", target)):
                if not algebra.in_filtration(got[key], n):
                    report.fail(f"layer {n}: {key} is not in F_{n}")
            if not source.in_filtration(alpha_prime - got["alpha"], n + 1):
                report.fail(f"layer {n}: α' - α^(n+1) is not in F_{n + 1}")
            if not source.in_filtration(got["alpha"] - previous - source.partial(got["rho1"]), n + 1):
                report.fail(f"layer {n}: α^(n+1) - α^(n) - ∂ρ_1 is not in F_{n + 1}")
            residual = got["beta1"] - morphism.phi(got["rho1"]) - target.partial(got["gamma_tilde"])
            if not target.in_filtration(residual, n + 1):
                report.fail(f"layer {n}: β̃_1 - φρ_1 - ∂γ̃ is not in F_{n + 1}")
            previous = got["alpha"]
    else:
        report.fail(f"Unknown certificate kind '{certificate.kind}'")
    if report.ok:
        logger.info(f"Certificate ({certificate.kind}) verified")
    else:
        logger.warning(f"Certificate ({certificate.kind}) failed {len(report.failures)} checks")
    return report


class GoldmanMillsonService:
    """
    Service for transfer along filtered quasi-isomorphisms.

    This service provides:
    - The graded quasi-isomorphism check
    - MC preimages and connecting edges with certificates
    - Certificate verification
    - Abelian homotopy groups and Moore homology
    """

    def __init__(self):
        logger.info("GoldmanMillsonService initialized successfully")

    def check(self, morphism: InftyMorphism) -> QisoReport:
        return check_filtered_qiso(morphism)

    def preimage(self, morphism: InftyMorphism, alpha_tilde: Element) -> TransferCertificate:
        return mc_preimage(morphism, alpha_tilde)

    def connect(self, morphism: InftyMorphism, alpha: Element, alpha_prime: Element,
                beta: MCSimplex) -> TransferCertificate:
        return transfer_connect(morphism, alpha, alpha_prime, beta)

    def verify(self, morphism: InftyMorphism, certificate: TransferCertificate) -> VerificationReport:
        return verify_certificate(morphism, certificate)

    def is_ready(self) -> bool:
        return True


# Global Goldman–Millson service instance
_gm_service = None


def get_gm_service() -> GoldmanMillsonService:
    """Get or create the global Goldman–Millson service instance."""
    global _gm_service
    if _gm_service is None:
        _gm_service = GoldmanMillsonService()
    return _gm_service
