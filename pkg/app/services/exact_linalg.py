"""
Exact rational linear algebra: matrices, solving, kernels and cohomology of
finite cochain complexes.

Scalars are ``fractions.Fraction`` everywhere; row reduction is delegated to
sympy's ``DomainMatrix`` over ``QQ`` and converted back at the boundary.
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from app.errors import ContractViolation, InputError

logger = logging.getLogger(__name__)

# A vector over a named basis: basis name -> nonzero coefficient
Vector = Dict[str, Fraction]


def parse_rational(value) -> Fraction:
    """
    Parse a rational from its document form.

    Args:
        value: "p/q" or "p" string, an int, or a Fraction

    Returns:
        The reduced Fraction

    Raises:
        InputError: If the value is not a valid rational
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"Invalid rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputError(f"Rationals must be strings like \"p/q\", got {value!r}")
    text = value.strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            if not den.strip().lstrip("+").isdigit():
                raise ValueError(text)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"Invalid rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Canonical string form: "p" when the denominator is 1, else "p/q"."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def clean(vector: Dict) -> Dict:
    """Drop zero coefficients."""
    return {k: c for k, c in vector.items() if c != 0}


class Matrix:
    """
    Sparse rational matrix.

    Entries are kept as a map (row, col) -> Fraction with no stored zeros.
    """

    def __init__(self, rows: int, cols: int, entries: Optional[Dict[Tuple[int, int], Fraction]] = None):
        if rows < 0 or cols < 0:
            raise InputError(f"Invalid matrix shape ({rows}, {cols})")
        self.rows = rows
        self.cols = cols
        self.entries: Dict[Tuple[int, int], Fraction] = {}
        for (r, c), value in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise InputError(f"Entry ({r}, {c}) outside a {rows}x{cols} matrix")
            value = Fraction(value)
            if value != 0:
                self.entries[(r, c)] = value

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else (cols or 0)
        entries = {}
        for r, row in enumerate(rows):
            if len(row) != n_cols:
                raise InputError("Ragged matrix rows")
            for c, value in enumerate(row):
                if value:
                    entries[(r, c)] = Fraction(value)
        return cls(n_rows, n_cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        entries = {}
        for c, column in enumerate(columns):
            if len(column) != rows:
                raise InputError("Column length does not match row count")
            for r, value in enumerate(column):
                if value:
                    entries[(r, c)] = Fraction(value)
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble a block matrix; blocks in one row share a height, in one column a width."""
        heights = [row[0].rows for row in blocks]
        widths = [m.cols for m in blocks[0]] if blocks else []
        entries = {}
        top = 0
        for row, height in zip(blocks, heights):
            if len(row) != len(widths) or any(m.rows != height for m in row):
                raise InputError("Block rows do not line up")
            left = 0
            for m, width in zip(row, widths):
                if m.cols != width:
                    raise InputError("Block columns do not line up")
                for (r, c), value in m.entries.items():
                    entries[(top + r, left + c)] = value
                left += width
            top += height
        return cls(sum(heights), sum(widths), entries)

    def get(self, r: int, c: int) -> Fraction:
        return self.entries.get((r, c), Fraction(0))

    def to_rows(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), value in self.entries.items():
            out[r][c] = value
        return out

    def column(self, c: int) -> List[Fraction]:
        out = [Fraction(0)] * self.rows
        for (r, cc), value in self.entries.items():
            if cc == c:
                out[r] = value
        return out

    def apply(self, vector: Sequence) -> List[Fraction]:
        if len(vector) != self.cols:
            raise InputError(f"Vector of length {len(vector)} applied to a {self.rows}x{self.cols} matrix")
        out = [Fraction(0)] * self.rows
        for (r, c), value in self.entries.items():
            if vector[c]:
                out[r] += value * vector[c]
        return out

    def hstack(self, other: "Matrix") -> "Matrix":
        if other.rows != self.rows:
            raise InputError("hstack of matrices with different row counts")
        entries = dict(self.entries)
        for (r, c), value in other.entries.items():
            entries[(r, c + self.cols)] = value
        return Matrix(self.rows, self.cols + other.cols, entries)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise InputError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), value in other.entries.items():
            by_row.setdefault(r, []).append((c, value))
        entries: Dict[Tuple[int, int], Fraction] = {}
        for (r, k), a in self.entries.items():
            for c, b in by_row.get(k, ()):
                entries[(r, c)] = entries.get((r, c), Fraction(0)) + a * b
        return Matrix(self.rows, other.cols, entries)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("Matrix shapes differ")
        entries = dict(self.entries)
        for key, value in other.entries.items():
            entries[key] = entries.get(key, Fraction(0)) + value
        return Matrix(self.rows, self.cols, entries)

    def scaled(self, factor: Fraction) -> "Matrix":
        return Matrix(self.rows, self.cols, {k: v * factor for k, v in self.entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _to_domain_matrix(matrix: Matrix) -> DomainMatrix:
    rows: Dict[int, Dict[int, object]] = {}
    for (r, c), value in matrix.entries.items():
        rows.setdefault(r, {})[c] = QQ(value.numerator, value.denominator)
    return DomainMatrix(rows, (matrix.rows, matrix.cols), QQ)


def _from_domain_element(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def rref(matrix: Matrix) -> Tuple[List[List[Fraction]], Tuple[int, ...]]:
    """
    Reduced row echelon form.

    Pivots are chosen column by column from the left, so the result depends
    only on the basis order.

    Returns:
        (nonzero rows of the reduced matrix, pivot column indices)
    """
    if matrix.rows == 0 or matrix.cols == 0 or not matrix.entries:
        return [], ()
    reduced, pivots = _to_domain_matrix(matrix).rref()
    pivots = tuple(int(p) for p in pivots)
    rows = [[_from_domain_element(x) for x in row] for row in reduced.to_list()[:len(pivots)]]
    return rows, pivots


def rank(matrix: Matrix) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix: Matrix) -> List[List[Fraction]]:
    """
    Basis of the kernel, one vector per free column in increasing order.
    """
    rows, pivots = rref(matrix)
    free = [c for c in range(matrix.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * matrix.cols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve_linear(matrix: Matrix, b: Sequence) -> Optional[List[Fraction]]:
    """
    Solve M x = b exactly.

    Free variables are set to zero, so a zero right-hand side always gives the
    zero solution and the answer is deterministic.

    Args:
        matrix: Coefficient matrix
        b: Right-hand side, one entry per row

    Returns:
        A solution vector, or None when the system is inconsistent

    Raises:
        InputError: If len(b) does not match the row count
    """
    if len(b) != matrix.rows:
        raise InputError(f"Right-hand side of length {len(b)} for a matrix with {matrix.rows} rows")
    rhs = Matrix.from_columns([[Fraction(x) for x in b]], matrix.rows)
    rows, pivots = rref(matrix.hstack(rhs))
    if matrix.cols in pivots:
        return None
    x = [Fraction(0)] * matrix.cols
    for row, p in zip(rows, pivots):
        x[p] = row[matrix.cols]
    return x


def independent_modulo(span: Sequence[Sequence], candidates: Sequence[Sequence], length: int) -> List[int]:
    """
    Indices of candidates forming a basis of (span + candidates) / span.

    The first candidate that is independent of everything before it wins.
    """
    columns = [list(v) for v in span] + [list(v) for v in candidates]
    if not columns:
        return []
    _, pivots = rref(Matrix.from_columns(columns, length))
    return [p - len(span) for p in pivots if p >= len(span)]


class CochainComplex:
    """
    Finite cochain complex over named basis symbols.

    The differential maps each basis name to a vector of degree one higher.
    A degree window [d_min, d_max] bounds the degrees that may be queried.
    """

    def __init__(self, basis: Dict[int, List[str]], differential: Dict[str, Vector],
                 window: Optional[Tuple[int, int]] = None):
        self.basis: Dict[int, List[str]] = {d: list(names) for d, names in basis.items() if names}
        self.degree_of: Dict[str, int] = {}
        for d, names in self.basis.items():
            for name in names:
                if name in self.degree_of:
                    raise InputError(f"Basis name '{name}' declared twice")
                self.degree_of[name] = d
        self.differential: Dict[str, Vector] = {}
        for name, image in differential.items():
            if name not in self.degree_of:
                raise InputError(f"Differential given for unknown basis name '{name}'")
            image = clean(image)
            for target in image:
                if target not in self.degree_of:
                    raise InputError(f"Differential of '{name}' uses unknown basis name '{target}'")
                if self.degree_of[target] != self.degree_of[name] + 1:
                    raise InputError(f"Differential of '{name}' does not raise degree by one ('{target}')")
            if image:
                self.differential[name] = image
        if window is None:
            degrees = list(self.basis) or [0]
            window = (min(degrees) - 1, max(degrees) + 1)
        self.window = window
        self._index: Dict[str, int] = {}
        for names in self.basis.values():
            for i, name in enumerate(names):
                self._index[name] = i

    def names_in(self, degree: int) -> List[str]:
        return self.basis.get(degree, [])

    def apply(self, vector: Vector) -> Vector:
        """∂ of a vector."""
        out: Vector = {}
        for name, c in vector.items():
            for target, d in self.differential.get(name, {}).items():
                out[target] = out.get(target, Fraction(0)) + c * d
        return clean(out)

    def square_violations(self) -> Dict[str, Vector]:
        """Basis names v with ∂∂v ≠ 0, mapped to the residual."""
        out = {}
        for name in self.degree_of:
            residual = self.apply(self.apply({name: Fraction(1)}))
            if residual:
                out[name] = residual
        return out

    def validate(self) -> None:
        violations = self.square_violations()
        if violations:
            first = sorted(violations)[0]
            raise InputError(f"∂∂ ≠ 0 on basis symbol '{first}'")

    def _check_window(self, degree: int) -> None:
        low, high = self.window
        if not (low <= degree - 1 and degree + 1 <= high):
            raise InputError(f"Degree {degree} is outside the complex window [{low}, {high}]")

    def differential_matrix(self, degree: int) -> Matrix:
        """Matrix of ∂ from degree to degree+1 in basis order."""
        source = self.names_in(degree)
        target = self.names_in(degree + 1)
        entries = {}
        for j, name in enumerate(source):
            for t, c in self.differential.get(name, {}).items():
                entries[(self._index[t], j)] = c
        return Matrix(len(target), len(source), entries)

    def to_column(self, vector: Vector, degree: int) -> List[Fraction]:
        names = self.names_in(degree)
        column = [Fraction(0)] * len(names)
        for name, c in vector.items():
            if self.degree_of.get(name) != degree:
                raise InputError(f"'{name}' is not a basis symbol of degree {degree}")
            column[self._index[name]] = c
        return column

    def to_vector(self, column: Sequence, degree: int) -> Vector:
        return clean({name: Fraction(c) for name, c in zip(self.names_in(degree), column)})

    def homogeneous_degree(self, vector: Vector) -> Optional[int]:
        degrees = {self.degree_of.get(name) for name in vector}
        if None in degrees:
            unknown = [n for n in vector if n not in self.degree_of]
            raise InputError(f"Unknown basis names {unknown}")
        if len(degrees) > 1:
            raise InputError(f"Vector is not homogeneous (degrees {sorted(degrees)})")
        return degrees.pop() if degrees else None


class CohomologyDecision:
    """
    Basis of H^d together with a decision procedure for classes.

    Representatives are chosen among kernel vectors by the first-independent
    rule, so they depend only on the basis order.
    """

    def __init__(self, complex_: CochainComplex, degree: int):
        self.complex = complex_
        self.degree = degree
        size = len(complex_.names_in(degree))
        self._size = size
        self._outgoing = complex_.differential_matrix(degree)
        incoming = complex_.differential_matrix(degree - 1)
        self._boundaries = [incoming.column(c) for c in range(incoming.cols)]
        self._incoming = incoming
        cocycles = nullspace(self._outgoing) if size else []
        chosen = independent_modulo(self._boundaries, cocycles, size)
        self._representatives = [cocycles[i] for i in chosen]
        self.representatives: List[Vector] = [complex_.to_vector(v, degree) for v in self._representatives]

    @property
    def dimension(self) -> int:
        return len(self._representatives)

    def is_cocycle(self, z: Vector) -> bool:
        return not any(self._outgoing.apply(self.complex.to_column(z, self.degree)))

    def classify(self, z: Vector) -> List[Fraction]:
        """
        Coordinates of the class of z in the representative basis.

        Raises:
            ContractViolation: If z is not a cocycle
        """
        if not self.is_cocycle(z):
            raise ContractViolation(f"Element is not a cocycle in degree {self.degree}", residual=self.complex.apply(z))
        column = self.complex.to_column(z, self.degree)
        if not self._size:
            return []
        system = Matrix.from_columns(self._boundaries + self._representatives, self._size) \
            if (self._boundaries or self._representatives) else Matrix(self._size, 0)
        x = solve_linear(system, column)
        if x is None:
            raise ContractViolation("Cocycle not in the span of boundaries and representatives")
        return x[len(self._boundaries):]

    def is_exact(self, z: Vector) -> bool:
        return not any(self.classify(z))

    def primitive(self, z: Vector) -> Optional[Vector]:
        """A p with ∂p = z, or None when the class of z is nonzero."""
        if not self.is_exact(z):
            return None
        return primitive(self.complex, z)


def cohomology_basis(complex_: CochainComplex, degree: int) -> CohomologyDecision:
    """
    Cohomology of a cochain complex in one degree.

    Args:
        complex_: The complex
        degree: Degree d; d-1, d and d+1 must lie inside the complex window

    Returns:
        A CohomologyDecision whose representatives span H^d

    Raises:
        InputError: If the degree is outside the window
    """
    complex_._check_window(degree)
    decision = CohomologyDecision(complex_, degree)
    logger.debug(f"H^{degree} has dimension {decision.dimension}")
    return decision


def primitive(complex_: CochainComplex, z: Vector) -> Optional[Vector]:
    """
    Solve ∂p = z for a homogeneous z.

    Returns:
        p (the zero vector for z = 0), or None when z is not exact
    """
    z = clean(z)
    degree = complex_.homogeneous_degree(z)
    if degree is None:
        return {}
    matrix = complex_.differential_matrix(degree - 1)
    x = solve_linear(matrix, complex_.to_column(z, degree))
    if x is None:
        return None
    return complex_.to_vector(x, degree - 1)
