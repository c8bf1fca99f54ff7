"""Exact dense linear algebra over prime fields F_p and the rationals.

Matrices are immutable, carry their field, and every operation is exact:
residues stay reduced mod p and rational entries are ``Fraction`` values in
lowest terms.  Row reduction uses a fixed deterministic pivot rule (first
nonzero entry in column order), so kernel bases, image bases and solutions
are reproducible across runs.

Zero-sized matrices (0 x n and n x 0) are legal; they are the unique maps
to and from the zero space and compose like any other matrix.

Prime-field arithmetic runs on int64 numpy buffers, which is exact for the
supported range (p < 2**20 at desk-scale dimensions).  Rational matrices
use pure ``Fraction`` arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

Scalar = Union[int, Fraction]

_PRIME_LIMIT = 1 << 20


class ExactLinError(Exception):
    """Base error for the linear algebra layer."""


class DimensionMismatch(ExactLinError):
    pass


class FieldMismatch(ExactLinError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: either a prime field F_p or the rationals Q."""

    kind: str  # "prime" | "rational"
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "prime":
            if self.p is None or not _is_prime(self.p):
                raise ExactLinError(f"not a prime: {self.p!r}")
            if self.p >= _PRIME_LIMIT:
                raise ExactLinError(f"prime too large for the int64 backend: {self.p}")
        elif self.kind == "rational":
            if self.p is not None:
                raise ExactLinError("rational field takes no modulus")
        else:
            raise ExactLinError(f"unknown field kind {self.kind!r}")

    @staticmethod
    def prime(p: int) -> "FieldSpec":
        return FieldSpec("prime", p)

    @staticmethod
    def rational() -> "FieldSpec":
        return FieldSpec("rational")

    @property
    def is_prime(self) -> bool:
        return self.kind == "prime"

    def coerce(self, value) -> Scalar:
        """Canonicalize a scalar: reduced residue in [0, p) or a Fraction."""
        if self.kind == "prime":
            if isinstance(value, Fraction):
                if value.denominator != 1:
                    num = value.numerator % self.p
                    den = value.denominator % self.p
                    if den == 0:
                        raise ExactLinError(f"denominator divisible by {self.p}")
                    return (num * pow(den, self.p - 2, self.p)) % self.p
                value = value.numerator
            return int(value) % self.p
        return Fraction(value)

    def zero(self) -> Scalar:
        return 0 if self.kind == "prime" else Fraction(0)

    def one(self) -> Scalar:
        return 1 if self.kind == "prime" else Fraction(1)

    def inv(self, value: Scalar) -> Scalar:
        if self.kind == "prime":
            v = int(value) % self.p
            if v == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(v, self.p - 2, self.p)
        if value == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / Fraction(value)

    def elements(self) -> Iterable[Scalar]:
        """All field elements; only available for prime fields."""
        if self.kind != "prime":
            raise ExactLinError("cannot enumerate the rationals")
        return range(self.p)

    def __repr__(self):
        return f"F_{self.p}" if self.kind == "prime" else "Q"


QQ = FieldSpec.rational()


def GF(p: int) -> FieldSpec:
    return FieldSpec.prime(p)


def _check_same_field(a: "Matrix", b: "Matrix"):
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")


class Matrix:
    """Immutable exact dense matrix over a fixed :class:`FieldSpec`.

    Entries are stored row-major: int64 numpy for prime fields, nested
    tuples of ``Fraction`` for the rationals.  All results of arithmetic
    are fully reduced.
    """

    __slots__ = ("field", "rows", "cols", "_data", "_hash", "_rref")

    def __init__(self, field: FieldSpec, rows: int, cols: int, data, _raw: bool = False):
        if rows < 0 or cols < 0:
            raise DimensionMismatch("negative dimensions")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_rref", None)
        if _raw:
            object.__setattr__(self, "_data", data)
            return
        if field.is_prime:
            arr = np.array(data, dtype=np.int64).reshape(rows, cols) % field.p
            arr.setflags(write=False)
            object.__setattr__(self, "_data", arr)
        else:
            grid = tuple(tuple(Fraction(v) for v in row) for row in data)
            if len(grid) != rows or any(len(r) != cols for r in grid):
                raise DimensionMismatch("ragged entry grid")
            object.__setattr__(self, "_data", grid)

    def __setattr__(self, *args):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rows(field: FieldSpec, rows: Sequence[Sequence]) -> "Matrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if field.is_prime:
            return Matrix(field, r, c, rows if r else np.zeros((0, 0)))
        return Matrix(field, r, c, rows)

    @staticmethod
    def zeros(field: FieldSpec, rows: int, cols: int) -> "Matrix":
        if field.is_prime:
            arr = np.zeros((rows, cols), dtype=np.int64)
            arr.setflags(write=False)
            return Matrix(field, rows, cols, arr, _raw=True)
        z = Fraction(0)
        return Matrix(field, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)), _raw=True)

    @staticmethod
    def identity(field: FieldSpec, n: int) -> "Matrix":
        if field.is_prime:
            arr = np.eye(n, dtype=np.int64)
            arr.setflags(write=False)
            return Matrix(field, n, n, arr, _raw=True)
        return Matrix(
            field, n, n,
            tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)),
            _raw=True,
        )

    @staticmethod
    def column(field: FieldSpec, entries: Sequence) -> "Matrix":
        return Matrix(field, len(entries), 1, [[v] for v in entries])

    @staticmethod
    def basis_column(field: FieldSpec, n: int, i: int) -> "Matrix":
        """The i-th standard basis vector of k^n, as an n x 1 matrix."""
        entries = [field.zero()] * n
        entries[i] = field.one()
        return Matrix.column(field, entries)

    @staticmethod
    def _from_np(field: FieldSpec, arr: np.ndarray) -> "Matrix":
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        return Matrix(field, arr.shape[0], arr.shape[1], arr, _raw=True)

    # -- inspection ---------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self):
        """Row-major tuple-of-row-tuples of canonical scalars."""
        if self.field.is_prime:
            return tuple(tuple(int(v) for v in row) for row in self._data)
        return self._data

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        if self.field.is_prime:
            return int(self._data[i, j])
        return self._data[i][j]

    def is_zero(self) -> bool:
        if self.field.is_prime:
            return not self._data.any()
        return all(v == 0 for row in self._data for v in row)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field or self.shape != other.shape:
            return False
        if self.field.is_prime:
            return bool(np.array_equal(self._data, other._data))
        return self._data == other._data

    def __hash__(self):
        if self._hash is None:
            if self.field.is_prime:
                h = hash((self.field, self.rows, self.cols, self._data.tobytes()))
            else:
                h = hash((self.field, self.rows, self.cols, self._data))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        if self.rows * self.cols > 64:
            return f"Matrix({self.field}, {self.rows}x{self.cols})"
        return f"Matrix({self.field}, {self.rows}x{self.cols}, {self.entries})"

    # -- arithmetic ----------------------------------------------------

    def __matmul__(self, other: "Matrix") -> "Matrix":
        _check_same_field(self, other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        if self.field.is_prime:
            return Matrix._from_np(self.field, (self._data @ other._data) % self.field.p)
        z = Fraction(0)
        out = []
        bt = other._data
        for row in self._data:
            out.append(tuple(
                sum((row[k] * bt[k][j] for k in range(self.cols)), z)
                for j in range(other.cols)
            ))
        return Matrix(self.field, self.rows, other.cols, tuple(out), _raw=True)

    def __add__(self, other: "Matrix") -> "Matrix":
        _check_same_field(self, other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        if self.field.is_prime:
            return Matrix._from_np(self.field, (self._data + other._data) % self.field.p)
        return Matrix(self.field, self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self._data, other._data)
        ), _raw=True)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        if self.field.is_prime:
            return Matrix._from_np(self.field, (-self._data) % self.field.p)
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(-v for v in row) for row in self._data), _raw=True)

    def scale(self, c) -> "Matrix":
        c = self.field.coerce(c)
        if self.field.is_prime:
            return Matrix._from_np(self.field, (self._data * c) % self.field.p)
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(c * v for v in row) for row in self._data), _raw=True)

    def transpose(self) -> "Matrix":
        if self.field.is_prime:
            return Matrix._from_np(self.field, self._data.T)
        return Matrix(self.field, self.cols, self.rows,
                      tuple(tuple(self._data[i][j] for i in range(self.rows))
                            for j in range(self.cols)), _raw=True)

    # -- block operations ----------------------------------------------

    def take_rows(self, indices: Sequence[int]) -> "Matrix":
        if self.field.is_prime:
            return Matrix._from_np(self.field, self._data[list(indices), :].reshape(len(indices), self.cols))
        return Matrix(self.field, len(indices), self.cols,
                      tuple(self._data[i] for i in indices), _raw=True)

    def take_cols(self, indices: Sequence[int]) -> "Matrix":
        if self.field.is_prime:
            return Matrix._from_np(self.field, self._data[:, list(indices)].reshape(self.rows, len(indices)))
        return Matrix(self.field, self.rows, len(indices),
                      tuple(tuple(row[j] for j in indices) for row in self._data), _raw=True)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        """Contiguous submatrix with rows [r0, r1) and columns [c0, c1)."""
        return self.take_rows(range(r0, r1)).take_cols(range(c0, c1))

    def col(self, j: int) -> "Matrix":
        return self.take_cols([j])

    # -- elimination ----------------------------------------------------

    def _compute_rref(self):
        if self.field.is_prime:
            R = self._data.copy()
            p = self.field.p
            m, n = R.shape
            pivots = []
            r = 0
            for c in range(n):
                if r == m:
                    break
                nz = np.nonzero(R[r:, c])[0]
                if nz.size == 0:
                    continue
                pr = r + int(nz[0])
                if pr != r:
                    R[[r, pr]] = R[[pr, r]]
                pv = int(R[r, c])
                if pv != 1:
                    R[r] = (R[r] * pow(pv, p - 2, p)) % p
                col = R[:, c].copy()
                col[r] = 0
                if col.any():
                    R = (R - np.outer(col, R[r])) % p
                pivots.append(c)
                r += 1
            return Matrix._from_np(self.field, R), tuple(pivots)
        rows = [list(row) for row in self._data]
        m, n = self.rows, self.cols
        pivots = []
        r = 0
        for c in range(n):
            if r == m:
                break
            pr = next((i for i in range(r, m) if rows[i][c] != 0), None)
            if pr is None:
                continue
            if pr != r:
                rows[r], rows[pr] = rows[pr], rows[r]
            pv = rows[r][c]
            if pv != 1:
                rows[r] = [v / pv for v in rows[r]]
            for i in range(m):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
        return Matrix(self.field, m, n, rows), tuple(pivots)

    def rref(self):
        """Reduced row echelon form and its pivot columns (cached)."""
        if self._rref is None:
            object.__setattr__(self, "_rref", self._compute_rref())
        return self._rref

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> "Matrix":
        """Columns form the canonical basis of the kernel.

        Shape is cols x (cols - rank); the basis assigns 1 to each free
        column in increasing order and back-fills the pivot coordinates.
        """
        R, pivots = self.rref()
        pivset = set(pivots)
        free = [c for c in range(self.cols) if c not in pivset]
        k = len(free)
        if self.field.is_prime:
            K = np.zeros((self.cols, k), dtype=np.int64)
            for idx, f in enumerate(free):
                K[f, idx] = 1
                for t, pc in enumerate(pivots):
                    K[pc, idx] = (-R._data[t, f]) % self.field.p
            return Matrix._from_np(self.field, K)
        K = [[Fraction(0)] * k for _ in range(self.cols)]
        for idx, f in enumerate(free):
            K[f][idx] = Fraction(1)
            for t, pc in enumerate(pivots):
                K[pc][idx] = -R._data[t][f]
        return Matrix(self.field, self.cols, k, K)

    def image_basis(self) -> "Matrix":
        """Original columns at the pivot positions: a basis of the column space."""
        return self.take_cols(self.rref()[1])

    def solve(self, b: "Matrix") -> Optional["Matrix"]:
        """Exact solution x of self @ x = b, or None when none exists.

        Free variables are set to zero, so the result is deterministic.
        ``b`` may have several columns; all are solved simultaneously.
        """
        _check_same_field(self, b)
        if self.rows != b.rows:
            raise DimensionMismatch(f"solve: {self.shape} vs {b.shape}")
        aug = hstack([self, b])
        R, pivots = aug.rref()
        if any(pc >= self.cols for pc in pivots):
            return None
        if self.field.is_prime:
            x = np.zeros((self.cols, b.cols), dtype=np.int64)
            for t, pc in enumerate(pivots):
                x[pc, :] = R._data[t, self.cols:]
            return Matrix._from_np(self.field, x)
        x = [[Fraction(0)] * b.cols for _ in range(self.cols)]
        for t, pc in enumerate(pivots):
            x[pc] = list(R._data[t][self.cols:])
        return Matrix(self.field, self.cols, b.cols, x)

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        x = self.solve(Matrix.identity(self.field, self.rows))
        if x is None or self.rank() != self.rows:
            raise ExactLinError("matrix is singular")
        return x


# -- free functions ------------------------------------------------------


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return a @ b


def hstack(mats: Sequence[Matrix]) -> Matrix:
    if not mats:
        raise ExactLinError("hstack of nothing")
    field = mats[0].field
    rows = mats[0].rows
    for m in mats[1:]:
        _check_same_field(mats[0], m)
        if m.rows != rows:
            raise DimensionMismatch("hstack: row counts differ")
    if field.is_prime:
        return Matrix._from_np(field, np.concatenate([m._data for m in mats], axis=1))
    return Matrix(field, rows, sum(m.cols for m in mats),
                  tuple(tuple(v for m in mats for v in m._data[i]) for i in range(rows)), _raw=True)


def vstack(mats: Sequence[Matrix]) -> Matrix:
    if not mats:
        raise ExactLinError("vstack of nothing")
    field = mats[0].field
    cols = mats[0].cols
    for m in mats[1:]:
        _check_same_field(mats[0], m)
        if m.cols != cols:
            raise DimensionMismatch("vstack: column counts differ")
    if field.is_prime:
        return Matrix._from_np(field, np.concatenate([m._data for m in mats], axis=0))
    return Matrix(field, sum(m.rows for m in mats), cols,
                  tuple(row for m in mats for row in m._data), _raw=True)


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    """Block diagonal sum a (+) b."""
    _check_same_field(a, b)
    top = hstack([a, Matrix.zeros(a.field, a.rows, b.cols)])
    bot = hstack([Matrix.zeros(a.field, b.rows, a.cols), b])
    return vstack([top, bot])


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product with the left factor index major.

    Basis order of the target is (i_a, i_b) lexicographic, i.e. the entry
    at (i_a * b.rows + i_b, j_a * b.cols + j_b) is a[i_a, j_a] * b[i_b, j_b].
    """
    _check_same_field(a, b)
    if a.field.is_prime:
        return Matrix._from_np(a.field, np.kron(a._data, b._data) % a.field.p)
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    out = [[Fraction(0)] * cols for _ in range(rows)]
    for ia in range(a.rows):
        for ja in range(a.cols):
            v = a._data[ia][ja]
            if v == 0:
                continue
            for ib in range(b.rows):
                for jb in range(b.cols):
                    out[ia * b.rows + ib][ja * b.cols + jb] = v * b._data[ib][jb]
    return Matrix(a.field, rows, cols, out)


def is_exact_pair(f: Matrix, g: Matrix) -> bool:
    """True iff im(f) = ker(g), for composable matrices f then g.

    Decided exactly: the composite g @ f must vanish and rank(f) must equal
    dim ker(g) = g.cols - rank(g).
    """
    if g.cols != f.rows:
        raise DimensionMismatch(f"not composable: {f.shape} then {g.shape}")
    _check_same_field(f, g)
    if not (g @ f).is_zero():
        return False
    return f.rank() == g.cols - g.rank()


def quotient_maps(relations: Matrix):
    """Projection and section for the quotient of k^n by a column span.

    Given a matrix whose columns span a subspace W of k^n (n = rows), this
    returns (proj, sect) with proj of shape q x n, sect of shape n x q and
    q = n - dim W, such that proj @ sect = I, proj @ relations = 0, and the
    quotient basis is the set of non-pivot coordinates of the deterministic
    row reduction of W.  All choices are reproducible.
    """
    field = relations.field
    n = relations.rows
    R, pivots = relations.transpose().rref()
    pivset = set(pivots)
    free_coords = [c for c in range(n) if c not in pivset]
    q = len(free_coords)
    proj = Matrix.from_rows(
        field,
        [[field.one() if c == fc else field.zero() for c in range(n)] for fc in free_coords],
    ) if q else Matrix.zeros(field, 0, n)
    if pivots:
        sel = Matrix.from_rows(
            field,
            [[field.one() if c == pc else field.zero() for c in range(n)] for pc in pivots],
        )
        red = Matrix.identity(field, n) - (R.take_rows(range(len(pivots))).transpose() @ sel)
        proj = proj @ red
    sect = Matrix.from_rows(
        field,
        [[field.one() if free_coords[j] == i else field.zero() for j in range(q)] for i in range(n)],
    ) if q else Matrix.zeros(field, n, 0)
    if not (proj @ relations).is_zero():
        raise ExactLinError("internal: projection does not kill the relation span")
    if proj @ sect != Matrix.identity(field, q):
        raise ExactLinError("internal: section does not split the projection")
    return proj, sect


def vec(m: Matrix) -> Matrix:
    """Column-major vectorization, as a (rows*cols) x 1 matrix."""
    if m.field.is_prime:
        return Matrix._from_np(m.field, m._data.T.reshape(-1, 1))
    out = [[m._data[i][j]] for j in range(m.cols) for i in range(m.rows)]
    return Matrix(m.field, m.rows * m.cols, 1, out)


def unvec(field: FieldSpec, column: Matrix, rows: int, cols: int) -> Matrix:
    """Inverse of :func:`vec` for a single column."""
    if column.rows != rows * cols or column.cols != 1:
        raise DimensionMismatch("unvec: wrong length")
    if field.is_prime:
        return Matrix._from_np(field, column._data.reshape(cols, rows).T)
    grid = [[column._data[j * rows + i][0] for j in range(cols)] for i in range(rows)]
    return Matrix(field, rows, cols, grid)
