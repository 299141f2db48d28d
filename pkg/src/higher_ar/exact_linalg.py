"""Exact dense linear algebra over the rationals and the integers.

A :class:`Matrix` stores an integer numerator array together with one
positive common denominator.  Numerators live in ``int64`` while they fit and
silently move to Python integers when they do not, so every operation is
exact.  Scalars are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._kernels import INT64_SAFE


class Singular(ArithmeticError):
    """Raised when a matrix that must be invertible is not."""


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    raise TypeError(f"cannot use {x!r} as an exact rational")


def _shrink(num: np.ndarray) -> np.ndarray:
    if num.dtype == object and num.size and _kernels._max_abs(num) < INT64_SAFE:
        return num.astype(np.int64)
    if num.dtype != object and num.dtype != np.int64:
        return num.astype(np.int64)
    return num


class Matrix:
    """Immutable rational matrix ``num / den``."""

    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: int = 1):
        num = np.asarray(num)
        if num.ndim != 2:
            raise ValueError("Matrix needs a 2-d numerator array")
        if den <= 0:
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            num, den = -num, -den
        den = int(den)
        if den != 1 and num.size:
            g = math.gcd(int(np.gcd.reduce(num.ravel())), den)
            if g > 1:
                num = num // g
                den //= g
        elif den != 1:
            den = 1
        self.num = _shrink(num)
        self.den = den
        self.num.setflags(write=False)

    # -- construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [[_to_fraction(x) for x in row] for row in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        den = 1
        for row in rows:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
        num = np.empty((len(rows), ncols), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                num[i, j] = x.numerator * (den // x.denominator)
        return cls(num, den)

    @classmethod
    def from_int(cls, array) -> "Matrix":
        arr = np.asarray(array)
        if arr.dtype != object:
            arr = arr.astype(np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return cls(arr, 1)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n, dtype=np.int64))

    # -- basic protocol -----------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    @property
    def rows(self) -> int:
        return self.num.shape[0]

    @property
    def cols(self) -> int:
        return self.num.shape[1]

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()!r})"

    def __getitem__(self, key):
        if isinstance(key, tuple) and len(key) == 2 and all(
            isinstance(k, (int, np.integer)) for k in key
        ):
            return Fraction(int(self.num[key]), self.den)
        if not isinstance(key, tuple):
            key = (key, slice(None))
        r, c = key
        if isinstance(r, (int, np.integer)):
            r = [r]
        if isinstance(c, (int, np.integer)):
            c = [c]
        sub = self.num[r][:, c]
        return Matrix(np.array(sub), self.den)

    def tolist(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.den) for x in row] for row in self.num]

    def to_strings(self) -> list[list[str]]:
        return [[_fmt(Fraction(int(x), self.den)) for x in row] for row in self.num]

    def is_integral(self) -> bool:
        return self.den == 1

    def to_int_array(self) -> np.ndarray:
        if self.den != 1:
            raise ValueError("matrix is not integral")
        return self.num.copy()

    def is_zero(self) -> bool:
        return not np.any(self.num)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.den == other.den
            and bool(np.all(self.num == other.num))
        )

    def __hash__(self):
        return hash((self.shape, self.den, tuple(int(x) for x in self.num.ravel())))

    # -- arithmetic ---------------------------------------------------------
    @property
    def T(self) -> "Matrix":
        return Matrix(self.num.T.copy(), self.den)

    def __neg__(self) -> "Matrix":
        return Matrix(-self.num, self.den)

    def _aligned(self, other: "Matrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        den = self.den * other.den // math.gcd(self.den, other.den)
        a = _scale(self.num, den // self.den)
        b = _scale(other.num, den // other.den)
        return a, b, den

    def __add__(self, other: "Matrix") -> "Matrix":
        a, b, den = self._aligned(other)
        return Matrix(_safe_add(a, b), den)

    def __sub__(self, other: "Matrix") -> "Matrix":
        a, b, den = self._aligned(other)
        return Matrix(_safe_add(a, -b if b.dtype == object else _safe_neg(b)), den)

    def scale(self, c) -> "Matrix":
        c = _to_fraction(c)
        return Matrix(_scale(self.num, c.numerator), self.den * c.denominator)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix(_kernels.matmul_int(self.num, other.num), self.den * other.den)

    # -- assembly -----------------------------------------------------------
    @staticmethod
    def hstack(mats: Sequence["Matrix"], rows: int | None = None) -> "Matrix":
        mats = list(mats)
        if not mats:
            return Matrix.zeros(rows or 0, 0)
        den = _lcm_all(m.den for m in mats)
        parts = [_scale(m.num, den // m.den) for m in mats]
        return Matrix(_concat(parts, axis=1), den)

    @staticmethod
    def vstack(mats: Sequence["Matrix"], cols: int | None = None) -> "Matrix":
        mats = list(mats)
        if not mats:
            return Matrix.zeros(0, cols or 0)
        den = _lcm_all(m.den for m in mats)
        parts = [_scale(m.num, den // m.den) for m in mats]
        return Matrix(_concat(parts, axis=0), den)

    @staticmethod
    def block(grid: Sequence[Sequence["Matrix"]]) -> "Matrix":
        return Matrix.vstack([Matrix.hstack(row) for row in grid])

    @staticmethod
    def block_diag(mats: Sequence["Matrix"]) -> "Matrix":
        mats = list(mats)
        R = sum(m.rows for m in mats)
        C = sum(m.cols for m in mats)
        den = _lcm_all([m.den for m in mats] or [1])
        dtype = object if any(m.num.dtype == object for m in mats) else np.int64
        out = np.zeros((R, C), dtype=dtype)
        r = c = 0
        for m in mats:
            out[r:r + m.rows, c:c + m.cols] = _scale(m.num, den // m.den)
            r += m.rows
            c += m.cols
        return Matrix(out, den)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _lcm_all(dens: Iterable[int]) -> int:
    out = 1
    for d in dens:
        out = out * d // math.gcd(out, d)
    return out


def _scale(num: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return num
    if num.dtype != object and _kernels._max_abs(num) * abs(k) < INT64_SAFE:
        return num * k
    return num.astype(object) * k


def _safe_neg(num: np.ndarray) -> np.ndarray:
    return -num


def _safe_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object and b.dtype != object:
        if _kernels._max_abs(a) + _kernels._max_abs(b) < INT64_SAFE:
            return a + b
    return a.astype(object) + b.astype(object)


def _concat(parts, axis):
    if any(p.dtype == object for p in parts):
        parts = [p.astype(object) for p in parts]
    return np.concatenate(parts, axis=axis)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _rref_raw(m: Matrix):
    """Integer Gauss-Jordan on the numerator: ``(R_int, pivots)``."""
    return _kernels.rref_int(m.num)


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the strictly increasing pivot columns."""
    R, pivots = _rref_raw(m)
    rank = len(pivots)
    if rank == 0:
        return Matrix.zeros(m.rows, m.cols), []
    pv = [int(R[k, c]) for k, c in enumerate(pivots)]
    den = _lcm_all(pv)
    body = R[:rank]
    mult = np.array([den // p for p in pv], dtype=object)
    if all(int(x) == 1 for x in mult):
        scaled = body
    else:
        scaled = body.astype(object) * mult[:, None]
    full = np.zeros((m.rows, m.cols), dtype=scaled.dtype)
    full[:rank] = scaled
    return Matrix(full, den), pivots


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_rref_raw(m)[1])


class Echelon:
    """Row space data of a matrix: pivots and normalized pivot rows.

    ``rows`` holds the nonzero rows of the rref as a Matrix of shape
    ``rank x cols``; ``free`` lists non-pivot columns.
    """

    __slots__ = ("rows", "pivots", "free", "ncols")

    def __init__(self, m: Matrix):
        self.ncols = m.cols
        if m.rows == 0 or m.cols == 0:
            self.pivots = []
            self.rows = Matrix.zeros(0, m.cols)
        else:
            R, pivots = rref(m)
            self.pivots = pivots
            self.rows = R[: len(pivots), :] if pivots else Matrix.zeros(0, m.cols)
        piv = set(self.pivots)
        self.free = [j for j in range(m.cols) if j not in piv]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce_columns(self, vectors: Matrix) -> Matrix:
        """Coordinates of column vectors modulo the row space, on ``free``.

        The quotient ``K^cols / rowspace`` has the standard vectors at the free
        columns as basis; a vector ``w`` reduces to
        ``w[free] - rows[:, free]^T w[pivots]``.
        """
        if not self.pivots:
            return vectors[self.free, :] if self.free else Matrix.zeros(0, vectors.cols)
        wf = vectors[self.free, :] if self.free else Matrix.zeros(0, vectors.cols)
        if not self.free:
            return wf
        wp = vectors[self.pivots, :]
        return wf - self.rows[:, self.free].T @ wp

    def kernel(self) -> Matrix:
        """Basis of ``{x : rows x = 0}`` as columns; identity on free coords."""
        n = self.ncols
        k = len(self.free)
        if k == 0:
            return Matrix.zeros(n, 0)
        if not self.pivots:
            return Matrix.identity(n)
        top = -self.rows[:, self.free]
        parts_num = np.zeros((n, k), dtype=object)
        den = top.den
        parts_num[self.pivots, :] = top.num.astype(object)
        for c, j in enumerate(self.free):
            parts_num[j, c] = den
        return Matrix(parts_num, den)

    def contains_columns(self, vectors: Matrix) -> bool:
        return self.reduce_columns(vectors).is_zero()


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning the null space of ``m``."""
    return Echelon(m).kernel()


def image_basis(m: Matrix) -> Matrix:
    """Columns (rref rows transposed) spanning the column space of ``m``."""
    return Echelon(m.T).rows.T


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """A particular solution ``x`` of ``a x = b`` or ``None``."""
    aug = Matrix.hstack([a, b])
    R, pivots = rref(aug)
    n = a.cols
    if any(p >= n for p in pivots):
        return None
    x_num = np.zeros((n, b.cols), dtype=object)
    for k, p in enumerate(pivots):
        x_num[p, :] = R.num[k, n:].astype(object)
    return Matrix(x_num, R.den)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("inverse needs a square matrix")
    n = m.rows
    if n == 0:
        return Matrix.zeros(0, 0)
    R, pivots = rref(Matrix.hstack([m, Matrix.identity(n)]))
    if pivots[:n] != list(range(n)):
        raise Singular(f"matrix has rank {len([p for p in pivots if p < n])} < {n}")
    return R[:, list(range(n, 2 * n))]


def det(m: Matrix) -> Fraction:
    """Determinant by fraction-free elimination (small matrices)."""
    if m.rows != m.cols:
        raise ValueError("determinant needs a square matrix")
    a = [[int(x) for x in row] for row in m.num]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    d = a[-1][-1] if n else 1
    return Fraction(sign * d, m.den ** n)


def kron(a: Matrix, b: Matrix) -> Matrix:
    num = np.kron(a.num.astype(object), b.num.astype(object))
    return Matrix(num, a.den * b.den)


def matrix_power(m: Matrix, k: int) -> Matrix:
    if k < 0:
        return matrix_power(inverse(m), -k)
    out = Matrix.identity(m.rows)
    base = m
    while k:
        if k & 1:
            out = out @ base
        base = base @ base
        k >>= 1
    return out


# ---------------------------------------------------------------------------
# integer matrices
# ---------------------------------------------------------------------------


def smith_normal_form(m) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Smith normal form of an integer matrix.

    Returns ``(d, U, V)`` with ``U m V = diag(d)`` (padded with zeros to the
    shape of ``m``), ``U`` and ``V`` unimodular, ``d[i] | d[i+1]`` and all
    ``d[i] >= 0``.  ``d`` lists the first ``min(rows, cols)`` diagonal entries.
    """
    A = [[int(x) for x in row] for row in (m.tolist() if hasattr(m, "tolist") else m)]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        A[dst] = [x - q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, q)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, q)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                     if A[i][j] % A[t][t]),
                    None,
                )
                if bad is not None:
                    i, _ = bad
                    A[t] = [x + y for x, y in zip(A[t], A[i])]
                    U[t] = [x + y for x, y in zip(U[t], U[i])]
                    done = False
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    d = [A[i][i] for i in range(min(rows, cols))]
    return d, U, V


def int_det(m) -> int:
    """Determinant of a square integer matrix."""
    return int(det(Matrix.from_rows(m)))
