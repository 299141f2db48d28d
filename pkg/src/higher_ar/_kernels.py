"""Hot integer kernels behind the exact linear algebra.

Every kernel exists twice: a numba ``@njit`` version working on ``int64``
arrays with an explicit overflow guard, and a pure-numpy version working on
object arrays of Python integers.  The numba path is used when numba imports
and ``HIGHER_AR_BACKEND`` is not ``numpy``; when a numba kernel reports an
overflow the caller reruns the same computation on the numpy path, so results
never depend on the backend.
"""

from __future__ import annotations

import os

import numpy as np

INT64_SAFE = 1 << 62
_FLOAT_LIMIT = float(1 << 62)

try:  # pragma: no cover - exercised implicitly
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def backend() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    choice = os.environ.get("HIGHER_AR_BACKEND", "").strip().lower()
    if choice == "numpy" or not _HAVE_NUMBA:
        return "numpy"
    return "numba"


# ---------------------------------------------------------------------------
# numpy (object) implementations
# ---------------------------------------------------------------------------


def _primitive_rows_np(A: np.ndarray, rows: np.ndarray) -> None:
    if len(rows) == 0:
        return
    g = np.gcd.reduce(A[rows], axis=1)
    g[g == 0] = 1
    mask = g != 1
    if np.any(mask):
        sel = rows[mask]
        A[sel] = A[sel] // g[mask][:, None]


def rref_int_np(A: np.ndarray):
    """Gauss-Jordan elimination of an integer matrix, in place.

    Returns ``(A, pivots)``.  Rows ``0..rank-1`` of ``A`` are the pivot rows;
    each is primitive with a positive pivot, and every other row is zero in
    the pivot columns.  ``A`` must be an object array of Python ints.
    """
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        col = A[r:, c]
        nz = np.flatnonzero(col != 0)
        if len(nz) == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        if A[r, c] < 0:
            A[r] = -A[r]
        _primitive_rows_np(A, np.array([r]))
        pv = A[r, c]
        others = np.flatnonzero(A[:, c] != 0)
        others = others[others != r]
        if len(others):
            a = A[others, c]
            g = np.gcd(a, pv)
            s = pv // g
            t = a // g
            A[others] = A[others] * s[:, None] - t[:, None] * A[r][None, :]
            scaled = others[s != 1]
            _primitive_rows_np(A, scaled)
        pivots.append(c)
        r += 1
    return A, pivots


def matmul_np(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A.astype(object) @ B.astype(object)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _gcd(a, b):
        if a < 0:
            a = -a
        if b < 0:
            b = -b
        while b:
            a, b = b, a % b
        return a

    @numba.njit(cache=True)
    def _row_maxabs(A, i):
        m = 0
        for j in range(A.shape[1]):
            v = A[i, j]
            if v < 0:
                v = -v
            if v > m:
                m = v
        return m

    @numba.njit(cache=True)
    def _make_primitive(A, i):
        g = 0
        for j in range(A.shape[1]):
            if A[i, j] != 0:
                g = _gcd(g, A[i, j])
                if g == 1:
                    return
        if g > 1:
            for j in range(A.shape[1]):
                A[i, j] //= g

    @numba.njit(cache=True)
    def rref_int_nb(A):
        """int64 twin of :func:`rref_int_np`.

        Returns ``(pivots, rank, ok)``; ``ok`` is False when an entry could
        leave the safe int64 range, in which case ``A`` is garbage.
        """
        nrows, ncols = A.shape
        pivots = np.empty(min(nrows, ncols), dtype=np.int64)
        maxabs = np.empty(nrows, dtype=np.int64)
        for i in range(nrows):
            maxabs[i] = _row_maxabs(A, i)
        nzcols = np.empty(ncols, dtype=np.int64)
        r = 0
        for c in range(ncols):
            if r >= nrows:
                break
            p = -1
            for i in range(r, nrows):
                if A[i, c] != 0:
                    p = i
                    break
            if p < 0:
                continue
            if p != r:
                for j in range(ncols):
                    tmp = A[r, j]
                    A[r, j] = A[p, j]
                    A[p, j] = tmp
                tmp = maxabs[r]
                maxabs[r] = maxabs[p]
                maxabs[p] = tmp
            if A[r, c] < 0:
                for j in range(ncols):
                    A[r, j] = -A[r, j]
            _make_primitive(A, r)
            maxabs[r] = _row_maxabs(A, r)
            nnz = 0
            for j in range(c, ncols):
                if A[r, j] != 0:
                    nzcols[nnz] = j
                    nnz += 1
            pv = A[r, c]
            mr = float(maxabs[r])
            for i in range(nrows):
                if i == r:
                    continue
                a = A[i, c]
                if a == 0:
                    continue
                g = _gcd(pv, a)
                s = pv // g
                t = a // g
                at = t if t >= 0 else -t
                if float(s) * float(maxabs[i]) + float(at) * mr > _FLOAT_LIMIT:
                    return pivots[:r], r, False
                if s != 1:
                    for j in range(ncols):
                        A[i, j] *= s
                    for k in range(nnz):
                        j = nzcols[k]
                        A[i, j] -= t * A[r, j]
                    _make_primitive(A, i)
                    maxabs[i] = _row_maxabs(A, i)
                else:
                    m = maxabs[i]
                    for k in range(nnz):
                        j = nzcols[k]
                        v = A[i, j] - t * A[r, j]
                        A[i, j] = v
                        if v < 0:
                            v = -v
                        if v > m:
                            m = v
                    maxabs[i] = m
            pivots[r] = c
            r += 1
        return pivots[:r], r, True

    @numba.njit(cache=True)
    def matmul_nb(A, B):
        n, k = A.shape
        m = B.shape[1]
        out = np.zeros((n, m), dtype=np.int64)
        for i in range(n):
            for t in range(k):
                a = A[i, t]
                if a == 0:
                    continue
                for j in range(m):
                    out[i, j] += a * B[t, j]
        return out


def _max_abs(A: np.ndarray) -> int:
    if A.size == 0:
        return 0
    if A.dtype == object:
        return int(max(abs(int(A.max())), abs(int(A.min()))))
    return int(max(abs(int(A.max())), abs(int(A.min()))))


def as_int64(A: np.ndarray):
    """Return an int64 copy of ``A`` if every entry fits the safe range."""
    if A.dtype == np.int64:
        return A.copy()
    if _max_abs(A) < INT64_SAFE:
        return A.astype(np.int64)
    return None


def rref_int(A: np.ndarray):
    """Dispatch integer Gauss-Jordan to the active backend.

    ``A`` is not modified.  Returns ``(R, pivots)`` with ``R`` int64 or object.
    """
    if backend() == "numba" and A.size:
        work = as_int64(A)
        if work is not None:
            pivots, rank, ok = rref_int_nb(work)
            if ok:
                return work, [int(c) for c in pivots]
    work = A.astype(object)
    return rref_int_np(work)


def matmul_int(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact integer matrix product, choosing the cheapest safe route."""
    k = A.shape[1]
    if A.size == 0 or B.size == 0:
        dtype = object if (A.dtype == object or B.dtype == object) else np.int64
        return np.zeros((A.shape[0], B.shape[1]), dtype=dtype)
    bound = _max_abs(A) * _max_abs(B) * k
    if A.dtype != object and B.dtype != object:
        if bound < (1 << 53):
            prod = A.astype(np.float64) @ B.astype(np.float64)
            return np.rint(prod).astype(np.int64)
        if bound < INT64_SAFE:
            if backend() == "numba":
                return matmul_nb(A, B)
            return A @ B
    return matmul_np(A, B)
