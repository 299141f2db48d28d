"""Modules over bound quiver algebras: Hom, Ext, duality and higher AR translations.

A left module ``X`` stores one vector space per vertex and, for each arrow
``a: u -> v``, the matrix of ``x -> a x`` from ``e_v X`` to ``e_u X`` (shape
``dims[u] x dims[v]``).  With paths composed left to right the path ``a.b``
then acts as ``X_a @ X_b``.

Every algebra carries its universal rational grading: arrow weights in
``Z^r`` making all relations homogeneous.  Modules built here remember a
weight for each basis vector, and all Hom complexes split into blocks by
degree.  Modules supplied without weights are handled as a single block.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exact_linalg import Echelon, Matrix, kron, rank, solve
from .quiver_core import AlgebraBasis, Path, compute_basis, opposite_algebra

GENERIC_CAP = 64

_LOCK = threading.RLock()


class CapExceeded(RuntimeError):
    """A resolution did not terminate within the allowed length."""


class AboveCap(RuntimeError):
    """Global dimension exceeds the requested cap."""


class RelationViolated(ValueError):
    """A representation does not satisfy a relation of its algebra."""


# ---------------------------------------------------------------------------
# grading
# ---------------------------------------------------------------------------


def _memo(b: AlgebraBasis, key, build):
    with _LOCK:
        if key not in b.cache:
            b.cache[key] = build()
        return b.cache[key]


def arrow_grading(b: AlgebraBasis) -> np.ndarray:
    """Integer arrow weights (one row per arrow) of the universal grading."""

    def build():
        q = b.quiver
        na = len(q.arrows)
        diffs = []
        for rel in b.presentation.relations:
            base = np.bincount(np.array(rel.terms[0][1].arrows), minlength=na)
            for _, p in rel.terms[1:]:
                diffs.append(np.bincount(np.array(p.arrows), minlength=na) - base)
        if na == 0:
            return np.zeros((0, 0), dtype=np.int64)
        if not diffs:
            return np.eye(na, dtype=np.int64)
        ker = Echelon(Matrix.from_int(np.array(diffs, dtype=np.int64))).kernel()
        cols = []
        for c in range(ker.cols):
            col = ker.num[:, c].astype(object)
            g = 0
            for x in col:
                g = math.gcd(g, int(x))
            cols.append([int(x) // g for x in col])
        if not cols:
            return np.zeros((na, 0), dtype=np.int64)
        return np.array(cols, dtype=np.int64).T

    return _memo(b, "grading", build)


def grading_rank(b: AlgebraBasis) -> int:
    return arrow_grading(b).shape[1]


def basis_weights(b: AlgebraBasis, i: int, j: int) -> np.ndarray:
    """Weights of the basis paths of ``e_i L e_j`` (one row per path)."""

    def build():
        g = arrow_grading(b)
        r = g.shape[1]
        paths = b.basis.get((i, j), [])
        out = np.zeros((len(paths), r), dtype=np.int64)
        for k, p in enumerate(paths):
            for a in p.arrows:
                out[k] += g[a]
        return out

    return _memo(b, ("bw", i, j), build)


def _keys(w: np.ndarray) -> list[tuple]:
    return [tuple(int(x) for x in row) for row in w]


def _group(keys: Sequence[tuple]) -> dict[tuple, np.ndarray]:
    out: dict[tuple, list[int]] = {}
    for idx, k in enumerate(keys):
        out.setdefault(k, []).append(idx)
    return {k: np.array(v, dtype=np.int64) for k, v in out.items()}


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


def _as_matrix(m, rows: int, cols: int) -> Matrix:
    if isinstance(m, Matrix):
        out = m
    else:
        arr = np.asarray(m, dtype=object)
        if arr.size == 0:
            out = Matrix.zeros(rows, cols)
        else:
            out = Matrix.from_rows(arr.tolist(), cols)
    if out.shape != (rows, cols):
        raise ValueError(f"matrix has shape {out.shape}, expected {(rows, cols)}")
    return out


class Representation:
    """A finite-dimensional left module over ``algebra``."""

    def __init__(self, algebra: AlgebraBasis, dims: Sequence[int], maps: Sequence,
                 weights: Sequence[np.ndarray] | None = None, check: bool = True):
        q = algebra.quiver
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != q.n_vertices:
            raise ValueError("one dimension per vertex expected")
        if len(maps) != len(q.arrows):
            raise ValueError("one matrix per arrow expected")
        self.maps = tuple(
            _as_matrix(m, self.dims[a.source], self.dims[a.target])
            for m, a in zip(maps, q.arrows)
        )
        if weights is None:
            self.weights = tuple(np.zeros((d, 0), dtype=np.int64) for d in self.dims)
        else:
            r_alg = grading_rank(algebra)
            ws = []
            for w, d in zip(weights, self.dims):
                w = np.asarray(w, dtype=np.int64)
                if w.ndim != 2:
                    w = w.reshape(d, -1) if d else w.reshape(0, r_alg)
                ws.append(w)
            self.weights = tuple(ws)
            widths = {w.shape[1] for w in self.weights}
            if len(widths) > 1:
                raise ValueError("inconsistent weight widths")
        self._paths: dict = {}
        self._elements: dict = {}
        self._blocks: dict = {}
        self._resolution = None
        self._tau_data = None
        if check:
            self.check_relations()

    # -- basic data ---------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.dims)

    @property
    def dimvec(self) -> tuple[int, ...]:
        return self.dims

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def graded(self) -> bool:
        r = self.weights[0].shape[1] if self.weights else 0
        return r > 0 and r == grading_rank(self.algebra)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __repr__(self) -> str:
        return f"Representation(dims={list(self.dims)})"

    def keys(self, v: int) -> list[tuple]:
        if not self.graded:
            return [()] * self.dims[v]
        return _keys(self.weights[v])

    def blocks(self, v: int) -> dict[tuple, np.ndarray]:
        if v not in self._blocks:
            self._blocks[v] = _group(self.keys(v))
        return self._blocks[v]

    def forget_grading(self) -> "Representation":
        return Representation(self.algebra, self.dims, self.maps, None, check=False)

    # -- action of the algebra ---------------------------------------------
    def path_matrix(self, p: Path) -> Matrix:
        key = (p.source, p.arrows)
        if key not in self._paths:
            if not p.arrows:
                out = Matrix.identity(self.dims[p.source])
            else:
                out = self.maps[p.arrows[0]]
                for a in p.arrows[1:]:
                    out = out @ self.maps[a]
            self._paths[key] = out
        return self._paths[key]

    def element_matrix(self, coeffs: dict[int, Fraction], i: int, j: int) -> Matrix:
        """Action of ``sum coeffs[k] basis[(i,j)][k]``, from ``e_j X`` to ``e_i X``."""
        key = (i, j, tuple(sorted(coeffs.items())))
        if key not in self._elements:
            paths = self.algebra.basis.get((i, j), [])
            out = Matrix.zeros(self.dims[i], self.dims[j])
            for k, c in sorted(coeffs.items()):
                if c:
                    m = self.path_matrix(paths[k])
                    out = out + (m if c == 1 else m.scale(c))
            self._elements[key] = out
        return self._elements[key]

    def check_relations(self) -> None:
        for rel in self.algebra.presentation.relations:
            acc = Matrix.zeros(self.dims[rel.source], self.dims[rel.target])
            for c, p in rel.terms:
                acc = acc + self.path_matrix(p).scale(c)
            if not acc.is_zero():
                q = self.algebra.quiver
                from .quiver_core import format_relation

                raise RelationViolated(f"relation {format_relation(q, rel)} fails")

    def is_homogeneous(self) -> bool:
        """Every arrow map shifts weights by its arrow weight."""
        if not self.graded:
            return True
        g = arrow_grading(self.algebra)
        for idx, a in enumerate(self.algebra.quiver.arrows):
            m = self.maps[idx]
            rows, cols = np.nonzero(m.num)
            if len(rows) == 0:
                continue
            lhs = self.weights[a.source][rows]
            rhs = self.weights[a.target][cols] + g[idx]
            if not np.array_equal(lhs, rhs):
                return False
        return True

    # -- output -------------------------------------------------------------
    def to_dict(self) -> dict:
        q = self.algebra.quiver
        return {
            "algebra": self.algebra.presentation.name,
            "dims": list(self.dims),
            "maps": {a.name: m.to_strings() for a, m in zip(q.arrows, self.maps)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, algebra: AlgebraBasis, data: dict) -> "Representation":
        q = algebra.quiver
        dims = data["dims"]
        maps = [
            [[Fraction(x) for x in row] for row in data["maps"][a.name]] for a in q.arrows
        ]
        return cls(algebra, dims, maps)


@dataclass
class ModuleMap:
    """A module homomorphism given by one matrix per vertex (shape ``dims_Y x dims_X``)."""

    source: Representation
    target: Representation
    blocks: tuple[Matrix, ...]

    def is_homomorphism(self) -> bool:
        X, Y = self.source, self.target
        for idx, a in enumerate(X.algebra.quiver.arrows):
            lhs = self.blocks[a.source] @ X.maps[idx]
            rhs = Y.maps[idx] @ self.blocks[a.target]
            if lhs != rhs:
                return False
        return True

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self`` after ``other``."""
        return ModuleMap(other.source, self.target,
                         tuple(f @ g for f, g in zip(self.blocks, other.blocks)))

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks)


def direct_sum(mods: Sequence[Representation]) -> Representation:
    b = mods[0].algebra
    q = b.quiver
    dims = [sum(m.dims[v] for m in mods) for v in range(q.n_vertices)]
    maps = [Matrix.block_diag([m.maps[i] for m in mods]) for i in range(len(q.arrows))]
    if all(m.graded for m in mods):
        weights = [np.vstack([m.weights[v] for m in mods]) for v in range(q.n_vertices)]
    else:
        weights = None
    return Representation(b, dims, maps, weights, check=False)


def zero_rep(b: AlgebraBasis) -> Representation:
    q = b.quiver
    r = grading_rank(b)
    return Representation(b, [0] * q.n_vertices,
                          [Matrix.zeros(0, 0) for _ in q.arrows],
                          [np.zeros((0, r), dtype=np.int64)] * q.n_vertices, check=False)


def _arrow_position(b: AlgebraBasis, a: int) -> int:
    arrow = b.quiver.arrows[a]
    exp = b.expand(Path(arrow.source, arrow.target, (a,)))
    (pos,) = exp.keys()
    return pos


def projective_rep(b: AlgebraBasis, v: int) -> Representation:
    """The indecomposable projective ``L e_v``; ``e_i L e_v`` sits at vertex ``i``."""

    def build():
        q = b.quiver
        dims = [b.dim(i, v) for i in range(q.n_vertices)]
        maps = [
            b.left_mult(_arrow_position(b, k), a.source, a.target, v)
            for k, a in enumerate(q.arrows)
        ]
        weights = [basis_weights(b, i, v) for i in range(q.n_vertices)]
        return Representation(b, dims, maps, weights, check=False)

    return _memo(b, ("proj", v), build)


def injective_rep(b: AlgebraBasis, v: int) -> Representation:
    """The indecomposable injective ``D(e_v L)``; ``D(e_v L e_i)`` sits at vertex ``i``."""

    def build():
        q = b.quiver
        dims = [b.dim(v, i) for i in range(q.n_vertices)]
        maps = [
            b.right_mult(_arrow_position(b, k), a.source, a.target, v).T
            for k, a in enumerate(q.arrows)
        ]
        weights = [-basis_weights(b, v, i) for i in range(q.n_vertices)]
        return Representation(b, dims, maps, weights, check=False)

    return _memo(b, ("inj", v), build)


def simple_rep(b: AlgebraBasis, v: int) -> Representation:
    def build():
        q = b.quiver
        dims = [1 if i == v else 0 for i in range(q.n_vertices)]
        maps = [Matrix.zeros(dims[a.source], dims[a.target]) for a in q.arrows]
        r = grading_rank(b)
        weights = [np.zeros((d, r), dtype=np.int64) for d in dims]
        return Representation(b, dims, maps, weights, check=False)

    return _memo(b, ("simple", v), build)


def opposite_basis(b: AlgebraBasis) -> AlgebraBasis:
    """Basis of the opposite algebra, cached so that taking it twice returns ``b``."""

    def build():
        bop = compute_basis(opposite_algebra(b.presentation), max(b.cutoff, 1))
        bop.cache["op"] = b
        return bop

    return _memo(b, "op", build)


def dual(X: Representation) -> Representation:
    """``D X = Hom_K(X, K)``, a module over the opposite algebra."""
    bop = opposite_basis(X.algebra)
    weights = [-w for w in X.weights] if X.graded else None
    return Representation(bop, X.dims, [m.T for m in X.maps], weights, check=False)


# ---------------------------------------------------------------------------
# Hom spaces by the intertwiner system
# ---------------------------------------------------------------------------


def _intertwiner_system(X: Representation, Y: Representation) -> tuple[Matrix, list[int]]:
    q = X.algebra.quiver
    sizes = [Y.dims[v] * X.dims[v] for v in range(q.n_vertices)]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    total = int(offsets[-1])
    rows = []
    for idx, a in enumerate(q.arrows):
        u, v = a.source, a.target
        nr = Y.dims[u] * X.dims[v]
        if nr == 0:
            continue
        blocks = [Matrix.zeros(nr, s) for s in sizes]
        # f_u X_a - Y_a f_v, with row-major vectorisation
        left = kron(Matrix.identity(Y.dims[u]), X.maps[idx].T)
        right = kron(Y.maps[idx], Matrix.identity(X.dims[v]))
        blocks[u] = blocks[u] + left
        blocks[v] = blocks[v] - right
        rows.append(Matrix.hstack(blocks, nr))
    if not rows:
        return Matrix.zeros(0, total), list(offsets)
    return Matrix.vstack(rows, total), list(offsets)


def hom_space(X: Representation, Y: Representation) -> list[ModuleMap]:
    """A basis of ``Hom(X, Y)``, solved directly from the intertwining equations."""
    system, offsets = _intertwiner_system(X, Y)
    ker = Echelon(system).kernel()
    out = []
    n = X.n_vertices
    for c in range(ker.cols):
        col = ker[:, [c]]
        blocks = []
        for v in range(n):
            seg = col[list(range(offsets[v], offsets[v + 1])), :]
            blocks.append(_unvec(seg, Y.dims[v], X.dims[v]))
        out.append(ModuleMap(X, Y, tuple(blocks)))
    return out


def _unvec(seg: Matrix, rows: int, cols: int) -> Matrix:
    if rows * cols == 0:
        return Matrix.zeros(rows, cols)
    return Matrix(np.asarray(seg.num).reshape(rows, cols), seg.den)


def hom_dim_direct(X: Representation, Y: Representation) -> int:
    system, offsets = _intertwiner_system(X, Y)
    return system.cols - rank(system)


# ---------------------------------------------------------------------------
# projective resolutions
# ---------------------------------------------------------------------------


@dataclass
class Resolution:
    """A minimal projective resolution, possibly truncated.

    ``terms[k]`` lists the vertices of the indecomposable summands of
    ``P_k`` and ``shifts[k]`` their generator weights.  ``diffs[k-1]`` maps
    ``P_k -> P_{k-1}`` as ``{(t, s): element of e_{j_t} L e_{j_s}}``: the
    generator of summand ``t`` goes to ``sum_s x_{t,s}``.  ``vertex_maps[k][i]``
    is the matrix of that map (or of the augmentation for ``k = 0``) at
    vertex ``i``.  ``generators[t]`` is the coordinate of ``e_{j_t} X`` hit by
    the generator of summand ``t`` of ``P_0``.
    """

    module: Representation
    terms: list[list[int]]
    shifts: list[np.ndarray]
    generators: list[int]
    diffs: list[dict]
    vertex_maps: list[list[Matrix]]
    complete: bool

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def multiplicities(self, k: int) -> list[int]:
        m = [0] * self.module.n_vertices
        if k < len(self.terms):
            for v in self.terms[k]:
                m[v] += 1
        return m

    def term(self, k: int) -> Representation:
        b = self.module.algebra
        if k >= len(self.terms) or not self.terms[k]:
            return zero_rep(b)
        return direct_sum([projective_rep(b, v) for v in self.terms[k]])

    def differential(self, k: int) -> ModuleMap:
        """``P_k -> P_{k-1}`` (``k >= 1``) or the augmentation ``P_0 -> X``."""
        src = self.term(k)
        tgt = self.module if k == 0 else self.term(k - 1)
        n = self.module.n_vertices
        if k < len(self.terms):
            blocks = tuple(self.vertex_maps[k][i] for i in range(n))
        else:
            blocks = tuple(Matrix.zeros(tgt.dims[i], 0) for i in range(n))
        return ModuleMap(src, tgt, blocks)

    def is_minimal(self) -> bool:
        """No differential has a component through an identity ``e_j``."""
        for k, d in enumerate(self.diffs, start=1):
            for (t, s), x in d.items():
                if self.terms[k][t] == self.terms[k - 1][s] and x.get(0, 0) != 0:
                    return False
        return True


def _sum_offsets(b: AlgebraBasis, vertices: Sequence[int], i: int) -> list[int]:
    off = [0]
    for j in vertices:
        off.append(off[-1] + b.dim(i, j))
    return off


def _top_generators(M: Representation) -> list[tuple[int, int]]:
    """Coordinates ``(v, index)`` whose unit vectors span a complement of ``rad M``."""
    b = M.algebra
    q = b.quiver
    gens = []
    for v in range(q.n_vertices):
        if M.dims[v] == 0:
            continue
        images = [M.maps[a] for a in q.out_arrows(v) if M.dims[q.arrows[a].target] > 0]
        if images:
            rad = Matrix.hstack(images, M.dims[v])
        else:
            rad = Matrix.zeros(M.dims[v], 0)
        for key, rows in sorted(M.blocks(v).items()):
            if rad.cols == 0:
                free = list(range(len(rows)))
            else:
                free = Echelon(rad[list(rows), :].T).free
            gens.extend((v, int(rows[f])) for f in free)
    return gens


def _assemble_columns(parts: list[tuple[int, Matrix]], nrows: int, ncols: int) -> Matrix:
    """Place column blocks ``(offset, Matrix)`` into one ``nrows x ncols`` matrix."""
    if ncols == 0 or nrows == 0:
        return Matrix.zeros(nrows, ncols)
    den = 1
    for _, m in parts:
        den = den * m.den // math.gcd(den, m.den)
    obj = any(m.num.dtype == object for _, m in parts) or den > (1 << 20)
    num = np.zeros((nrows, ncols), dtype=object if obj else np.int64)
    for off, m in parts:
        if m.cols:
            num[:, off:off + m.cols] = m.num * (den // m.den)
    return Matrix(num, den)


def _graded_kernel(A: Matrix, row_keys: list[tuple], col_keys: list[tuple]):
    """Kernel of a degree-preserving matrix, computed block by block.

    Returns ``(K, free, weights_keys)`` where ``K`` has columns spanning the
    kernel, ``K[free, :]`` is the identity and ``weights_keys`` gives the key
    of each kernel vector.
    """
    ncols = A.cols
    row_groups = _group(row_keys)
    col_groups = _group(col_keys)
    parts = []
    free_all: list[int] = []
    keys_out: list[tuple] = []
    for key, cols in sorted(col_groups.items()):
        rows = row_groups.get(key)
        if rows is None or A.rows == 0:
            sub_k = Matrix.identity(len(cols))
        else:
            sub_k = Echelon(A[list(rows), list(cols)]).kernel()
        if sub_k.cols == 0:
            continue
        parts.append((cols, sub_k))
        # kernel() puts the identity on the free coordinates of the block
        nz_free = [int(cols[j]) for j in _identity_rows(sub_k)]
        free_all.extend(nz_free)
        keys_out.extend([key] * sub_k.cols)
    total = sum(k.cols for _, k in parts)
    if total == 0:
        return Matrix.zeros(ncols, 0), [], []
    den = 1
    for _, k in parts:
        den = den * k.den // math.gcd(den, k.den)
    num = np.zeros((ncols, total), dtype=object)
    c0 = 0
    for cols, k in parts:
        num[np.ix_(cols, np.arange(c0, c0 + k.cols))] = k.num.astype(object) * (den // k.den)
        c0 += k.cols
    return Matrix(num, den), free_all, keys_out


def _identity_rows(k: Matrix) -> list[int]:
    """Rows of ``k`` forming the identity, in column order."""
    out = []
    num = k.num
    for c in range(k.cols):
        col = num[:, c]
        hits = np.flatnonzero(col == k.den)
        for r in hits:
            row = num[r]
            if np.count_nonzero(row) == 1:
                out.append(int(r))
                break
        else:  # pragma: no cover - kernel() always yields identity rows
            raise AssertionError("kernel basis lacks identity rows")
    return out


def _projective_sum_maps(b: AlgebraBasis, vertices: Sequence[int]) -> list[Matrix]:
    q = b.quiver
    out = []
    for k, a in enumerate(q.arrows):
        pos = _arrow_position(b, k)
        out.append(Matrix.block_diag([b.left_mult(pos, a.source, a.target, j) for j in vertices])
                   if vertices else Matrix.zeros(0, 0))
    return out


def _resolve(X: Representation, length: int) -> Resolution:
    """Minimal projective resolution up to and including ``P_length``."""
    b = X.algebra
    q = b.quiver
    nv = q.n_vertices
    graded = X.graded
    terms: list[list[int]] = []
    shifts: list[np.ndarray] = []
    diffs: list[dict] = []
    vmaps: list[list[Matrix]] = []
    generators: list[int] = []
    M = X
    emb: list[Matrix] | None = None
    prev_vertices: list[int] = []
    complete = False
    r = X.weights[0].shape[1] if graded else 0
    for k in range(length + 1):
        gens = _top_generators(M)
        if not gens:
            complete = True
            break
        verts = [v for v, _ in gens]
        sh = np.array([M.weights[v][c] for v, c in gens], dtype=np.int64).reshape(len(gens), r)
        if k == 0:
            generators = [c for _, c in gens]
        # cover at each vertex, in coordinates of M
        cov = []
        for i in range(nv):
            off = _sum_offsets(b, verts, i)
            parts = []
            for t, (v, c) in enumerate(gens):
                paths = b.basis.get((i, v), [])
                if not paths:
                    continue
                cols = [M.path_matrix(p)[:, [c]] for p in paths]
                parts.append((off[t], Matrix.hstack(cols, M.dims[i])))
            cov.append(_assemble_columns(parts, M.dims[i], off[-1]))
        # differential as algebra elements, and vertex maps into P_{k-1}
        if k == 0:
            vm = cov
        else:
            elems: dict = {}
            for t, (v, c) in enumerate(gens):
                y = emb[v][:, [c]]
                off = _sum_offsets(b, prev_vertices, v)
                for s, js in enumerate(prev_vertices):
                    seg = y[list(range(off[s], off[s + 1])), :] if off[s + 1] > off[s] else None
                    if seg is None or seg.is_zero():
                        continue
                    coeffs = {
                        pos: seg[pos, 0] for pos in range(seg.rows) if seg[pos, 0] != 0
                    }
                    elems[(t, s)] = coeffs
            diffs.append(elems)
            vm = [emb[i] @ cov[i] for i in range(nv)]
        terms.append(verts)
        shifts.append(sh)
        vmaps.append(vm)
        # kernel of the cover, as a module
        kb, frees, kkeys = [], [], []
        for i in range(nv):
            row_keys = M.keys(i)
            col_keys = _projective_keys(b, verts, sh, i, graded)
            K, free, keys_i = _graded_kernel(cov[i], row_keys, col_keys)
            kb.append(K)
            frees.append(free)
            kkeys.append(keys_i)
        kdims = [K.cols for K in kb]
        if sum(kdims) == 0:
            complete = True
            break
        pmaps = _projective_sum_maps(b, verts)
        kmaps = []
        for idx, a in enumerate(q.arrows):
            u, w = a.source, a.target
            if kdims[u] == 0 or kdims[w] == 0:
                kmaps.append(Matrix.zeros(kdims[u], kdims[w]))
                continue
            image = pmaps[idx] @ kb[w]
            kmaps.append(image[frees[u], :])
        kweights = (
            [np.array(kk, dtype=np.int64).reshape(len(kk), r) for kk in kkeys] if graded else None
        )
        M = Representation(b, kdims, kmaps, kweights, check=False)
        emb = kb
        prev_vertices = verts
    return Resolution(X, terms, shifts, generators, diffs, vmaps, complete)


def _projective_keys(b: AlgebraBasis, verts, shifts: np.ndarray, i: int, graded: bool) -> list[tuple]:
    keys: list[tuple] = []
    for t, j in enumerate(verts):
        n = b.dim(i, j)
        if not n:
            continue
        if graded:
            keys.extend(_keys(basis_weights(b, i, j) + shifts[t]))
        else:
            keys.extend([()] * n)
    return keys


def resolution(X: Representation, length: int) -> Resolution:
    """Cached minimal resolution of ``X`` through ``P_length``."""
    with _LOCK:
        res = X._resolution
        if res is not None and (res.complete or res.length >= length):
            return res
        res = _resolve(X, length)
        X._resolution = res
        return res


def min_proj_resolution(X: Representation, max_len: int = GENERIC_CAP) -> Resolution:
    res = resolution(X, max_len)
    if not res.complete or res.length > max_len:
        raise CapExceeded(f"projective dimension exceeds {max_len}")
    return res


def projective_cover(X: Representation) -> tuple[Representation, ModuleMap]:
    res = resolution(X, 0)
    return res.term(0), res.differential(0)


# ---------------------------------------------------------------------------
# Hom complexes
# ---------------------------------------------------------------------------


class _HomSpace:
    """``Hom(P, Y)`` for a sum ``P`` of shifted projectives, split by degree.

    Coordinates are the concatenation of ``e_{j_t} Y`` over the summands
    ``t``; a coordinate of weight ``w`` in summand ``t`` has degree
    ``w - shift_t``.
    """

    def __init__(self, verts: Sequence[int], shifts: np.ndarray, Y: Representation, graded: bool):
        self.verts = list(verts)
        self.offsets = [0]
        keys: list[tuple] = []
        for t, j in enumerate(self.verts):
            d = Y.dims[j]
            self.offsets.append(self.offsets[-1] + d)
            if graded:
                keys.extend(_keys(Y.weights[j] - shifts[t]))
            else:
                keys.extend([()] * d)
        self.size = self.offsets[-1]
        self.blocks = _group(keys)
        self.block_of = np.empty(self.size, dtype=np.int64)
        self.pos = np.empty(self.size, dtype=np.int64)
        self.key_list = sorted(self.blocks)
        self.key_id = {k: n for n, k in enumerate(self.key_list)}
        for n, k in enumerate(self.key_list):
            idx = self.blocks[k]
            self.block_of[idx] = n
            self.pos[idx] = np.arange(len(idx))

    def dim(self, key) -> int:
        idx = self.blocks.get(key)
        return 0 if idx is None else len(idx)


def _precomposition_blocks(src: _HomSpace, tgt: _HomSpace, Y: Representation,
                           elems: dict, shift=None) -> dict[tuple, Matrix]:
    """Blocks of ``(z_s) -> (sum_s x_{t,s} z_s)_t`` from ``src`` to ``tgt``.

    ``elems[(t, s)]`` lies in ``e_{j_t} L e_{j_s}`` with ``t`` a summand of
    the target's projective and ``s`` of the source's.  The block for source
    degree ``d`` has rows in target degree ``d + shift``.
    """
    rows_all, cols_all, vals_all, dens = [], [], [], []
    for (t, s), x in elems.items():
        E = Y.element_matrix(x, tgt.verts[t], src.verts[s])
        if E.rows == 0 or E.cols == 0:
            continue
        r, c = np.nonzero(E.num)
        if len(r) == 0:
            continue
        rows_all.append(r + tgt.offsets[t])
        cols_all.append(c + src.offsets[s])
        vals_all.append(E.num[r, c])
        dens.append(np.full(len(r), E.den, dtype=object))
    out: dict[tuple, Matrix] = {}
    if not rows_all:
        return out
    rows = np.concatenate(rows_all)
    cols = np.concatenate(cols_all)
    vals = np.concatenate([v.astype(object) for v in vals_all])
    den_arr = np.concatenate(dens)
    L = 1
    for d in set(den_arr.tolist()):
        L = L * d // math.gcd(L, d)
    if L != 1:
        vals = vals * (L // den_arr)
    bid = src.block_of[cols]
    order = np.argsort(bid, kind="stable")
    bid, rows, cols, vals = bid[order], rows[order], cols[order], vals[order]
    cuts = np.flatnonzero(np.diff(bid)) + 1
    for seg in np.split(np.arange(len(bid)), cuts):
        key = src.key_list[bid[seg[0]]]
        tkey = key if shift is None else tuple(int(a + b) for a, b in zip(key, shift))
        tidx = tgt.blocks.get(tkey)
        if tidx is None:
            continue
        r = rows[seg]
        keep = tgt.block_of[r] == tgt.key_id[tkey]
        if not np.any(keep):
            continue
        sel = seg[keep]
        nr, nc = len(tidx), len(src.blocks[key])
        num = np.zeros((nr, nc), dtype=object)
        np.add.at(num, (tgt.pos[rows[sel]], src.pos[cols[sel]]), vals[sel])
        out[key] = Matrix(num, L)
    return out


def _hom_spaces(res: Resolution, Y: Representation, upto: int) -> list[_HomSpace]:
    graded = res.module.graded and Y.graded
    out = []
    for k in range(min(upto, res.length) + 1):
        out.append(_HomSpace(res.terms[k], res.shifts[k], Y, graded))
    return out


def _hom_ranks(res: Resolution, Y: Representation, spaces: list[_HomSpace]) -> list[dict]:
    """Per-degree ranks of ``Hom(P_k, Y) -> Hom(P_{k+1}, Y)``."""
    ranks = []
    for k in range(len(spaces) - 1):
        blocks = _precomposition_blocks(spaces[k], spaces[k + 1], Y, res.diffs[k])
        ranks.append({key: rank(m) for key, m in blocks.items()})
    return ranks


# ---------------------------------------------------------------------------
# Ext
# ---------------------------------------------------------------------------


@dataclass
class ExtProfile:
    dims: list[int]

    def __getitem__(self, j: int) -> int:
        return self.dims[j]

    def __len__(self) -> int:
        return len(self.dims)

    def vanishes_below(self, n: int) -> bool:
        return all(d == 0 for d in self.dims[:n])


def _ext_from_resolution(res: Resolution, Y: Representation, cap: int) -> list[int]:
    spaces = _hom_spaces(res, Y, cap + 1)
    ranks = _hom_ranks(res, Y, spaces)
    out = []
    for k in range(cap + 1):
        if k >= len(spaces):
            out.append(0)
            continue
        tot = spaces[k].size
        tot -= sum(ranks[k].values()) if k < len(ranks) else 0
        tot -= sum(ranks[k - 1].values()) if k >= 1 else 0
        out.append(tot)
    return out


def ext_profile(X: Representation, Y: Representation, cap: int = 3) -> ExtProfile:
    """``dim Ext^j(X, Y)`` for ``j = 0..cap``."""
    if X.algebra is not Y.algebra:
        raise ValueError("modules over different algebras")
    res = resolution(X, cap + 1)
    return ExtProfile(_ext_from_resolution(res, Y, cap))


def hom_dim(X: Representation, Y: Representation) -> int:
    return ext_profile(X, Y, 0)[0]


def ext1_via_extensions(X: Representation, Y: Representation) -> int:
    """``dim Ext^1(X, Y)`` by counting extensions, without resolutions.

    An extension ``0 -> Y -> E -> X -> 0`` has arrow maps
    ``[[Y_a, Z_a], [0, X_a]]``; the relations make the admissible ``Z`` a
    linear space and the trivial ones are ``Z_a = Y_a h_v - h_u X_a``.
    """
    b = X.algebra
    q = b.quiver
    sizes = [X.dims[a.target] * Y.dims[a.source] for a in q.arrows]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    total = int(offs[-1])
    # cocycle equations: off-diagonal block of each relation vanishes
    eqs = []
    for rel in b.presentation.relations:
        s, t = rel.source, rel.target
        nr = Y.dims[s] * X.dims[t]
        if nr == 0 or total == 0:
            continue
        acc = [Matrix.zeros(nr, sz) for sz in sizes]
        for c, p in rel.terms:
            arrows = p.arrows
            for k, a in enumerate(arrows):
                left = Y.path_matrix(Path(s, q.arrows[a].source, arrows[:k])) if k else \
                    Matrix.identity(Y.dims[s])
                rest = arrows[k + 1:]
                right = X.path_matrix(Path(q.arrows[a].target, t, rest)) if rest else \
                    Matrix.identity(X.dims[t])
                # vec(L Z R) = (L kron R^T) vec(Z)
                acc[a] = acc[a] + kron(left, right.T).scale(c)
        eqs.append(Matrix.hstack(acc, nr))
    if total == 0:
        return 0
    cocycles = total - (rank(Matrix.vstack(eqs, total)) if eqs else 0)
    hom_k = sum(X.dims[v] * Y.dims[v] for v in range(q.n_vertices))
    boundaries = hom_k - hom_dim_direct(X, Y)
    return cocycles - boundaries


def global_dimension(b: AlgebraBasis, cap: int = GENERIC_CAP) -> int:
    best = 0
    for v in range(b.n_vertices):
        res = resolution(simple_rep(b, v), cap)
        if not res.complete or res.length > cap:
            raise AboveCap(f"simple at vertex {b.quiver.vertices[v]} has projective dimension > {cap}")
        best = max(best, res.length)
    return best


def is_injective(X: Representation) -> bool:
    b = X.algebra
    for v in range(b.n_vertices):
        if ext_profile(simple_rep(b, v), X, 1)[1]:
            return False
    return True


# ---------------------------------------------------------------------------
# higher Auslander-Reiten translations
# ---------------------------------------------------------------------------


def _elements_vertex_matrix(b: AlgebraBasis, src_verts, tgt_verts, elems: dict, i: int) -> Matrix:
    """Vertex-``i`` matrix of a map between projective sums given by elements.

    ``elems[(s, t)]`` lies in ``e_{j_s} L e_{j_t}`` with ``s`` a source summand.
    """
    roff = _sum_offsets(b, tgt_verts, i)
    coff = _sum_offsets(b, src_verts, i)
    out_rows = roff[-1]
    out_cols = coff[-1]
    if out_rows == 0 or out_cols == 0:
        return Matrix.zeros(out_rows, out_cols)
    num = np.zeros((out_rows, out_cols), dtype=object)
    den = 1
    blocks = []
    for (s, t), x in elems.items():
        m = b.element_right(x, src_verts[s], tgt_verts[t], i)
        if m.rows and m.cols:
            blocks.append((roff[t], coff[s], m))
            den = den * m.den // math.gcd(den, m.den)
    for r0, c0, m in blocks:
        num[r0:r0 + m.rows, c0:c0 + m.cols] += m.num.astype(object) * (den // m.den)
    return Matrix(num, den)


def _split_elements(b: AlgebraBasis, verts, v: int, z: Matrix, t: int) -> dict:
    off = _sum_offsets(b, verts, v)
    out = {}
    for s in range(len(verts)):
        coeffs = {}
        for pos in range(off[s], off[s + 1]):
            val = z[pos, 0]
            if val != 0:
                coeffs[pos - off[s]] = val
        if coeffs:
            out[(t, s)] = coeffs
    return out


def lift_chain_map(src: Resolution, tgt: Resolution, f_vertex, upto: int) -> list[dict]:
    """Lift a module map to the resolutions, through degree ``upto``.

    ``f_vertex(i)`` is the matrix of the map at vertex ``i``.  Degree ``k`` of
    the result maps summand ``s`` of ``src.P_k`` to ``sum_t x_{s,t}`` in
    ``tgt.P_k``.
    """
    b = src.module.algebra
    out: list[dict] = []
    for k in range(min(upto, src.length) + 1):
        elems: dict = {}
        if k > tgt.length:
            out.append(elems)
            continue
        for s, j in enumerate(src.terms[k]):
            if k == 0:
                value = f_vertex(j)[:, [src.generators[s]]]
            else:
                off = _sum_offsets(b, src.terms[k], j)
                y = src.vertex_maps[k][j][:, [off[s]]]
                F = _elements_vertex_matrix(b, src.terms[k - 1], tgt.terms[k - 1], out[k - 1], j)
                value = F @ y
            if value.is_zero():
                continue
            z = solve(tgt.vertex_maps[k][j], value)
            if z is None:
                raise ArithmeticError("chain map lift failed; resolution is not exact")
            elems.update(_split_elements(b, tgt.terms[k], j, z, s))
        out.append(elems)
    return out


@dataclass
class _InjectiveData:
    resolutions: list[Resolution]
    lifts: dict[int, dict]  # arrow -> degree-n elements of the lifted map


def _injective_data(b: AlgebraBasis, n: int) -> _InjectiveData:
    def build():
        q = b.quiver
        res = []
        for u in range(q.n_vertices):
            r = resolution(injective_rep(b, u), n + 1)
            if not r.complete or r.length > n:
                raise CapExceeded(
                    f"injective at vertex {q.vertices[u]} has projective dimension > {n}"
                )
            res.append(r)
        lifts = {}
        for k, a in enumerate(q.arrows):
            u, w = a.source, a.target
            pos = _arrow_position(b, k)

            def f_vertex(i, u=u, w=w, pos=pos):
                return b.left_mult(pos, u, w, i).T

            chain = lift_chain_map(res[u], res[w], f_vertex, n)
            lifts[k] = chain[n] if n < len(chain) else {}
        return _InjectiveData(res, lifts)

    return _memo(b, ("injdata", n), build)


def tau_n_minus(X: Representation, n: int) -> Representation:
    """``tau_n^-(X) = Ext^n(D L, X)``, with ``e_u`` part ``Ext^n(D(e_u L), X)``."""
    b = X.algebra
    q = b.quiver
    data = _injective_data(b, n)
    graded = X.graded
    per_vertex = []
    for u in range(q.n_vertices):
        res = data.resolutions[u]
        if res.length < n:
            per_vertex.append(None)
            continue
        Hn = _HomSpace(res.terms[n], res.shifts[n], X, graded)
        Hp = _HomSpace(res.terms[n - 1], res.shifts[n - 1], X, graded)
        image = _precomposition_blocks(Hp, Hn, X, res.diffs[n - 1])
        ech = {}
        basis_keys = []
        for key in Hn.key_list:
            size = Hn.dim(key)
            blk = image.get(key)
            e = Echelon(blk.T) if blk is not None else None
            free = e.free if e is not None else list(range(size))
            ech[key] = (e, free)
            basis_keys.extend([key] * len(free))
        per_vertex.append((Hn, ech, basis_keys))
    dims = [0 if pv is None else len(pv[2]) for pv in per_vertex]
    index = []
    for pv in per_vertex:
        table = {}
        if pv is not None:
            c = 0
            for key in pv[0].key_list:
                nfree = len(pv[1][key][1])
                table[key] = c
                c += nfree
        index.append(table)
    g = arrow_grading(b)
    maps = []
    for k, a in enumerate(q.arrows):
        u, w = a.source, a.target
        if dims[u] == 0 or dims[w] == 0:
            maps.append(Matrix.zeros(dims[u], dims[w]))
            continue
        Hu, ech_u, _ = per_vertex[u]
        Hw, ech_w, _ = per_vertex[w]
        shift = tuple(int(x) for x in g[k]) if graded else None
        blocks = _precomposition_blocks(Hw, Hu, X, data.lifts[k], shift)
        parts = []
        for key, blk in blocks.items():
            _, free_w = ech_w[key]
            if not free_w:
                continue
            tkey = key if shift is None else tuple(x + y for x, y in zip(key, shift))
            e_u, free_u = ech_u[tkey]
            if not free_u:
                continue
            cols = blk[:, free_w]
            coords = e_u.reduce_columns(cols) if e_u is not None else cols[free_u, :]
            parts.append((index[u][tkey], index[w][key], coords))
        maps.append(_place_blocks(parts, dims[u], dims[w]))
    weights = None
    if graded:
        weights = [np.array(pv[2], dtype=np.int64).reshape(len(pv[2]), g.shape[1])
                   if pv is not None else np.zeros((0, g.shape[1]), dtype=np.int64)
                   for pv in per_vertex]
    out = Representation(b, dims, maps, weights, check=False)
    out._tau_data = (X, n, per_vertex, index)
    return out


def tau_n_minus_map(f: ModuleMap, n: int, source: Representation, target: Representation,
                    degree: Sequence[int] | None = None) -> ModuleMap:
    """``tau_n^-(f)`` for ``f: X -> Y``, given ``source = tau_n^-(X)`` and ``target = tau_n^-(Y)``.

    ``degree`` is the weight shift of ``f`` when both modules are graded.
    """
    X, nx, pv_x, idx_x = source._tau_data
    Y, ny, pv_y, idx_y = target._tau_data
    if X is not f.source or Y is not f.target or nx != n or ny != n:
        raise ValueError("tau data does not match the map")
    b = X.algebra
    shift = tuple(int(x) for x in degree) if (degree is not None and X.graded and Y.graded) else None
    blocks = []
    for u in range(b.n_vertices):
        if pv_x[u] is None or pv_y[u] is None or not source.dims[u] or not target.dims[u]:
            blocks.append(Matrix.zeros(target.dims[u], source.dims[u]))
            continue
        Hx, ech_x, _ = pv_x[u]
        Hy, ech_y, _ = pv_y[u]
        F = Matrix.block_diag([f.blocks[j] for j in Hx.verts])
        parts = []
        for key in Hx.key_list:
            _, free_x = ech_x[key]
            if not free_x:
                continue
            tkey = key if shift is None else tuple(a + c for a, c in zip(key, shift))
            if tkey not in ech_y:
                continue
            e_y, free_y = ech_y[tkey]
            if not free_y:
                continue
            cols = [int(Hx.blocks[key][c]) for c in free_x]
            rows = [int(r) for r in Hy.blocks[tkey]]
            img = F[rows, cols]
            coords = e_y.reduce_columns(img) if e_y is not None else img[free_y, :]
            parts.append((idx_y[u][tkey], idx_x[u][key], coords))
        blocks.append(_place_blocks(parts, target.dims[u], source.dims[u]))
    return ModuleMap(source, target, tuple(blocks))


def _place_blocks(parts, nrows: int, ncols: int) -> Matrix:
    if not parts or nrows == 0 or ncols == 0:
        return Matrix.zeros(nrows, ncols)
    den = 1
    for _, _, m in parts:
        den = den * m.den // math.gcd(den, m.den)
    num = np.zeros((nrows, ncols), dtype=object)
    for r0, c0, m in parts:
        num[r0:r0 + m.rows, c0:c0 + m.cols] += m.num.astype(object) * (den // m.den)
    return Matrix(num, den)


def tau_n(X: Representation, n: int) -> Representation:
    """``tau_n(X) = D Ext^n(X, L)``, computed as ``D tau_n^-(D X)`` over the opposite."""
    return dual(tau_n_minus(dual(X), n))


def nu_inverse_profile(X: Representation, n: int) -> ExtProfile:
    """Entry ``j`` is ``dim Ext^j(D L, X)``, equal to ``dim Ext^j_{op}(D X, L)``."""
    b = X.algebra
    data = _injective_data(b, n)
    tot = [0] * (n + 1)
    for res in data.resolutions:
        for j, d in enumerate(_ext_from_resolution(res, X, n)):
            tot[j] += d
    return ExtProfile(tot)
