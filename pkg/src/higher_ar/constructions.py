"""Building new algebras from old ones.

Tensor products of presentations, n-APR tilts (with a presentation of the
endomorphism algebra of the tilting module), and graded dimension data of
the (n+1)-preprojective algebra ``T_L Ext^n(D L, L)``.

Morphisms between summands compose left to right, matching paths: the path
``f.g`` of the endomorphism quiver is the map "first ``f``, then ``g``".  With
this convention the summands of ``L`` itself give back ``L``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .classify import StoppedEarly
from .exact_linalg import Echelon, Matrix
from .homological import (
    AboveCap,
    ModuleMap,
    Representation,
    _intertwiner_system,
    _unvec,
    arrow_grading,
    global_dimension,
    is_injective,
    nu_inverse_profile,
    projective_rep,
    tau_n_minus,
    tau_n_minus_map,
)
from .quiver_core import (
    AlgebraBasis,
    AlgebraPresentation,
    Path,
    Quiver,
    Relation,
    cartan_matrix,
    compute_basis,
    make_relation,
)


class PreconditionFailed(ValueError):
    """An n-APR tilt was requested where it is not defined."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


def _basis(p) -> AlgebraBasis:
    return p if isinstance(p, AlgebraBasis) else compute_basis(p)


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------


def tensor_product(a: AlgebraPresentation, b: AlgebraPresentation,
                   name: str | None = None) -> AlgebraPresentation:
    """Presentation of ``A (x) B``.

    Vertex ``(i, j)`` is named ``"i,j"``.  The arrow ``x (x) e_j`` is named
    ``l{j}_x`` and ``e_i (x) y`` is ``r{i}_y``, with ``i`` and ``j`` the
    1-based vertex positions.
    """
    qa, qb = a.quiver, b.quiver
    na, nb = qa.n_vertices, qb.n_vertices
    vertices = [f"{u},{w}" for u in qa.vertices for w in qb.vertices]

    def vid(i: int, j: int) -> int:
        return i * nb + j

    arrows = []
    left: dict[tuple[int, int], int] = {}
    right: dict[tuple[int, int], int] = {}
    for i in range(na):
        for j in range(nb):
            for k in qb.out_arrows(j):
                arr = qb.arrows[k]
                right[(i, k)] = len(arrows)
                arrows.append((f"r{i + 1}_{arr.name}", vertices[vid(i, arr.source)],
                               vertices[vid(i, arr.target)]))
        for k in qa.out_arrows(i):
            arr = qa.arrows[k]
            for j in range(nb):
                left[(k, j)] = len(arrows)
                arrows.append((f"l{j + 1}_{arr.name}", vertices[vid(arr.source, j)],
                               vertices[vid(arr.target, j)]))
    q = Quiver.build(vertices, arrows)
    rels: list[Relation] = []
    for j in range(nb):
        for rel in a.relations:
            rels.append(make_relation(
                (c, q.path_from_indices([left[(k, j)] for k in p.arrows], vid(p.source, j)))
                for c, p in rel.terms))
    for i in range(na):
        for rel in b.relations:
            rels.append(make_relation(
                (c, q.path_from_indices([right[(i, k)] for k in p.arrows], vid(i, p.source)))
                for c, p in rel.terms))
    for ka, x in enumerate(qa.arrows):
        for kb, y in enumerate(qb.arrows):
            first = q.path_from_indices([left[(ka, y.source)], right[(x.target, kb)]])
            second = q.path_from_indices([right[(x.source, kb)], left[(ka, y.target)]])
            rels.append(make_relation([(1, first), (-1, second)]))
    return AlgebraPresentation(q, tuple(rels), name or f"{a.name}_x_{b.name}")


# ---------------------------------------------------------------------------
# endomorphism algebras of basic modules
# ---------------------------------------------------------------------------


class _HomBasis:
    """A basis of ``Hom(X, Y)`` with coordinates read off the free variables."""

    def __init__(self, X: Representation, Y: Representation):
        system, offsets = _intertwiner_system(X, Y)
        ech = Echelon(system)
        ker = ech.kernel()
        self.free = ech.free
        self.offsets = offsets
        self.maps: list[ModuleMap] = []
        for c in range(ker.cols):
            col = ker[:, [c]]
            blocks = tuple(
                _unvec(col[list(range(offsets[v], offsets[v + 1])), :], Y.dims[v], X.dims[v])
                for v in range(X.n_vertices))
            self.maps.append(ModuleMap(X, Y, blocks))

    def __len__(self) -> int:
        return len(self.maps)

    def coords(self, f: ModuleMap) -> list[Fraction]:
        flat: list[Fraction] = []
        for m in f.blocks:
            flat.extend(x for row in m.tolist() for x in row)
        return [Fraction(flat[i]) for i in self.free]


@dataclass
class EndAlgebraData:
    """Structure of ``End(T)`` for ``T`` a sum of pairwise non-isomorphic indecomposables.

    ``constants[(i, k, j)][(p, q)]`` are the coordinates in ``Hom(T_i, T_j)``
    of "basis map ``p`` of ``Hom(T_i, T_k)``, then basis map ``q`` of
    ``Hom(T_k, T_j)``".
    """

    summands: list[Representation]
    hom_dims: list[list[int]]
    constants: dict[tuple[int, int, int], dict[tuple[int, int], list[Fraction]]]
    arrows: list[tuple[int, int, list[Fraction]]] = field(default_factory=list)
    relations: list[Relation] = field(default_factory=list)
    cap: int = 0

    @property
    def dim(self) -> int:
        return sum(map(sum, self.hom_dims))

    def compose(self, i: int, k: int, j: int, x: list[Fraction], y: list[Fraction]) -> list[Fraction]:
        """Coordinates of ``x`` (in ``Hom(T_i,T_k)``) followed by ``y`` (in ``Hom(T_k,T_j)``)."""
        out = [Fraction(0)] * self.hom_dims[i][j]
        table = self.constants[(i, k, j)]
        for p, xp in enumerate(x):
            if not xp:
                continue
            for q, yq in enumerate(y):
                if not yq:
                    continue
                for r, c in enumerate(table[(p, q)]):
                    if c:
                        out[r] += xp * yq * c
        return out

    def is_associative(self) -> bool:
        m = len(self.summands)
        for i, k, l, j in product(range(m), repeat=4):
            dims = (self.hom_dims[i][k], self.hom_dims[k][l], self.hom_dims[l][j])
            for p, q, r in product(*(range(d) for d in dims)):
                x = _unit(dims[0], p)
                y = _unit(dims[1], q)
                z = _unit(dims[2], r)
                lhs = self.compose(i, l, j, self.compose(i, k, l, x, y), z)
                rhs = self.compose(i, k, j, x, self.compose(k, l, j, y, z))
                if lhs != rhs:
                    return False
        return True


def _unit(n: int, i: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    out[i] = Fraction(1)
    return out


def _span_rank(vectors: list[list[Fraction]], width: int) -> int:
    if not vectors or width == 0:
        return 0
    return len(Echelon(Matrix.from_rows(vectors, width)).pivots)


def _complement(base: list[list[Fraction]], candidates: list[list[Fraction]],
                width: int) -> list[int]:
    """Indices of ``candidates`` extending ``base`` greedily to a larger span."""
    chosen = []
    current = list(base)
    r = _span_rank(current, width)
    for idx, v in enumerate(candidates):
        r2 = _span_rank(current + [v], width)
        if r2 > r:
            chosen.append(idx)
            current.append(v)
            r = r2
    return chosen


def end_algebra(summands: list[Representation]) -> EndAlgebraData:
    """Hom table and composition constants of ``End(T_1 + ... + T_m)``."""
    m = len(summands)
    homs = [[_HomBasis(summands[i], summands[j]) for j in range(m)] for i in range(m)]
    dims = [[len(homs[i][j]) for j in range(m)] for i in range(m)]
    constants = {}
    for i, k, j in product(range(m), repeat=3):
        table = {}
        for p, f in enumerate(homs[i][k].maps):
            for q, g in enumerate(homs[k][j].maps):
                table[(p, q)] = homs[i][j].coords(g.compose(f))
        constants[(i, k, j)] = table
    return EndAlgebraData(list(summands), dims, constants)


def _radical(data: EndAlgebraData, i: int, j: int) -> list[list[Fraction]]:
    """A basis of the radical maps ``T_i -> T_j``, as coordinate vectors."""
    d = data.hom_dims[i][j]
    if i != j:
        return [_unit(d, p) for p in range(d)]
    # End(T_i) is local with residue field K: rad is the trace-zero part
    T = data.summands[i]
    homs = _HomBasis(T, T)
    traces = [sum((f.blocks[v][r, r] for v in range(T.n_vertices) for r in range(T.dims[v])),
                  Fraction(0)) for f in homs.maps]
    M = Matrix.from_rows([traces], d)
    ker = Echelon(M).kernel()
    return [[ker[r, c] for r in range(d)] for c in range(ker.cols)]


def quiverize(data: EndAlgebraData, vertex_names: list[str], name: str,
              arrow_prefix: str = "f") -> AlgebraPresentation:
    """Quiver with relations for the endomorphism algebra described by ``data``.

    Arrows ``T_i -> T_j`` are a deterministic complement of ``rad^2`` in
    ``rad``.  Relations are generators of the kernel of ``KQ -> End(T)``,
    found length by length until every path of the current length vanishes.
    """
    m = len(data.summands)
    rad = {(i, j): _radical(data, i, j) for i in range(m) for j in range(m)}
    arrows: list[tuple[int, int, list[Fraction]]] = []
    for i in range(m):
        for j in range(m):
            d = data.hom_dims[i][j]
            sq = []
            for k in range(m):
                for x in rad[(i, k)]:
                    for y in rad[(k, j)]:
                        sq.append(data.compose(i, k, j, x, y))
            for idx in _complement(sq, rad[(i, j)], d):
                arrows.append((i, j, rad[(i, j)][idx]))
    counters: dict[tuple[int, int], int] = {}
    named = []
    for i, j, vec in arrows:
        c = counters.get((i, j), 0) + 1
        counters[(i, j)] = c
        named.append((f"{arrow_prefix}{i + 1}_{j + 1}_{c}", vertex_names[i], vertex_names[j]))
    q = Quiver.build(vertex_names, named)
    data.arrows = arrows

    # paths by length with their images
    layer: list[tuple[Path, list[Fraction]]] = []
    for k, (i, j, vec) in enumerate(arrows):
        layer.append((q.path_from_indices([k]), vec))
    relations: list[Relation] = []
    length = 1
    while True:
        length += 1
        nxt = []
        for p, vec in layer:
            for k in q.out_arrows(p.target):
                i, j, avec = arrows[k]
                img = data.compose(p.source, p.target, j, vec, avec)
                nxt.append((Path(p.source, j, p.arrows + (k,)), img))
        layer = nxt
        if not layer:
            break
        relations.extend(_new_relations(q, data, relations, length, arrows))
        if all(not any(v) for _, v in layer):
            break
    data.relations = relations
    data.cap = length
    return AlgebraPresentation(q, tuple(relations), name)


def _paths_up_to(q: Quiver, i: int, j: int, lo: int, hi: int) -> list[Path]:
    """Paths ``i -> j`` with length in ``[lo, hi]``, shortest first."""
    out = []
    frontier = [Path(i, i, ())]
    if lo == 0 and i == j:
        out.append(frontier[0])
    for ell in range(1, hi + 1):
        nxt = []
        for p in frontier:
            for k in q.out_arrows(p.target):
                nxt.append(Path(p.source, q.arrows[k].target, p.arrows + (k,)))
        frontier = nxt
        if ell >= lo:
            out.extend(p for p in frontier if p.target == j)
    return out


def _image(data: EndAlgebraData, q: Quiver, arrows, p: Path) -> list[Fraction]:
    i, j, vec = arrows[p.arrows[0]]
    for k in p.arrows[1:]:
        _, t, avec = arrows[k]
        vec = data.compose(p.source, j, t, vec, avec)
        j = t
    return vec


def _new_relations(q: Quiver, data: EndAlgebraData, found: list[Relation], length: int,
                   arrows) -> list[Relation]:
    """Kernel elements supported on paths of length ``2..length`` not generated by ``found``."""
    out = []
    m = q.n_vertices
    for i in range(m):
        for j in range(m):
            paths = _paths_up_to(q, i, j, 2, length)
            if not any(len(p) == length for p in paths):
                continue
            index = {p: n for n, p in enumerate(paths)}
            d = data.hom_dims[i][j]
            images = [_image(data, q, arrows, p) for p in paths]
            M = Matrix.from_rows([[images[c][r] for c in range(len(paths))] for r in range(d)],
                                 len(paths)) if d else Matrix.zeros(0, len(paths))
            ker = Echelon(M).kernel()
            if ker.cols == 0:
                continue
            generated = _generated(q, found, index, i, j, length)
            kernel_vecs = [[ker[r, c] for r in range(len(paths))] for c in range(ker.cols)]
            for idx in _complement(generated, kernel_vecs, len(paths)):
                vec = kernel_vecs[idx]
                terms = [(c, paths[n]) for n, c in enumerate(vec) if c]
                rel = make_relation(terms)
                out.append(rel)
                generated.append(vec)
    return out


def _generated(q: Quiver, found: list[Relation], index: dict[Path, int], i: int, j: int,
               length: int) -> list[list[Fraction]]:
    """Vectors ``u r w`` with ``r`` in ``found`` whose terms all have length at most ``length``."""
    out = []
    for rel in found:
        slack = length - max(len(p) for _, p in rel.terms)
        if slack < 0:
            continue
        for u in _paths_up_to(q, i, rel.source, 0, slack):
            for w in _paths_up_to(q, rel.target, j, 0, slack - len(u)):
                vec = [Fraction(0)] * len(index)
                for c, p in rel.terms:
                    vec[index[Path(i, j, u.arrows + p.arrows + w.arrows)]] += c
                out.append(vec)
    return out


# ---------------------------------------------------------------------------
# n-APR tilts
# ---------------------------------------------------------------------------


def _check_apr(b: AlgebraBasis, n: int, v: int) -> Representation:
    P = projective_rep(b, v)
    if sum(P.dims) != 1:
        raise PreconditionFailed("SimpleProjective",
                                 f"the projective at vertex {b.quiver.vertices[v]} is not simple")
    if is_injective(P):
        raise PreconditionFailed("NotInjective",
                                 f"the projective at vertex {b.quiver.vertices[v]} is injective")
    try:
        global_dimension(b, n)
    except AboveCap:
        raise PreconditionFailed("GlobalDimension", f"global dimension exceeds {n}") from None
    prof = nu_inverse_profile(P, n)
    for i in range(1, n):
        if prof[i]:
            raise PreconditionFailed("ExtVanishing", f"Ext^{i}(D L, P) has dimension {prof[i]}")
    return P


def n_apr_tilt(p, n: int, v: int | str):
    """n-APR tilt at a simple projective vertex ``v``.

    Returns ``(summands, data, presentation)``; summand ``v`` is
    ``tau_n^-(L e_v)`` and the others are the projectives ``L e_u``.
    """
    b = _basis(p)
    q = b.quiver
    if isinstance(v, str):
        v = q.vertex_index(v)
    P = _check_apr(b, n, v)
    summands = [tau_n_minus(P, n) if u == v else projective_rep(b, u)
                for u in range(q.n_vertices)]
    data = end_algebra(summands)
    name = f"{b.presentation.name}_apr{n}_{q.vertices[v]}"
    pres = quiverize(data, list(q.vertices), name)
    return summands, data, pres


# ---------------------------------------------------------------------------
# preprojective algebra dimensions
# ---------------------------------------------------------------------------


@dataclass
class GradedDims:
    """``tables[i][u][v] = dim e_u Pi_i e_v``; ``new_arrows[u][v]`` counts degree 1 generators."""

    n: int
    tables: list[list[list[int]]]
    new_arrows: list[list[int]]

    def total(self, i: int) -> int:
        return sum(map(sum, self.tables[i]))


def _right_arrow_map(b: AlgebraBasis, k: int) -> ModuleMap:
    """Right multiplication by arrow ``k: w -> v`` as a map ``L e_w -> L e_v``."""
    a = b.quiver.arrows[k]
    w, v = a.source, a.target
    pos = next(iter(b.expand(Path(w, v, (k,)))))
    blocks = tuple(b.right_mult(pos, w, v, i) for i in range(b.n_vertices))
    return ModuleMap(projective_rep(b, w), projective_rep(b, v), blocks)


def preprojective_algebra_dims(p, n: int, maxdeg: int) -> GradedDims:
    b = _basis(p)
    m = b.n_vertices
    g = arrow_grading(b)
    levels = [[projective_rep(b, v) for v in range(m)]]
    for i in range(1, maxdeg + 1):
        row = []
        for v, X in enumerate(levels[-1]):
            if X.is_zero() or is_injective(X):
                row.append(tau_n_minus(X, n) if not X.is_zero() else X)
                continue
            prof = nu_inverse_profile(X, n)
            if not prof.vanishes_below(n):
                raise StoppedEarly(f"degree {i} at vertex {b.quiver.vertices[v]} is not a module",
                                   [x for lev in levels for x in lev])
            row.append(tau_n_minus(X, n))
        levels.append(row)
    tables = [[[levels[i][v].dims[u] for v in range(m)] for u in range(m)]
              for i in range(maxdeg + 1)]
    C = cartan_matrix(b)
    assert tables[0] == [[int(C[u, v]) for v in range(m)] for u in range(m)]
    new = [[0] * m for _ in range(m)]
    if maxdeg >= 1:
        pi1 = [tau_n_minus(projective_rep(b, v), n) for v in range(m)]
        right_images: dict[int, list[Matrix]] = {v: [] for v in range(m)}
        for k, a in enumerate(b.quiver.arrows):
            f = _right_arrow_map(b, k)
            deg = [int(x) for x in g[k]] if g.shape[1] else None
            F = tau_n_minus_map(f, n, pi1[a.source], pi1[a.target], deg)
            right_images[a.target].append(F)
        for v in range(m):
            X = pi1[v]
            for u in range(m):
                d = X.dims[u]
                if d == 0:
                    continue
                cols = [X.maps[k] for k in b.quiver.out_arrows(u)]
                cols += [F.blocks[u] for F in right_images[v]]
                cols = [c for c in cols if c.cols]
                r = 0
                if cols:
                    r = len(Echelon(Matrix.hstack(cols, d).T).pivots)
                new[u][v] = d - r
    return GradedDims(n, tables, new)
