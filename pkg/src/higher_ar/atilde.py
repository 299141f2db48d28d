"""Orbit algebras of the type-A-tilde lattice quiver and their cuts.

The vertices of the lattice quiver are the points of the root lattice ``L``
of type ``A_n``, stored in coordinates over the simple roots
``alpha_1..alpha_n``; ``alpha_0 = -(alpha_1 + ... + alpha_n)``.  Every vertex
``v`` has one arrow ``a_i: v -> v + alpha_i`` for each ``0 <= i <= n``, and
the relations are the commutativity squares ``a_i a_j = a_j a_i``.

For a cofinite subgroup ``B`` the orbit quiver ``Q/B`` is finite.  A cut is a
set of its arrows meeting every small cycle (one arrow of each index, in any
order) exactly once; the arrows outside the cut span the degree-zero algebra.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Sequence

from .exact_linalg import smith_normal_form
from .quiver_core import AlgebraPresentation, Quiver, compute_basis, make_relation

DEFAULT_BUDGET = 2_000_000


class AtildeError(ValueError):
    pass


class NotCofinite(AtildeError):
    pass


class OmegaNotConstantOnB(AtildeError):
    pass


class NotBounding(AtildeError):
    pass


class InvalidRestrictedCut(AtildeError):
    pass


class DimensionTooLarge(RuntimeError):
    """The brute-force enumeration would exceed the configured budget."""


# ---------------------------------------------------------------------------
# lattice vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeVector:
    coeffs: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def root(cls, n: int, i: int) -> "LatticeVector":
        if i == 0:
            return cls(tuple([-1] * n))
        return cls(tuple(int(k == i - 1) for k in range(n)))

    @classmethod
    def from_extended(cls, c: Sequence[int]) -> "LatticeVector":
        """``sum_k c_k alpha_k`` over ``k = 0..n``."""
        return cls(tuple(int(x) - int(c[0]) for x in c[1:]))

    def extended(self) -> tuple[int, ...]:
        return (0,) + self.coeffs

    def e_coords(self) -> tuple[int, ...]:
        """Coordinates in ``R^{n+1}``; they sum to zero."""
        m = self.coeffs + (0,)
        return (-m[0],) + tuple(m[j] - m[j + 1] for j in range(self.n))

    def omega(self) -> int:
        return sum(self.coeffs) % (self.n + 1)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, k: int) -> "LatticeVector":
        return LatticeVector(tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def permute(self, perm: Sequence[int]) -> "LatticeVector":
        """Apply the linear map ``alpha_k -> alpha_{perm[k]}``."""
        c = self.extended()
        out = [0] * len(c)
        for k, x in enumerate(c):
            out[perm[k]] = x
        return LatticeVector.from_extended(out)


# ---------------------------------------------------------------------------
# subgroups and cosets
# ---------------------------------------------------------------------------


class SubgroupBasis:
    """A subgroup ``B`` of ``L`` generated by the given vectors (alpha coordinates)."""

    def __init__(self, n: int, generators: Iterable[Sequence[int]]):
        gens = [tuple(int(x) for x in g) for g in generators]
        if any(len(g) != n for g in gens):
            raise AtildeError(f"generators must have {n} coordinates")
        self.n = n
        self.generators = gens
        cols = [[g[r] for g in gens] for r in range(n)] if gens else [[] for _ in range(n)]
        d, U, _ = smith_normal_form(cols) if gens else ([], [[int(i == j) for j in range(n)]
                                                           for i in range(n)], None)
        d = list(d) + [0] * (n - len(d))
        if any(x == 0 for x in d):
            raise NotCofinite("the subgroup has infinite index")
        self.invariants = d
        self.U = U
        self._index: dict[tuple[int, ...], int] = {}
        self.representatives: list[LatticeVector] = []
        self._enumerate()

    @classmethod
    def ker_omega(cls, n: int) -> "SubgroupBasis":
        gens = []
        for i in range(n - 1):
            gens.append(tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n)))
        gens.append(tuple(n + 1 if k == n - 1 else 0 for k in range(n)))
        return cls(n, gens)

    @classmethod
    def scaled(cls, n: int, k: int) -> "SubgroupBasis":
        """``k L``."""
        return cls(n, [tuple(k if r == c else 0 for r in range(n)) for c in range(n)])

    @classmethod
    def parse(cls, n: int, text: str) -> "SubgroupBasis":
        text = text.strip()
        if text == "ker-omega":
            return cls.ker_omega(n)
        gens = []
        for part in text.split(";"):
            part = part.strip()
            if part:
                gens.append([int(x) for x in part.replace(",", " ").split()])
        return cls(n, gens)

    @property
    def index(self) -> int:
        out = 1
        for x in self.invariants:
            out *= x
        return out

    def _key(self, v: LatticeVector) -> tuple[int, ...]:
        return tuple(sum(self.U[r][c] * v.coeffs[c] for c in range(self.n)) % self.invariants[r]
                     for r in range(self.n))

    def _enumerate(self) -> None:
        total = self.index
        start = LatticeVector(tuple([0] * self.n))
        seen = {start}
        queue = deque([start])
        steps = [LatticeVector.root(self.n, i) for i in range(1, self.n + 1)]
        steps += [s * -1 for s in steps]
        while queue and len(self.representatives) < total:
            v = queue.popleft()
            key = self._key(v)
            if key not in self._index:
                self._index[key] = len(self.representatives)
                self.representatives.append(v)
            for s in steps:
                w = v + s
                if w not in seen:
                    seen.add(w)
                    queue.append(w)

    def coset(self, v: LatticeVector) -> int:
        return self._index[self._key(v)]

    def contains(self, v: LatticeVector) -> bool:
        return all(x == 0 for x in self._key(v))


# ---------------------------------------------------------------------------
# orbit quivers with cuts
# ---------------------------------------------------------------------------


@dataclass
class OrbitQuiverWithCut:
    n: int
    subgroup: SubgroupBasis
    cut: frozenset[tuple[int, int]] = frozenset()
    roots: list[LatticeVector] = field(default_factory=list)

    def __post_init__(self):
        if not self.roots:
            self.roots = [LatticeVector.root(self.n, i) for i in range(self.n + 1)]

    @property
    def n_vertices(self) -> int:
        return self.subgroup.index

    def target(self, c: int, i: int) -> int:
        return self.subgroup.coset(self.subgroup.representatives[c] + self.roots[i])

    def arrows(self) -> list[tuple[int, int, int]]:
        """``(source coset, index, target coset)`` for every arrow."""
        return [(c, i, self.target(c, i))
                for c in range(self.n_vertices) for i in range(self.n + 1)]

    def degree(self, c: int, i: int) -> int:
        return int((c, i) in self.cut)

    def with_cut(self, cut: Iterable[tuple[int, int]]) -> "OrbitQuiverWithCut":
        return OrbitQuiverWithCut(self.n, self.subgroup, frozenset(cut), self.roots)


def orbit_quiver(n: int, B: SubgroupBasis) -> OrbitQuiverWithCut:
    if B.n != n:
        raise AtildeError("subgroup rank does not match n")
    return OrbitQuiverWithCut(n, B)


def cut_from_omega(n: int, B: SubgroupBasis, k: int) -> OrbitQuiverWithCut:
    """The cut of all arrows starting at vertices with ``omega = k``."""
    for g in B.generators:
        if LatticeVector(g).omega() != 0:
            raise OmegaNotConstantOnB(f"omega({list(g)}) is not 0 mod {n + 1}")
    q = orbit_quiver(n, B)
    k %= n + 1
    cut = {(c, i) for c, v in enumerate(B.representatives) if v.omega() == k
           for i in range(n + 1)}
    return q.with_cut(cut)


@dataclass
class CutCheck:
    valid: bool
    witness: tuple[int, tuple[int, ...], int] | None = None

    def __bool__(self) -> bool:
        return self.valid


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise DimensionTooLarge(f"{count} small cycles exceed the budget {budget}")


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def validate_cut(q: OrbitQuiverWithCut, budget: int = DEFAULT_BUDGET) -> CutCheck:
    """Every small cycle carries exactly one cut arrow.

    A failing check reports ``(start coset, index order, cut arrows met)``.
    """
    _check_budget(_factorial(q.n + 1) * q.n_vertices, budget)
    for c in range(q.n_vertices):
        for order in permutations(range(q.n + 1)):
            v, hits = c, 0
            for i in order:
                hits += q.degree(v, i)
                v = q.target(v, i)
            if hits != 1:
                return CutCheck(False, (c, order, hits))
    return CutCheck(True)


def check_homogeneous(q: OrbitQuiverWithCut) -> bool:
    """Both routes of every commutativity square have the same degree."""
    for c in range(q.n_vertices):
        for i in range(q.n + 1):
            for j in range(i + 1, q.n + 1):
                one = q.degree(c, i) + q.degree(q.target(c, i), j)
                two = q.degree(c, j) + q.degree(q.target(c, j), i)
                if one != two:
                    return False
    return True


def _degree_zero_order(q: OrbitQuiverWithCut) -> list[int] | None:
    """Topological order of the degree-zero subquiver, or None when it has a cycle."""
    m = q.n_vertices
    indeg = [0] * m
    succ: list[list[int]] = [[] for _ in range(m)]
    for c, i, t in q.arrows():
        if not q.degree(c, i):
            succ[c].append(t)
            indeg[t] += 1
    ready = [c for c in range(m) if indeg[c] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        c = heapq.heappop(ready)
        order.append(c)
        for t in succ[c]:
            indeg[t] -= 1
            if indeg[t] == 0:
                heapq.heappush(ready, t)
    return order if len(order) == m else None


def is_bounding(q: OrbitQuiverWithCut) -> tuple[bool, int | None]:
    """Whether degree-zero paths have bounded length, with the longest length."""
    order = _degree_zero_order(q)
    if order is None:
        return False, None
    longest = {c: 0 for c in order}
    for c in order:
        for i in range(q.n + 1):
            if not q.degree(c, i):
                t = q.target(c, i)
                longest[t] = max(longest[t], longest[c] + 1)
    return True, max(longest.values(), default=0)


def _squares(q: OrbitQuiverWithCut, c: int):
    for i in range(q.n + 1):
        for j in range(i + 1, q.n + 1):
            yield i, j


def degree_zero_algebra(q: OrbitQuiverWithCut, name: str | None = None) -> AlgebraPresentation:
    """The degree-zero part of ``Gamma/B`` under the cut grading.

    Vertices are renumbered ``1..N`` in topological order; the arrow of index
    ``i`` out of new vertex ``k`` is named ``a{k}_{i}``.
    """
    order = _degree_zero_order(q)
    if order is None:
        raise NotBounding("the degree-zero subquiver has an oriented cycle")
    if not check_homogeneous(q):
        raise AtildeError("the cut grading is not homogeneous on the commutativity squares")
    new = {c: k for k, c in enumerate(order)}
    names = [str(k + 1) for k in range(len(order))]
    arrows = []
    ids = {}
    for c in order:
        for i in range(q.n + 1):
            if not q.degree(c, i):
                ids[(c, i)] = len(arrows)
                arrows.append((f"a{new[c] + 1}_{i}", names[new[c]], names[new[q.target(c, i)]]))
    quiver = Quiver.build(names, arrows)
    rels = []
    for c in order:
        for i, j in _squares(q, c):
            ti, tj = q.target(c, i), q.target(c, j)
            if (c, i) in ids and (ti, j) in ids and (c, j) in ids and (tj, i) in ids:
                one = quiver.path_from_indices([ids[(c, i)], ids[(ti, j)]])
                two = quiver.path_from_indices([ids[(c, j)], ids[(tj, i)]])
                rels.append(make_relation([(1, one), (-1, two)]))
    return AlgebraPresentation(quiver, tuple(rels), name or f"atilde{q.n}")


def graded_orbit_dims(q: OrbitQuiverWithCut, maxdeg: int) -> list[int]:
    """Total dimension of each degree ``0..maxdeg`` of ``Gamma/B`` under the cut grading.

    A nonzero element of ``e_v Gamma`` is determined by a monomial in the
    arrow indices, so each degree is counted by enumerating monomials.
    """
    if not is_bounding(q)[0]:
        raise NotBounding("graded pieces are infinite for a cut that is not bounding")
    totals = [0] * (maxdeg + 1)
    zero = tuple([0] * (q.n + 1))
    for c in range(q.n_vertices):
        seen = {zero: (c, 0)}
        queue = deque([zero])
        while queue:
            mono = queue.popleft()
            v, deg = seen[mono]
            totals[deg] += 1
            for i in range(q.n + 1):
                d = deg + q.degree(v, i)
                if d > maxdeg:
                    continue
                nxt = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                if nxt not in seen:
                    seen[nxt] = (q.target(v, i), d)
                    queue.append(nxt)
    return totals


# ---------------------------------------------------------------------------
# restricted cuts
# ---------------------------------------------------------------------------


def simplex_vertices(n: int, s: int) -> list[LatticeVector]:
    """Lattice points ``0 >= m_1 >= ... >= m_n >= -s`` in alpha coordinates."""
    out = []
    for m in product(range(-s, 1), repeat=n):
        if all(m[k] >= m[k + 1] for k in range(n - 1)):
            out.append(LatticeVector(tuple(m)))
    out.sort(key=lambda v: tuple(-x for x in v.coeffs))
    return out


@dataclass
class RestrictedCut:
    n: int
    s: int
    cut: frozenset[tuple[tuple[int, ...], int]]

    @property
    def vertices(self) -> list[LatticeVector]:
        return simplex_vertices(self.n, self.s)

    def arrows(self) -> list[tuple[LatticeVector, int, LatticeVector]]:
        inside = set(self.vertices)
        roots = [LatticeVector.root(self.n, i) for i in range(self.n + 1)]
        out = []
        for v in self.vertices:
            for i in range(self.n + 1):
                w = v + roots[i]
                if w in inside:
                    out.append((v, i, w))
        return out

    def degree(self, v: LatticeVector, i: int) -> int:
        return int((v.coeffs, i) in self.cut)

    def to_json(self) -> str:
        data = {"n": self.n, "s": self.s,
                "cut": [{"start": list(v), "index": i} for v, i in sorted(self.cut)]}
        return json.dumps(data, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RestrictedCut":
        data = json.loads(text)
        cut = frozenset((tuple(int(x) for x in e["start"]), int(e["index"])) for e in data["cut"])
        return cls(int(data["n"]), int(data["s"]), cut)


def validate_restricted(rc: RestrictedCut) -> CutCheck:
    """Every small cycle inside the simplex carries exactly one arrow of the cut."""
    inside = set(rc.vertices)
    arrows = {(v.coeffs, i) for v, i, _ in rc.arrows()}
    stray = [a for a in rc.cut if a not in arrows]
    if stray:
        raise InvalidRestrictedCut(f"cut arrow {stray[0]} is not an arrow of the simplex quiver")
    roots = [LatticeVector.root(rc.n, i) for i in range(rc.n + 1)]
    for v in rc.vertices:
        for order in permutations(range(rc.n + 1)):
            w, hits, ok = v, 0, True
            for i in order:
                hits += rc.degree(w, i)
                w = w + roots[i]
                if w not in inside:
                    ok = False
                    break
            if ok and hits != 1:
                return CutCheck(False, (rc.vertices.index(v), order, hits))
    return CutCheck(True)


def extension_scale(n: int, s: int) -> int:
    """``k`` with ``B = kL`` for extending restricted cuts.

    ``k`` is the least multiple of ``s(n+1)`` that is at least ``s + 2``, so
    that distinct translates of the simplex are neither equal nor joined by
    an arrow.  For ``n >= 2`` this is ``s(n+1)`` itself.
    """
    k = s * (n + 1)
    while k < s + 2:
        k += s * (n + 1)
    return k


def restricted_cut_extend(rc: RestrictedCut, budget: int = DEFAULT_BUDGET) -> OrbitQuiverWithCut:
    """Extend a restricted cut to ``Q/B`` with ``B = kL``, ``k`` from :func:`extension_scale`.

    The cut is the orbit of the restricted cut under the group generated by
    the index transpositions ``rho_{i,i+1}`` and the translations
    ``s(alpha_i - alpha_{i+1})``, computed on arrows modulo ``B``.
    """
    check = validate_restricted(rc)
    if not check:
        raise InvalidRestrictedCut(f"small cycle {check.witness} does not meet the cut exactly once")
    n, s = rc.n, rc.s
    B = SubgroupBasis.scaled(n, extension_scale(n, s))
    _check_budget(B.index * (n + 1), budget)
    q = orbit_quiver(n, B)
    roots = q.roots
    perms = []
    for i in range(n + 1):
        p = list(range(n + 1))
        j = (i + 1) % (n + 1)
        p[i], p[j] = p[j], p[i]
        perms.append(p)
    shifts = [(roots[i] - roots[(i + 1) % (n + 1)]) * s for i in range(n + 1)]

    def moves(v: LatticeVector, i: int):
        for p in perms:
            yield v.permute(p), p[i]
        for t in shifts:
            yield v + t, i
            yield v - t, i

    start = [(B.coset(LatticeVector(m)), i) for m, i in rc.cut]
    seen = set(start)
    queue = deque(start)
    while queue:
        c, i = queue.popleft()
        v = B.representatives[c]
        for w, j in moves(v, i):
            key = (B.coset(w), j)
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return q.with_cut(seen)


def _truncated_presentation(vertices: list, arrows: list, squares: list, name: str) -> AlgebraPresentation:
    """Presentation from degree-zero arrows and commutativity squares on a vertex subset.

    ``arrows`` holds ``(key, source, target)``; ``squares`` holds two routes
    (lists of arrow keys, or None when a route leaves the subset).
    """
    names = [f"p{k + 1}" for k in range(len(vertices))]
    pos = {v: k for k, v in enumerate(vertices)}
    named = []
    ids = {}
    for key, src, tgt in arrows:
        ids[key] = len(named)
        named.append((f"b{len(named) + 1}", names[pos[src]], names[pos[tgt]]))
    quiver = Quiver.build(names, named)
    rels = []
    for routes in squares:
        terms = []
        for sign, route in zip((1, -1), routes):
            if route is None:
                continue
            terms.append((sign, quiver.path_from_indices([ids[k] for k in route])))
        if terms:
            rels.append(make_relation(terms))
    return AlgebraPresentation(quiver, tuple(rels), name)


def restricted_algebra(rc: RestrictedCut) -> AlgebraPresentation:
    """Degree-zero part of the simplex algebra under the restricted cut."""
    verts = rc.vertices
    inside = set(verts)
    roots = [LatticeVector.root(rc.n, i) for i in range(rc.n + 1)]
    arrows = [((v, i), v, w) for v, i, w in rc.arrows() if not rc.degree(v, i)]
    zero = {key for key, _, _ in arrows}
    squares = []
    for v in verts:
        for i in range(rc.n + 1):
            for j in range(i + 1, rc.n + 1):
                if v + roots[i] + roots[j] not in inside:
                    continue
                routes = []
                degrees = []
                for a, b in ((i, j), (j, i)):
                    mid = v + roots[a]
                    if mid not in inside:
                        routes.append(None)
                        continue
                    degrees.append(rc.degree(v, a) + rc.degree(mid, b))
                    routes.append([(v, a), (mid, b)])
                if len(set(degrees)) > 1:
                    raise AtildeError("the restricted cut grading is not homogeneous")
                if degrees and degrees[0] == 0:
                    assert all(r is None or all(k in zero for k in r) for r in routes)
                    squares.append(routes)
    return _truncated_presentation(verts, arrows, squares, f"typeA_{rc.n}_{rc.s}")


def idempotent_quotient(q: OrbitQuiverWithCut, rc: RestrictedCut) -> AlgebraPresentation:
    """The degree-zero algebra of ``q`` modulo the vertices outside the simplex."""
    B = q.subgroup
    verts = rc.vertices
    cosets = [B.coset(v) for v in verts]
    if len(set(cosets)) != len(cosets):
        raise AtildeError("simplex vertices are not distinct modulo B")
    keep = {c: k for k, c in enumerate(cosets)}
    arrows = []
    for c in cosets:
        for i in range(q.n + 1):
            t = q.target(c, i)
            if not q.degree(c, i) and t in keep:
                arrows.append(((c, i), verts[keep[c]], verts[keep[t]]))
    squares = []
    for c in cosets:
        for i, j in _squares(q, c):
            ti, tj = q.target(c, i), q.target(c, j)
            one = q.degree(c, i) + q.degree(ti, j)
            two = q.degree(c, j) + q.degree(tj, i)
            if one != two:
                raise AtildeError("the cut grading is not homogeneous")
            end = q.target(ti, j)
            if one or end not in keep:
                continue
            routes = [[(c, i), (ti, j)] if ti in keep else None,
                      [(c, j), (tj, i)] if tj in keep else None]
            squares.append(routes)
    return _truncated_presentation(verts, arrows, squares, f"quotient_{rc.n}_{rc.s}")


def _arrow_counts(p: AlgebraPresentation) -> dict[tuple[str, str], int]:
    out: dict[tuple[str, str], int] = {}
    qv = p.quiver.vertices
    for a in p.quiver.arrows:
        key = (qv[a.source], qv[a.target])
        out[key] = out.get(key, 0) + 1
    return out


def idempotent_quotient_check(q: OrbitQuiverWithCut, rc: RestrictedCut) -> bool:
    """Compare the quotient of the extended degree-zero algebra with the simplex algebra.

    Vertex counts, arrow counts per vertex pair and total dimensions must agree.
    """
    try:
        left = idempotent_quotient(q, rc)
    except AtildeError:
        return False
    right = restricted_algebra(rc)
    if left.quiver.n_vertices != right.quiver.n_vertices:
        return False
    if _arrow_counts(left) != _arrow_counts(right):
        return False
    return compute_basis(left).total_dim == compute_basis(right).total_dim


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def to_dot(q: OrbitQuiverWithCut) -> str:
    lines = ["digraph Q {"]
    for c, v in enumerate(q.subgroup.representatives):
        label = ",".join(str(x) for x in v.coeffs)
        lines.append(f'  v{c} [label="{c}: ({label})"];')
    for c, i, t in q.arrows():
        style = ' style=bold penwidth=3' if q.degree(c, i) else ''
        lines.append(f'  v{c} -> v{t} [label="a{i}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cut_to_json(q: OrbitQuiverWithCut) -> str:
    return json.dumps({"n": q.n, "subgroup": [list(g) for g in q.subgroup.generators],
                       "cut": sorted([list(x) for x in q.cut])}) + "\n"


def cut_from_json(text: str, n: int, B: SubgroupBasis) -> OrbitQuiverWithCut:
    data = json.loads(text)
    entries = data["cut"] if isinstance(data, dict) else data
    return orbit_quiver(n, B).with_cut((int(c), int(i)) for c, i in entries)
