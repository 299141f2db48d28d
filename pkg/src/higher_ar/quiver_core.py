"""Quivers with relations, their path-algebra bases, Cartan and Coxeter matrices.

Paths compose left to right: ``a.b`` means "first ``a``, then ``b``", so
``a.b`` is defined when the target of ``a`` is the source of ``b``.
``e_i Lambda e_j`` is spanned by the paths from ``i`` to ``j``; the columns of
the Cartan matrix are therefore the dimension vectors of the projective left
modules ``Lambda e_j``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .exact_linalg import Echelon, Matrix, inverse

DEFAULT_LENGTH_CAP = 64
MAX_PATHS = 400_000


class PresentationError(ValueError):
    """Base class for malformed or unusable presentations."""


class ParseError(PresentationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class UnknownVertex(PresentationError):
    pass


class UnknownArrow(PresentationError):
    pass


class NonParallelRelation(PresentationError):
    pass


class NotAdmissible(PresentationError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


class Path(NamedTuple):
    source: int
    target: int
    arrows: tuple[int, ...] = ()

    def __len__(self) -> int:  # type: ignore[override]
        return len(self.arrows)


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex names")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate arrow names")
        for a in self.arrows:
            if not (0 <= a.source < len(self.vertices) and 0 <= a.target < len(self.vertices)):
                raise UnknownVertex(f"arrow {a.name} has an undeclared endpoint")

    @classmethod
    def build(cls, vertices: Sequence[str], arrows: Iterable[tuple[str, str, str]]) -> "Quiver":
        vidx = {v: i for i, v in enumerate(vertices)}
        out = []
        for name, s, t in arrows:
            if s not in vidx or t not in vidx:
                raise UnknownVertex(f"arrow {name}: unknown vertex {s if s not in vidx else t}")
            out.append(Arrow(name, vidx[s], vidx[t]))
        return cls(tuple(vertices), tuple(out))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def arrow_index(self, name: str) -> int:
        for i, a in enumerate(self.arrows):
            if a.name == name:
                return i
        raise UnknownArrow(f"unknown arrow {name!r}")

    def vertex_index(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise UnknownVertex(f"unknown vertex {name!r}") from None

    def path(self, names: Sequence[str]) -> Path:
        idx = tuple(self.arrow_index(n) for n in names)
        return self.path_from_indices(idx)

    def path_from_indices(self, idx: Sequence[int], source: int | None = None) -> Path:
        idx = tuple(idx)
        if not idx:
            if source is None:
                raise ValueError("trivial path needs a base vertex")
            return Path(source, source, ())
        for a, b in zip(idx, idx[1:]):
            if self.arrows[a].target != self.arrows[b].source:
                raise PresentationError(
                    f"arrows {self.arrows[a].name} and {self.arrows[b].name} do not compose"
                )
        return Path(self.arrows[idx[0]].source, self.arrows[idx[-1]].target, idx)

    def path_name(self, p: Path) -> str:
        if not p.arrows:
            return f"e_{self.vertices[p.source]}"
        return ".".join(self.arrows[a].name for a in p.arrows)

    def out_arrows(self, v: int) -> list[int]:
        return [i for i, a in enumerate(self.arrows) if a.source == v]

    def in_arrows(self, v: int) -> list[int]:
        return [i for i, a in enumerate(self.arrows) if a.target == v]

    def is_acyclic(self) -> bool:
        indeg = [0] * self.n_vertices
        for a in self.arrows:
            indeg[a.target] += 1
        stack = [v for v in range(self.n_vertices) if indeg[v] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for i in self.out_arrows(v):
                t = self.arrows[i].target
                indeg[t] -= 1
                if indeg[t] == 0:
                    stack.append(t)
        return seen == self.n_vertices


@dataclass(frozen=True)
class Relation:
    terms: tuple[tuple[Fraction, Path], ...]

    def __post_init__(self):
        if not self.terms:
            raise PresentationError("empty relation")
        s, t = self.terms[0][1].source, self.terms[0][1].target
        for _, p in self.terms:
            if (p.source, p.target) != (s, t):
                raise NonParallelRelation("relation mixes paths with different endpoints")
            if len(p.arrows) < 2:
                raise NotAdmissible("relation terms must have length at least 2")

    @property
    def source(self) -> int:
        return self.terms[0][1].source

    @property
    def target(self) -> int:
        return self.terms[0][1].target

    def is_homogeneous(self) -> bool:
        return len({len(p.arrows) for _, p in self.terms}) == 1


def make_relation(terms: Iterable[tuple[object, Path]]) -> Relation:
    """Build a relation, merging repeated paths and dropping zero terms."""
    acc: dict[Path, Fraction] = {}
    for c, p in terms:
        acc[p] = acc.get(p, Fraction(0)) + Fraction(c)
    kept = tuple((c, p) for p, c in acc.items() if c != 0)
    return Relation(kept)


@dataclass(frozen=True)
class AlgebraPresentation:
    quiver: Quiver
    relations: tuple[Relation, ...]
    name: str = "A"

    def __post_init__(self):
        if not re.fullmatch(r"\S+", self.name):
            raise PresentationError(f"bad algebra name {self.name!r}")

    def structurally_equal(self, other: "AlgebraPresentation") -> bool:
        return (
            self.name == other.name
            and self.quiver == other.quiver
            and self.relations == other.relations
        )


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_TERM = re.compile(
    rf"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?({_NAME}(?:\.{_NAME})*)\s*"
)
_ARROW = re.compile(rf"arrow\s+({_NAME})\s*:\s*(\S+)\s*->\s*(\S+)$")


def _parse_relation(quiver: Quiver, text: str, line: int) -> Relation:
    pos = 0
    terms = []
    text = text.strip()
    if not text:
        raise ParseError("empty relation", line)
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse relation near {text[pos:]!r}", line)
        sign, coef, path = m.groups()
        if terms and sign is None:
            raise ParseError("missing + or - between terms", line)
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        try:
            p = quiver.path(path.split("."))
        except UnknownArrow as exc:
            raise ParseError(str(exc), line) from None
        except PresentationError as exc:
            raise ParseError(str(exc), line) from None
        terms.append((c, p))
        pos = m.end()
    try:
        return make_relation(terms)
    except NonParallelRelation as exc:
        raise NonParallelRelation(f"line {line}: {exc}") from None
    except NotAdmissible as exc:
        raise NotAdmissible(f"line {line}: {exc}") from None


def parse_algebra(text: str) -> AlgebraPresentation:
    """Parse the line-oriented presentation format."""
    name = None
    vertices: list[str] | None = None
    arrows: list[tuple[str, str, str]] = []
    rel_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("algebra"):
            parts = line.split()
            if len(parts) != 2 or parts[0] != "algebra":
                raise ParseError("expected 'algebra <name>'", lineno)
            if name is not None:
                raise ParseError("duplicate algebra line", lineno)
            name = parts[1]
        elif line.startswith("vertices:"):
            if vertices is not None:
                raise ParseError("duplicate vertices line", lineno)
            vertices = line[len("vertices:"):].split()
            if len(set(vertices)) != len(vertices):
                raise ParseError("duplicate vertex names", lineno)
        elif line.startswith("arrow"):
            m = _ARROW.match(line)
            if not m:
                raise ParseError("expected 'arrow <name> : <src> -> <tgt>'", lineno)
            if vertices is None:
                raise ParseError("arrow before vertices line", lineno)
            a, s, t = m.groups()
            for v in (s, t):
                if v not in vertices:
                    raise UnknownVertex(f"line {lineno}: unknown vertex {v!r}")
            arrows.append((a, s, t))
        elif line.startswith("relation:"):
            rel_lines.append((lineno, line[len("relation:"):]))
        else:
            raise ParseError(f"unrecognised line {line!r}", lineno)
    if name is None:
        raise ParseError("missing 'algebra <name>' line")
    if vertices is None:
        raise ParseError("missing 'vertices:' line")
    try:
        quiver = Quiver.build(vertices, arrows)
    except PresentationError as exc:
        if isinstance(exc, UnknownVertex):
            raise
        raise ParseError(str(exc)) from None
    relations = tuple(_parse_relation(quiver, body, ln) for ln, body in rel_lines)
    return AlgebraPresentation(quiver, relations, name)


def _fmt_coef(c: Fraction) -> str:
    c = abs(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_relation(quiver: Quiver, rel: Relation) -> str:
    out = []
    for k, (c, p) in enumerate(rel.terms):
        body = f"{_fmt_coef(c)}*{quiver.path_name(p)}"
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def format_algebra(p: AlgebraPresentation) -> str:
    q = p.quiver
    lines = [f"algebra {p.name}", "vertices: " + " ".join(q.vertices)]
    for a in q.arrows:
        lines.append(f"arrow {a.name} : {q.vertices[a.source]} -> {q.vertices[a.target]}")
    for r in p.relations:
        lines.append("relation: " + format_relation(q, r))
    return "\n".join(lines) + "\n"


def load_algebra(path) -> AlgebraPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class AlgebraBasis:
    """A basis of ``KQ/I`` by paths, with expansions of every other path.

    ``basis[(i, j)]`` lists the basis paths from ``i`` to ``j``.
    ``expansion`` maps every path shorter than ``cutoff`` to a dict
    ``{position in basis[(s, t)]: coefficient}``; longer paths are zero.
    """

    presentation: AlgebraPresentation
    basis: dict[tuple[int, int], list[Path]]
    expansion: dict[Path, dict[int, Fraction]]
    cutoff: int
    cache: dict = field(default_factory=dict, repr=False)
    _left: dict = field(default_factory=dict, repr=False)
    _right: dict = field(default_factory=dict, repr=False)

    @property
    def quiver(self) -> Quiver:
        return self.presentation.quiver

    @property
    def n_vertices(self) -> int:
        return self.quiver.n_vertices

    def dim(self, i: int, j: int) -> int:
        return len(self.basis.get((i, j), ()))

    @property
    def total_dim(self) -> int:
        return sum(len(b) for b in self.basis.values())

    @property
    def nilpotency_degree(self) -> int:
        return max((len(p.arrows) for b in self.basis.values() for p in b), default=0)

    def expand(self, p: Path) -> dict[int, Fraction]:
        if len(p.arrows) >= self.cutoff:
            return {}
        return self.expansion[p]

    def concat(self, p: Path, q: Path) -> Path:
        if p.target != q.source:
            raise ValueError("paths do not compose")
        return Path(p.source, q.target, p.arrows + q.arrows)

    def left_mult(self, b: int, i: int, j: int, k: int) -> Matrix:
        """Matrix of ``y -> b y`` from ``e_j L e_k`` to ``e_i L e_k``.

        ``b`` indexes ``basis[(i, j)]``.
        """
        key = (b, i, j, k)
        if key not in self._left:
            src = self.basis.get((j, k), [])
            dst = self.dim(i, k)
            num = np.zeros((dst, len(src)), dtype=object)
            p = self.basis[(i, j)][b]
            for c, q in enumerate(src):
                for pos, coef in self.expand(self.concat(p, q)).items():
                    num[pos, c] += coef
            self._left[key] = _fraction_matrix(num)
        return self._left[key]

    def right_mult(self, b: int, j: int, k: int, i: int) -> Matrix:
        """Matrix of ``x -> x b`` from ``e_i L e_j`` to ``e_i L e_k``.

        ``b`` indexes ``basis[(j, k)]``.
        """
        key = (b, j, k, i)
        if key not in self._right:
            src = self.basis.get((i, j), [])
            dst = self.dim(i, k)
            num = np.zeros((dst, len(src)), dtype=object)
            q = self.basis[(j, k)][b]
            for c, p in enumerate(src):
                for pos, coef in self.expand(self.concat(p, q)).items():
                    num[pos, c] += coef
            self._right[key] = _fraction_matrix(num)
        return self._right[key]

    def arrow_element(self, a: int) -> tuple[int, int, dict[int, Fraction]]:
        arrow = self.quiver.arrows[a]
        p = Path(arrow.source, arrow.target, (a,))
        return arrow.source, arrow.target, self.expand(p)

    def element_left(self, coeffs: dict[int, Fraction], i: int, j: int, k: int) -> Matrix:
        """Left multiplication by ``sum coeffs[b] basis[(i,j)][b]`` into ``e_i L e_k``."""
        out = Matrix.zeros(self.dim(i, k), self.dim(j, k))
        for b, c in coeffs.items():
            if c:
                out = out + self.left_mult(b, i, j, k).scale(c)
        return out

    def element_right(self, coeffs: dict[int, Fraction], j: int, k: int, i: int) -> Matrix:
        out = Matrix.zeros(self.dim(i, k), self.dim(i, j))
        for b, c in coeffs.items():
            if c:
                out = out + self.right_mult(b, j, k, i).scale(c)
        return out

    def multiply(self, x: dict[int, Fraction], i: int, j: int,
                 y: dict[int, Fraction], k: int) -> dict[int, Fraction]:
        """Product of ``x`` in ``e_i L e_j`` and ``y`` in ``e_j L e_k``."""
        out: dict[int, Fraction] = {}
        for bx, cx in x.items():
            p = self.basis[(i, j)][bx]
            for by, cy in y.items():
                q = self.basis[(j, k)][by]
                for pos, c in self.expand(self.concat(p, q)).items():
                    out[pos] = out.get(pos, Fraction(0)) + cx * cy * c
        return {k_: v for k_, v in out.items() if v}

    def check_closure(self) -> None:
        """Every product of composable basis paths re-expands in the basis."""
        for (i, j), left in self.basis.items():
            for k in range(self.n_vertices):
                for q in self.basis.get((j, k), []):
                    for p in left:
                        exp = self.expand(self.concat(p, q))
                        if any(pos >= self.dim(i, k) for pos in exp):
                            raise AssertionError("basis is not closed under multiplication")


def _fraction_matrix(num: np.ndarray) -> Matrix:
    rows = [[Fraction(x) for x in row] for row in num]
    if not rows:
        return Matrix.zeros(num.shape[0], num.shape[1])
    return Matrix.from_rows(rows, num.shape[1])


def compute_basis(p: AlgebraPresentation, length_cap: int = DEFAULT_LENGTH_CAP) -> AlgebraBasis:
    """Certify admissibility and compute a path basis of ``KQ/I``.

    Paths are examined in order of length.  At truncation ``N`` the algebra
    ``KQ/(I + J^N)`` is computed pair of vertices by pair of vertices; the
    first ``N`` at which every path of length ``N-1`` already vanishes gives
    ``KQ/I`` (for homogeneous relations this is the per-length computation).
    Basis paths are the standard ones: shortest first, then earliest in arrow
    declaration order.
    """
    if length_cap < 1:
        raise ValueError("length_cap must be at least 1")
    q = p.quiver
    layers = [[Path(v, v, ()) for v in range(q.n_vertices)]]
    out_by_vertex = [q.out_arrows(v) for v in range(q.n_vertices)]
    relations = p.relations
    homogeneous = all(r.is_homogeneous() for r in relations)
    min_len = min((min(len(t[1].arrows) for t in r.terms) for r in relations), default=0)
    total = q.n_vertices
    N = 1
    while True:
        N += 1
        # extend layers to length N-1
        while len(layers) < N:
            nxt = [
                Path(pp.source, q.arrows[a].target, pp.arrows + (a,))
                for pp in layers[-1]
                for a in out_by_vertex[pp.target]
            ]
            total += len(nxt)
            if total > MAX_PATHS:
                raise NotAdmissible(
                    f"more than {MAX_PATHS} paths up to length {len(layers)}; "
                    "the ideal is not admissible or the cap is too high"
                )
            layers.append(nxt)
        if not layers[N - 1]:
            return _finish_basis(p, layers, N, relations, homogeneous)
        if N - 1 > length_cap:
            raise NotAdmissible(
                f"nonzero path classes survive at length {length_cap}; "
                "ideal not admissible or length cap too low"
            )
        if N - 1 < min_len or not relations:
            continue
        result = _finish_basis(p, layers, N, relations, homogeneous)
        if not any(len(b.arrows) == N - 1 for bs in result.basis.values() for b in bs):
            return result


def _ideal_rows(q: Quiver, layers, N: int, relations, homogeneous: bool, top_only: bool):
    """Spanning set of ``(I + J^N)/J^N`` as ``{(s,t): [ {path: coef} ]}``."""
    ends: dict[int, list[Path]] = {}
    starts: dict[int, list[Path]] = {}
    for layer in layers[:N]:
        for pp in layer:
            ends.setdefault(pp.target, []).append(pp)
            starts.setdefault(pp.source, []).append(pp)
    rows: dict[tuple[int, int], list[dict[Path, Fraction]]] = {}
    for r in relations:
        rmin = min(len(t[1].arrows) for t in r.terms)
        for u in ends.get(r.source, []):
            lu = len(u.arrows)
            if lu + rmin >= N:
                continue
            for w in starts.get(r.target, []):
                lw = len(w.arrows)
                if lu + rmin + lw >= N:
                    continue
                if homogeneous and top_only and lu + rmin + lw != N - 1:
                    continue
                vec: dict[Path, Fraction] = {}
                for c, t in r.terms:
                    full = Path(u.source, w.target, u.arrows + t.arrows + w.arrows)
                    if len(full.arrows) < N:
                        vec[full] = vec.get(full, Fraction(0)) + c
                vec = {k: v for k, v in vec.items() if v}
                if vec:
                    rows.setdefault((u.source, w.target), []).append(vec)
    return rows


def _finish_basis(p, layers, N, relations, homogeneous) -> AlgebraBasis:
    q = p.quiver
    by_pair: dict[tuple[int, int], list[Path]] = {}
    for layer in layers[:N]:
        for pp in layer:
            by_pair.setdefault((pp.source, pp.target), []).append(pp)
    rows = _ideal_rows(q, layers, N, relations, homogeneous, top_only=False)
    basis: dict[tuple[int, int], list[Path]] = {}
    expansion: dict[Path, dict[int, Fraction]] = {}
    for pair, paths in by_pair.items():
        cols = sorted(paths, key=lambda t: (len(t.arrows), t.arrows), reverse=True)
        col_index = {pp: c for c, pp in enumerate(cols)}
        gens = rows.get(pair, [])
        if gens:
            mat = Matrix.from_rows(
                [[vec.get(pp, 0) for pp in cols] for vec in gens], len(cols)
            )
            ech = Echelon(mat)
            pivots, free = ech.pivots, ech.free
        else:
            ech = None
            pivots, free = [], list(range(len(cols)))
        # basis: free columns, ordered shortest first / lexicographic
        free_paths = sorted((cols[c] for c in free), key=lambda t: (len(t.arrows), t.arrows))
        pos_of = {pp: k for k, pp in enumerate(free_paths)}
        basis[pair] = free_paths
        for pp in free_paths:
            expansion[pp] = {pos_of[pp]: Fraction(1)}
        if pivots:
            R = ech.rows
            for k, pc in enumerate(pivots):
                vec = {}
                for c in free:
                    val = R[k, c]
                    if val:
                        vec[pos_of[cols[c]]] = -val
                expansion[cols[pc]] = vec
    basis = {k: v for k, v in basis.items() if v}
    return AlgebraBasis(p, basis, expansion, N)


def cartan_matrix(b: AlgebraBasis) -> Matrix:
    m = b.n_vertices
    return Matrix.from_int(np.array([[b.dim(i, j) for j in range(m)] for i in range(m)],
                                    dtype=np.int64).reshape(m, m))


def coxeter_matrix(c: Matrix, n: int) -> tuple[Matrix, Matrix]:
    """``(Phi, Phi^{-1})`` with ``Phi = (-1)^n C^t C^{-1}``."""
    cinv = inverse(c)
    phi = (c.T @ cinv).scale((-1) ** n)
    phi_inv = (c @ inverse(c.T)).scale((-1) ** n)
    return phi, phi_inv


def _op_name(name: str) -> str:
    return name[: -len("_op")] if name.endswith("_op") else name + "_op"


def opposite_algebra(p: AlgebraPresentation) -> AlgebraPresentation:
    q = p.quiver
    arrows = tuple(Arrow(a.name, a.target, a.source) for a in q.arrows)
    q_op = Quiver(q.vertices, arrows)
    rels = []
    for r in p.relations:
        terms = tuple(
            (c, Path(t.target, t.source, tuple(reversed(t.arrows)))) for c, t in r.terms
        )
        rels.append(Relation(terms))
    return AlgebraPresentation(q_op, tuple(rels), _op_name(p.name))


def semisimple(k: int, name: str = "K") -> AlgebraPresentation:
    q = Quiver(tuple(str(i + 1) for i in range(k)), ())
    return AlgebraPresentation(q, (), name)
