"""Deciding n-representation finite versus n-representation infinite.

For every indecomposable projective ``P`` the iterates ``nu_n^{-i}(P)`` are
followed: a branch ends when it reaches an injective module, it advances by
``tau_n^-`` while ``Ext^j(D L, X)`` vanishes for ``j < n``, and any other
outcome is a concrete witness that the algebra is not n-hereditary.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Union

from .exact_linalg import Matrix, det, matrix_power
from .homological import (
    AboveCap,
    ExtProfile,
    Representation,
    dual,
    ext_profile,
    global_dimension,
    hom_space,
    injective_rep,
    is_injective,
    nu_inverse_profile,
    opposite_basis,
    projective_rep,
    tau_n_minus,
)
from .quiver_core import AlgebraBasis, AlgebraPresentation, cartan_matrix, compute_basis, coxeter_matrix

FINITE = "NRepresentationFinite"
INFINITE = "NRepresentationInfiniteToDepth"
NOT_HEREDITARY = "NotNHereditary"
GLDIM_EXCEEDED = "GlobalDimensionExceedsN"


class BudgetExceeded(RuntimeError):
    """A module along a trajectory grew beyond the allowed total dimension."""


class StoppedEarly(RuntimeError):
    """A preprojective or preinjective family left ``mod L`` before the requested depth."""

    def __init__(self, message: str, partial: list):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class ReachedInjective:
    ell: int


@dataclass(frozen=True)
class ModuleToDepth:
    depth: int


@dataclass(frozen=True)
class NonModuleWitness:
    vertex: int
    step: int
    degree: int
    dim: int


Outcome = Union[ReachedInjective, ModuleToDepth, NonModuleWitness]


@dataclass
class Step:
    module: Representation
    profile: ExtProfile
    injective: bool


@dataclass
class Trajectory:
    vertex: int
    steps: list[Step]
    outcome: Outcome

    @property
    def dim_vectors(self) -> list[list[int]]:
        return [list(s.module.dims) for s in self.steps]


@dataclass
class Verdict:
    algebra: str
    n: int
    depth: int
    overall: str
    trajectories: list[Trajectory] = field(default_factory=list)
    witness: dict | None = None
    global_dimension: int | None = None

    def to_dict(self) -> dict:
        out = {
            "algebra": self.algebra,
            "n": self.n,
            "depth": self.depth,
            "overall": self.overall,
            "trajectories": [],
        }
        for t in self.trajectories:
            entry = {
                "vertex": t.vertex,
                "outcome": _outcome_dict(t.outcome),
                "dim_vectors": t.dim_vectors,
            }
            if isinstance(t.outcome, NonModuleWitness):
                entry["witness"] = _outcome_dict(t.outcome)
            out["trajectories"].append(entry)
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _outcome_dict(o: Outcome) -> dict:
    if isinstance(o, ReachedInjective):
        return {"kind": "ReachedInjective", "ell": o.ell}
    if isinstance(o, ModuleToDepth):
        return {"kind": "ModuleToDepth", "depth": o.depth}
    return {"kind": "NonModuleWitness", "vertex": o.vertex, "step": o.step,
            "degree": o.degree, "dim": o.dim}


def _basis(p: AlgebraPresentation | AlgebraBasis) -> AlgebraBasis:
    return p if isinstance(p, AlgebraBasis) else compute_basis(p)


def trajectory(b: AlgebraBasis, v: int, n: int, depth: int,
               budget: int | None = None) -> Trajectory:
    X = projective_rep(b, v)
    steps: list[Step] = []
    for i in range(depth + 1):
        if budget is not None and X.total_dim > budget:
            raise BudgetExceeded(f"step {i} at vertex {b.quiver.vertices[v]} has dimension "
                                 f"{X.total_dim} > {budget}")
        inj = is_injective(X)
        prof = nu_inverse_profile(X, n)
        steps.append(Step(X, prof, inj))
        if inj:
            return Trajectory(v, steps, ReachedInjective(i))
        bad = [j for j in range(n) if prof[j]]
        if bad:
            j = bad[0]
            return Trajectory(v, steps, NonModuleWitness(v, i, j, prof[j]))
        if i < depth:
            X = tau_n_minus(X, n)
    return Trajectory(v, steps, ModuleToDepth(depth))


def classify(p: AlgebraPresentation | AlgebraBasis, n: int, depth: int,
             budget: int | None = None) -> Verdict:
    if n < 1 or depth < 1:
        raise ValueError("n and depth must be at least 1")
    b = _basis(p)
    name = b.presentation.name
    try:
        gd = global_dimension(b, n)
    except AboveCap:
        return Verdict(name, n, depth, GLDIM_EXCEEDED)
    trajs = [trajectory(b, v, n, depth, budget) for v in range(b.n_vertices)]
    kinds = {type(t.outcome) for t in trajs}
    witness = None
    if NonModuleWitness in kinds:
        overall = NOT_HEREDITARY
        w = next(t.outcome for t in trajs if isinstance(t.outcome, NonModuleWitness))
        witness = _outcome_dict(w)
    elif kinds == {ReachedInjective}:
        overall = FINITE
    elif kinds == {ModuleToDepth}:
        overall = INFINITE
    else:
        overall = NOT_HEREDITARY
        fin = next(t for t in trajs if isinstance(t.outcome, ReachedInjective))
        inf = next(t for t in trajs if isinstance(t.outcome, ModuleToDepth))
        witness = {"kind": "Mixed", "injective_vertex": fin.vertex,
                   "ell": fin.outcome.ell, "module_vertex": inf.vertex, "depth": depth}
    return Verdict(name, n, depth, overall, trajs, witness, gd)


# ---------------------------------------------------------------------------
# preprojective and preinjective families
# ---------------------------------------------------------------------------


def preprojective_family(p, n: int, depth: int) -> list[tuple[int, int, Representation]]:
    """``(i, v, tau_n^{-i}(L e_v))`` for ``0 <= i <= depth``, ordered by ``i`` then ``v``.

    A branch that reaches an injective stops there, since the next iterate is zero.
    """
    b = _basis(p)
    current = {v: projective_rep(b, v) for v in range(b.n_vertices)}
    out: list[tuple[int, int, Representation]] = []
    for i in range(depth + 1):
        nxt = {}
        for v in range(b.n_vertices):
            X = current.get(v)
            if X is None or X.is_zero():
                continue
            out.append((i, v, X))
            if i == depth:
                continue
            if is_injective(X):
                continue
            prof = nu_inverse_profile(X, n)
            if not prof.vanishes_below(n):
                raise StoppedEarly(
                    f"nu_n^-{i + 1} of the projective at vertex {b.quiver.vertices[v]} "
                    "is not a module", [m for _, _, m in out])
            nxt[v] = tau_n_minus(X, n)
        current = nxt
    return out


def preprojectives(p, n: int, depth: int) -> list[Representation]:
    return [m for _, _, m in preprojective_family(p, n, depth)]


def preinjective_family(p, n: int, depth: int) -> list[tuple[int, int, Representation]]:
    """``(i, v, tau_n^{i}(D(e_v L)))``, computed over the opposite algebra and dualized."""
    b = _basis(p)
    bop = opposite_basis(b)
    try:
        fam = preprojective_family(bop, n, depth)
    except StoppedEarly as exc:
        raise StoppedEarly(str(exc), [dual(m) for m in exc.partial]) from None
    return [(i, v, dual(m)) for i, v, m in fam]


def preinjectives(p, n: int, depth: int) -> list[Representation]:
    return [m for _, _, m in preinjective_family(p, n, depth)]


# ---------------------------------------------------------------------------
# reports and predictions
# ---------------------------------------------------------------------------


@dataclass
class OrthogonalityReport:
    hom: list[list[int]]
    ext: dict[int, list[list[int]]]

    @property
    def all_orthogonal(self) -> bool:
        return all(x == 0 for table in self.ext.values() for row in table for x in row)


def ext_orthogonality_report(mods: list[Representation], n: int) -> OrthogonalityReport:
    """Pairwise ``dim Hom`` and ``dim Ext^i`` for ``0 < i < n``; entry ``[a][b]`` is (mods[a], mods[b])."""
    k = len(mods)
    hom = [[0] * k for _ in range(k)]
    ext = {i: [[0] * k for _ in range(k)] for i in range(1, n)}
    cap = max(n - 1, 0)
    for a, X in enumerate(mods):
        for c, Y in enumerate(mods):
            prof = ext_profile(X, Y, cap)
            hom[a][c] = prof[0]
            for i in range(1, n):
                ext[i][a][c] = prof[i]
    return OrthogonalityReport(hom, ext)


def dimvec_predict(p, n: int, ell: int) -> tuple[Matrix, Matrix]:
    """``(Phi^{-ell} C, Phi^{ell} C^t)``: predicted dimension vectors of both families."""
    b = _basis(p)
    C = cartan_matrix(b)
    phi, phi_inv = coxeter_matrix(C, n)
    return matrix_power(phi_inv, ell) @ C, matrix_power(phi, ell) @ C.T


# ---------------------------------------------------------------------------
# isomorphism
# ---------------------------------------------------------------------------


def _invertible(blocks) -> bool:
    return all(m.rows == m.cols and (m.rows == 0 or det(m) != 0) for m in blocks)


def is_isomorphic(X: Representation, Y: Representation, tries: int = 20,
                  grid: tuple[int, ...] = (-1, 0, 1, 2), grid_limit: int = 6) -> bool:
    """Exact isomorphism test: equal dimension vectors and an invertible homomorphism."""
    if X.dims != Y.dims:
        return False
    if X.is_zero():
        return True
    basis = hom_space(X, Y)
    if not basis:
        return False

    def combo(coeffs):
        blocks = []
        for v in range(X.n_vertices):
            acc = Matrix.zeros(Y.dims[v], X.dims[v])
            for c, f in zip(coeffs, basis):
                if c:
                    acc = acc + f.blocks[v].scale(c)
            blocks.append(acc)
        return blocks

    for seed in range(tries):
        rng = random.Random(seed)
        coeffs = [Fraction(rng.randint(-50, 50)) for _ in basis]
        if _invertible(combo(coeffs)):
            return True
    if len(basis) <= grid_limit:
        for coeffs in product(grid, repeat=len(basis)):
            if _invertible(combo(coeffs)):
                return True
    return False


def injective_targets(b: AlgebraBasis, verdict: Verdict) -> list[int | None]:
    """For a finite verdict: the vertex ``u`` with ``nu_n^{-ell}(P) = D(e_u L)``, per branch."""
    out = []
    for t in verdict.trajectories:
        if not isinstance(t.outcome, ReachedInjective):
            out.append(None)
            continue
        last = t.steps[-1].module
        hit = None
        for u in range(b.n_vertices):
            I = injective_rep(b, u)
            if I.dims == last.dims and is_isomorphic(last, I):
                hit = u
                break
        out.append(hit)
    return out
