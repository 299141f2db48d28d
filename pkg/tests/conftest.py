import random
from fractions import Fraction
from pathlib import Path

import pytest

from higher_ar.exact_linalg import Echelon, Matrix
from higher_ar.homological import Representation
from higher_ar.quiver_core import compute_basis, load_algebra, parse_algebra

DATA = Path(__file__).resolve().parents[1] / "src" / "higher_ar" / "data"
TEST_DATA = Path(__file__).resolve().parent / "data"

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    num = getattr(report, "criterion", None)
    if num is None:
        return
    status = "PASS" if report.passed else "FAIL"
    prev = _CRITERIA.get(num[0])
    if prev is not None and prev[0] == "FAIL":
        status = "FAIL"
    _CRITERIA[num[0]] = (status, num[1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = (marker.args[0], marker.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        status, title = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {title}")


# ---------------------------------------------------------------------------
# shared algebras
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def beilinson():
    return compute_basis(load_algebra(DATA / "beilinson2.alg"))


@pytest.fixture(scope="session")
def kronecker():
    return compute_basis(load_algebra(DATA / "kronecker.alg"))


@pytest.fixture(scope="session")
def a3():
    return compute_basis(load_algebra(DATA / "a3.alg"))


@pytest.fixture(scope="session")
def a2():
    return compute_basis(load_algebra(DATA / "a2.alg"))


SMALL_ALGEBRAS = {
    "a3": "algebra A3\nvertices: 1 2 3\narrow a : 1 -> 2\narrow b : 2 -> 3\n",
    "a3_zero": "algebra A3z\nvertices: 1 2 3\narrow a : 1 -> 2\narrow b : 2 -> 3\nrelation: a.b\n",
    "kronecker": "algebra K\nvertices: 1 2\narrow x : 1 -> 2\narrow y : 1 -> 2\n",
    "d4": ("algebra D4\nvertices: 1 2 3 4\narrow a : 1 -> 4\narrow b : 2 -> 4\n"
           "arrow c : 3 -> 4\n"),
    "triangle": "algebra T\nvertices: 1 2 3\narrow a : 1 -> 2\narrow b : 2 -> 3\narrow c : 1 -> 3\n",
}


def small_algebra(name):
    return compute_basis(parse_algebra(SMALL_ALGEBRAS[name]))


def random_rep(b, rng: random.Random, max_dim: int = 2, entries=(-1, 0, 1, 2)) -> Representation:
    """A random representation; zero relations of length two are respected by construction."""
    q = b.quiver
    dims = [rng.randint(0, max_dim) for _ in range(q.n_vertices)]
    maps: list[Matrix | None] = [None] * len(q.arrows)
    zero_pairs = {}
    for rel in b.presentation.relations:
        if len(rel.terms) == 1 and len(rel.terms[0][1].arrows) == 2:
            first, second = rel.terms[0][1].arrows
            zero_pairs[first] = second
        elif rel.terms:
            raise ValueError("random_rep supports only zero relations of length two")
    for k, a in enumerate(q.arrows):
        maps[k] = Matrix.from_rows([[Fraction(rng.choice(entries)) for _ in range(dims[a.target])]
                                    for _ in range(dims[a.source])], dims[a.target])
    for first, second in zero_pairs.items():
        # rows of X_first must lie in the left kernel of X_second
        Xs = maps[second]
        a = q.arrows[first]
        left = Echelon(Xs.T).kernel()
        coeffs = Matrix.from_rows([[Fraction(rng.choice(entries)) for _ in range(left.cols)]
                                   for _ in range(dims[a.source])], left.cols)
        maps[first] = coeffs @ left.T
    return Representation(b, dims, maps)


def random_acyclic(rng: random.Random, max_vertices: int = 3, max_arrows: int = 3, tag: str = "R"):
    """A random acyclic quiver, possibly with zero relations of length two."""
    m = rng.randint(1, max_vertices)
    lines = [f"algebra {tag}", "vertices: " + " ".join(str(i + 1) for i in range(m))]
    arrows = []
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    for k in range(rng.randint(0, max_arrows) if pairs else 0):
        i, j = rng.choice(pairs)
        arrows.append((f"x{k}", i, j))
        lines.append(f"arrow x{k} : {i + 1} -> {j + 1}")
    for a, s1, t1 in arrows:
        for b, s2, t2 in arrows:
            if t1 == s2 and rng.random() < 0.5:
                lines.append(f"relation: {a}.{b}")
    return parse_algebra("\n".join(lines) + "\n")
