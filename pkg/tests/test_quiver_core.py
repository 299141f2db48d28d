import pytest

from conftest import DATA, SMALL_ALGEBRAS, small_algebra
from higher_ar.exact_linalg import Matrix, inverse
from higher_ar.quiver_core import (
    NonParallelRelation,
    NotAdmissible,
    ParseError,
    UnknownVertex,
    cartan_matrix,
    compute_basis,
    coxeter_matrix,
    format_algebra,
    load_algebra,
    opposite_algebra,
    parse_algebra,
    semisimple,
)


def _ints(m: Matrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in m.tolist()]


@pytest.mark.parametrize("path", sorted(DATA.glob("*.alg")), ids=lambda p: p.stem)
def test_shipped_files_round_trip(path):
    text = path.read_text()
    p = parse_algebra(text)
    assert format_algebra(p) == text
    assert parse_algebra(format_algebra(p)).structurally_equal(p)


@pytest.mark.parametrize("name", sorted(SMALL_ALGEBRAS))
def test_small_round_trip(name):
    p = parse_algebra(SMALL_ALGEBRAS[name])
    assert parse_algebra(format_algebra(p)).structurally_equal(p)


@pytest.mark.parametrize("text, exc", [
    ("vertices: 1 2\n", ParseError),
    ("algebra A\narrow a : 1 -> 2\n", ParseError),
    ("algebra A\nvertices: 1 2\narrow a : 1 -> 3\n", UnknownVertex),
    ("algebra A\nvertices: 1 1\n", ParseError),
    ("algebra A\nvertices: 1 2\narrow a : 1 -> 2\nrelation: a.zz\n", ParseError),
    ("algebra A\nvertices: 1 2\nbogus line\n", ParseError),
    ("algebra A\nvertices: 1 2 3\narrow a : 1 -> 2\narrow b : 2 -> 3\narrow c : 1 -> 2\n"
     "relation: a.b + c\n", NonParallelRelation),
    ("algebra A\nvertices: 1 2\narrow a : 1 -> 2\nrelation: a\n", NotAdmissible),
    ("algebra A\nvertices: 1\narrow x : 1 -> 1\n", None),
])
def test_bad_presentations(text, exc):
    if exc is None:
        # a loop with no relations is not admissible; rejected at basis time
        with pytest.raises(NotAdmissible):
            compute_basis(parse_algebra(text), length_cap=8)
        return
    with pytest.raises(exc):
        compute_basis(parse_algebra(text))


def test_comments_and_blank_lines():
    p = parse_algebra("# header\nalgebra A  # name\n\nvertices: 1 2\narrow a : 1 -> 2\n")
    assert p.name == "A" and len(p.quiver.arrows) == 1


def test_beilinson_cartan_and_coxeter(beilinson):
    C = cartan_matrix(beilinson)
    assert _ints(C) == [[1, 3, 6], [0, 1, 3], [0, 0, 1]]
    phi, phi_inv = coxeter_matrix(C, 2)
    assert _ints(phi) == [[1, -3, 3], [3, -8, 6], [6, -15, 10]]
    assert phi @ phi_inv == Matrix.identity(3)
    assert beilinson.total_dim == 15


def test_small_cartan_values(a3, kronecker):
    assert _ints(cartan_matrix(a3)) == [[1, 1, 1], [0, 1, 1], [0, 0, 1]]
    assert _ints(cartan_matrix(kronecker)) == [[1, 2], [0, 1]]
    assert _ints(cartan_matrix(small_algebra("a3_zero"))) == [[1, 1, 0], [0, 1, 1], [0, 0, 1]]


@pytest.mark.parametrize("name", sorted(SMALL_ALGEBRAS))
def test_opposite_transposes_cartan(name):
    b = small_algebra(name)
    bop = compute_basis(opposite_algebra(b.presentation))
    assert cartan_matrix(bop) == cartan_matrix(b).T
    assert opposite_algebra(opposite_algebra(b.presentation)).structurally_equal(b.presentation)


@pytest.mark.parametrize("name", sorted(SMALL_ALGEBRAS))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_coxeter_inverse(name, n):
    C = cartan_matrix(small_algebra(name))
    phi, phi_inv = coxeter_matrix(C, n)
    assert phi @ phi_inv == Matrix.identity(C.rows)
    assert phi_inv == inverse(phi)


def test_basis_closure_and_multiplication(beilinson):
    beilinson.check_closure()
    assert beilinson.nilpotency_degree == 2


def test_semisimple():
    b = compute_basis(semisimple(3))
    assert b.total_dim == 3
    assert cartan_matrix(b) == Matrix.identity(3)


def test_length_cap_rejected():
    p = load_algebra(DATA / "a3.alg")
    with pytest.raises(ValueError):
        compute_basis(p, length_cap=0)
