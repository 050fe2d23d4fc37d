import itertools
from math import gcd

from hypothesis import assume, given
from hypothesis import strategies as st

from feyntope.intlinalg import (
    bareiss_det,
    column_hermite,
    cofactor_normal,
    generates_full_lattice,
    integer_kernel,
    lattice_index,
    lll_reduce,
    primitive,
    rank,
    transpose,
)

from oracles import _det_fraction, solve_fraction

small = st.integers(-4, 4)


def matrices(max_rows=4, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_bareiss_known():
    assert bareiss_det([[2, 0], [0, 3]]) == 6
    assert bareiss_det([[1, 2], [2, 4]]) == 0
    assert bareiss_det([[0, 1], [1, 0]]) == -1


def test_bubble_kernel():
    m = [[1, 1, 1, 1, 1], [1, 0, 2, 1, 0], [0, 1, 0, 1, 2]]
    ker = integer_kernel(m)
    assert len(ker) == 2
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


def test_lattice_index_examples():
    assert lattice_index([[2, 0], [0, 3]]) == 6
    assert lattice_index([[1, 1], [0, 1]]) == 1
    assert lattice_index([[1, 2]]) == 1
    assert lattice_index([[2, 4]]) == 2
    assert lattice_index([[1, 2], [2, 4]]) == 0
    assert generates_full_lattice([[1, 0, 1], [0, 1, 1]])


def test_cofactor_normal_orthogonal():
    rows = [[1, 0, 2], [0, 1, 3]]
    w = cofactor_normal(rows)
    assert all(sum(a * b for a, b in zip(r, w)) == 0 for r in rows)
    assert primitive([4, -6, 0]) == [2, -3, 0]


@given(matrices())
def test_det_matches_fraction_elimination(m):
    n = min(len(m), len(m[0]))
    sq = [row[:n] for row in m[:n]]
    assert bareiss_det(sq) == _det_fraction(sq)


@given(matrices())
def test_hermite_is_unimodular_transform(m):
    h, u, pivots = column_hermite(m)
    cols = len(m[0])
    # H = M U with det U = +-1
    prod = [[sum(m[i][k] * u[k][j] for k in range(cols)) for j in range(cols)] for i in range(len(m))]
    assert prod == h
    assert abs(bareiss_det(u)) == 1
    assert len(pivots) == rank(m)


def _maximal_minor_gcd(vectors):
    k = len(vectors)
    g = 0
    for cols in itertools.combinations(range(len(vectors[0])), k):
        g = gcd(g, bareiss_det([[v[c] for c in cols] for v in vectors]))
    return g


@given(matrices())
def test_kernel_is_saturated_basis(m):
    ker = integer_kernel(m)
    cols = len(m[0])
    assert len(ker) == cols - rank(m)
    for v in ker:
        assert any(v)
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)
    if ker:
        # saturated: a Z-basis of the integer kernel has coprime maximal minors
        assert _maximal_minor_gcd(ker) == 1


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=2, max_size=3))
def test_lll_preserves_lattice(basis):
    assume(rank(basis) == len(basis))
    red = lll_reduce(basis)
    for v in red:
        c = solve_fraction(basis, v)
        assert c is not None and all(x.denominator == 1 for x in c)
    for v in basis:
        c = solve_fraction(red, v)
        assert c is not None and all(x.denominator == 1 for x in c)


@given(matrices())
def test_transpose_involution(m):
    assert transpose(transpose(m)) == m
