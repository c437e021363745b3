"""Exact linear algebra: rank, kernel, affine solve, membership.

The oracle for rank is a plain dense row reduction over Fraction
written here from scratch; it shares no code with the fraction-free
path under test.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homlink.exactla import RatMatrix, Subspace, kernel_basis, membership, rank, solve_affine


def dense_rref_rank(rows, ncols):
    mat = [[Fraction(x) for x in row] for row in rows]
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        r += 1
    return r


def from_dense(rows, ncols):
    return RatMatrix.from_rows(
        [{j: Fraction(x) for j, x in enumerate(row) if x} for row in rows], ncols
    )


def test_rank_hand_matrix():
    assert rank(from_dense([[1, 2, 3], [2, 4, 6], [0, 1, 1]], 3)) == 2


def test_kernel_of_known_matrix():
    # x + y + z = 0, x - z = 0  ->  kernel spanned by (1, -2, 1)
    ker = kernel_basis(from_dense([[1, 1, 1], [1, 0, -1]], 3))
    assert ker.dim == 1
    (v,) = ker.basis
    x, y, z = v
    assert x == z and y == -2 * x and x != 0


def test_solve_affine_exact():
    sol = solve_affine(from_dense([[2, 0], [0, 3]], 2), [Fraction(1), Fraction(1)])
    assert sol is not None
    particular, hom = sol
    assert particular == (Fraction(1, 2), Fraction(1, 3))
    assert hom.dim == 0


def test_solve_affine_underdetermined():
    sol = solve_affine(from_dense([[1, 1]], 2), [Fraction(3)])
    assert sol is not None
    particular, hom = sol
    assert sum(particular) == 3
    assert hom.dim == 1


def test_solve_affine_inconsistent():
    assert solve_affine(from_dense([[1, 1], [1, 1]], 2), [0, 1]) is None


def test_membership():
    ker = kernel_basis(from_dense([[1, 1, 1]], 3))
    assert membership(ker, [Fraction(1), Fraction(-1), Fraction(0)])
    assert not membership(ker, [Fraction(1), Fraction(0), Fraction(0)])


def test_out_of_range_entry_rejected():
    m = RatMatrix(2, 2)
    with pytest.raises(IndexError):
        m[0, 5] = Fraction(1)


small_entries = st.integers(min_value=-4, max_value=4)


@st.composite
def dense_matrices(draw):
    ncols = draw(st.integers(min_value=1, max_value=5))
    nrows = draw(st.integers(min_value=1, max_value=5))
    rows = [[draw(small_entries) for _ in range(ncols)] for _ in range(nrows)]
    return rows, ncols


@settings(max_examples=60, deadline=None)
@given(dense_matrices())
def test_rank_matches_dense_oracle(mat):
    rows, ncols = mat
    assert rank(from_dense(rows, ncols)) == dense_rref_rank(rows, ncols)


@settings(max_examples=60, deadline=None)
@given(dense_matrices())
def test_rank_plus_kernel_dim(mat):
    rows, ncols = mat
    m = from_dense(rows, ncols)
    ker = kernel_basis(m)
    assert rank(m) + ker.dim == ncols
    # every kernel vector actually annihilates the matrix
    for v in ker.basis:
        assert not any(m.matvec(v))


@settings(max_examples=40, deadline=None)
@given(dense_matrices())
def test_elimination_deterministic(mat):
    rows, ncols = mat
    a = kernel_basis(from_dense(rows, ncols))
    b = kernel_basis(from_dense(rows, ncols))
    assert a == b and a.pivots() == b.pivots()


@settings(max_examples=40, deadline=None)
@given(dense_matrices())
def test_solve_affine_residual(mat):
    rows, ncols = mat
    m = from_dense(rows, ncols)
    b = [Fraction(sum(row)) for row in rows]  # consistent by construction
    sol = solve_affine(m, b)
    assert sol is not None
    particular, hom = sol
    assert list(m.matvec(particular)) == b
    assert hom == kernel_basis(m)


def test_subspace_echelon_equality():
    a = Subspace.from_vectors(3, [(1, 1, 0), (0, 1, 1)])
    b = Subspace.from_vectors(3, [(1, 2, 1), (1, 0, -1)])
    assert a == b
