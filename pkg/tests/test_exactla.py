import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from multiproj.exactla import (DEFAULT_PRIME, DimensionMismatch, Subspace, batched_rank, check_modulus,
                               coker_dim, inv_mod, is_prime, kernel_basis, kernel_rows, matmul_mod, rank,
                               rank_rational, rref, subspace_sum)
from sympy_oracle import rank_mod

P = DEFAULT_PRIME
SMALL_P = 1048583  # a prime just above 2^20

entries = st.integers(min_value=0, max_value=P - 1)
small_entries = st.integers(min_value=0, max_value=3)


def matrices(elements=entries, max_side=6):
    shape = st.tuples(st.integers(0, max_side), st.integers(1, max_side))
    return shape.flatmap(lambda s: arrays(np.int64, s, elements=elements))


def test_trivial_ranks():
    assert rank(np.zeros((3, 3), dtype=np.int64)) == 0
    assert rank(np.eye(4, dtype=np.int64)) == 4


def test_kernel_trivial():
    assert kernel_basis(np.eye(3, dtype=np.int64)).dim == 0
    assert kernel_basis(np.zeros((2, 5), dtype=np.int64)).dim == 5


def test_seven_points_on_bidegree_two_two():
    # rows are the nine monomials x0^i x1^(2-i) y0^j y1^(2-j) at random points
    rng = np.random.default_rng(5)
    rows = []
    for _ in range(7):
        s, t = (int(x) for x in rng.integers(1, 1000, size=2))
        rows.append([pow(s, i) * pow(t, j) for i in range(3) for j in range(3)])
    assert rank(np.array(rows) % P) == 7
    assert rank_rational(np.array(rows)) == 7


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m, P) == rank_mod(m.tolist(), m.shape[1], P)


@settings(max_examples=60, deadline=None)
@given(matrices(small_entries))
def test_rank_small_entries_agrees_with_rationals(m):
    # every minor is below 6! * 3^6 < p, so no minor can vanish mod p alone
    assert rank(m, P) == rank_rational(m)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    K = kernel_rows(m, P, cols=m.shape[1])
    assert rank(m, P) + K.shape[0] == m.shape[1]
    if K.shape[0]:
        assert not matmul_mod(m, K.T, P).any()
        assert rank(K, P) == K.shape[0]


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_of_transpose(m):
    assert rank(m, P) == rank(m.T.copy(), P)


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_rref_is_reduced(m):
    R, piv = rref(m, P)
    assert len(piv) == rank(m, P)
    for r, c in enumerate(piv):
        assert R[r, c] == 1
        col = R[:, c].copy()
        col[r] = 0
        assert not col.any()


@settings(max_examples=40, deadline=None)
@given(st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)).flatmap(
    lambda s: st.tuples(arrays(np.int64, s[:2], elements=entries), arrays(np.int64, s[1:], elements=entries))))
def test_matmul_matches_python_ints(pair):
    a, b = pair
    want = [[sum(int(x) * int(y) for x, y in zip(row, col)) % P for col in b.T.tolist()] for row in a.tolist()]
    assert matmul_mod(a, b, P).tolist() == want


@given(st.integers(1, P - 1))
def test_inverse(x):
    assert x * inv_mod(x, P) % P == 1


@given(st.integers(0, 10**6))
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_check_modulus():
    assert check_modulus(P) == P
    assert check_modulus(SMALL_P) == SMALL_P
    for bad in (1000001, 2**31 + 11, 7, P - 1):
        with pytest.raises(ValueError):
            check_modulus(bad)


def test_subspace_sum_and_coker():
    e1 = Subspace.span([[1, 0, 0]], 3)
    e2 = Subspace.span([[0, 1, 0]], 3)
    assert subspace_sum(e1, e1).dim == 1
    assert subspace_sum(e1, e2).dim == 2
    assert coker_dim(5, Subspace.span(np.eye(5, dtype=np.int64), 5)) == 0
    assert coker_dim(3, e1) == 2
    assert subspace_sum(e1, e2).contains([3, 4, 0])
    assert not subspace_sum(e1, e2).contains([0, 0, 1])
    with pytest.raises(DimensionMismatch):
        subspace_sum(e1, Subspace.span([[1, 0]], 2))


def test_one_point_kernel_on_bidegree_one_one():
    # evaluation of x0y0, x0y1, x1y0, x1y1 at one point
    row = np.array([[6, 2, 3, 1]])
    assert kernel_basis(row).dim == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_batched_rank_matches_rank(B, m, n, seed):
    rng = np.random.default_rng(seed)
    stack = rng.integers(0, P, size=(B, m, n))
    # make some rank-deficient
    stack[0, -1] = stack[0, 0]
    got = batched_rank(stack, P)
    assert got.tolist() == [rank(s, P) for s in stack]
