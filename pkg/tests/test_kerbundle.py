from math import comb

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

import sympy_oracle
from multiproj.cohomo import UnsupportedTwist
from multiproj.exactla import DEFAULT_PRIME
from multiproj.kerbundle import (build_sections, cotangent_thresholds, impose_points, omega_h0,
                                 verify_cotangent_points, verify_cotangent_thresholds)
from multiproj.ring import Space, basis_size
from multiproj.scheme import ZeroScheme, random_general

P = DEFAULT_PRIME


def sympy_euler_kernel_dim(n, t):
    """dim of {(f_0..f_n) of degree t-1 : sum x_j f_j = 0}, by sympy linear algebra."""
    xs, src = sympy_oracle.monomials((n,), (t - 1,))
    _, tgt = sympy_oracle.monomials((n,), (t,))
    gens = xs[0]
    cols = []
    for x in gens:
        for m in src:
            poly = sympy.Poly(x * m, *gens)
            cols.append([int(poly.coeff_monomial(mm)) for mm in tgt])
    rows = [list(r) for r in zip(*cols)]
    return len(cols) - sympy_oracle.rank_q(rows, len(cols))


@pytest.mark.parametrize("x", range(2, 7))
def test_plane_section_dims(x):
    V = build_sections(Space((2,)), 0, x)
    assert V.dim == x * x - 1 == omega_h0(2, x)
    assert not V.euler_residual().any()


def test_small_twists():
    assert build_sections(Space((2,)), 0, 1).dim == 0
    assert omega_h0(2, 1) == 0
    with pytest.raises(UnsupportedTwist):
        build_sections(Space((2,)), 0, 0)


@pytest.mark.parametrize("n, t", [(1, 2), (1, 4), (2, 3), (3, 2), (3, 3)])
def test_dims_against_sympy(n, t):
    assert build_sections(Space((n,)), 0, t).dim == sympy_euler_kernel_dim(n, t) == omega_h0(n, t)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5))
def test_dim_is_euler_count(n, t):
    V = build_sections(Space((n,)), 0, t)
    assert V.dim == (n + 1) * comb(n + t - 1, n) - comb(n + t, n)


@pytest.mark.parametrize("a", [0, 1, 2])
def test_product_with_p1(a):
    V = build_sections(Space((1, 2)), 1, 2, (a,))
    assert V.alpha == a + 1
    assert V.dim == 3 * (a + 1)
    assert V.target_degree == (a, 2) and V.source_degree == (a, 1)
    assert not V.euler_residual().any()


def test_impose_points_examples():
    X = Space((2,))
    V = build_sections(X, 0, 2)
    assert impose_points(ZeroScheme(X), V) == (V.dim, 0)
    assert impose_points(random_general(X, 1, seed=1), V)[0] == 1
    Y = Space((1, 2))
    W = build_sections(Y, 1, 2, (1,))
    assert impose_points(random_general(Y, 3, seed=2), W) == (0, 0)
    V3 = build_sections(X, 0, 3)
    assert impose_points(random_general(X, 4, seed=3), V3) == (0, 0)
    assert impose_points(random_general(Y, 2, seed=4), W)[0] == 2
    with pytest.raises(ValueError):
        impose_points(random_general(X, 1, "double", seed=1), V)


def test_cotangent_points_campaign():
    rep = verify_cotangent_points((1,), (1,), (2, 3), seeds=4)
    assert rep.ok and rep.extra["section_dims_ok"]
    assert {r["x"] for r in rep.records} == {2, 3}
    vac = verify_cotangent_points((), (), (1,), seeds=3)
    assert vac.ok and all(r["dim"] == 0 and r["expected_h0"] == 0 for r in vac.records)


def test_cotangent_thresholds():
    X = Space((1, 2))
    assert cotangent_thresholds(X, 1, (1, 2)) == (8, 8)
    rep = verify_cotangent_thresholds((1, 2), 1, (1, 2), s_values=[8, 9], seeds=4)
    assert rep.ok
    assert [r["claim"] for r in rep.records] == ["h1=0", "h0=0"]
    assert basis_size(X, (1, 2)) == 12
