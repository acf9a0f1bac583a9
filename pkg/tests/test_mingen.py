import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sympy_oracle
from multiproj.cohomo import regions
from multiproj.degrees import Box, shift
from multiproj.exactla import DEFAULT_PRIME, subspace_sum
from multiproj.mingen import (UnsupportedSpace, check_stabilization, expected_generator_total, generator_table,
                              generators_outside_first_layer,
                              image_subspace, mixed_cokernel_formula, mult_map, p1_cokernel_formula,
                              stabilization_index, surjectivity_predicted_zero, verify_mixed_cokernel,
                              verify_p1_cokernel, verify_plane_surjectivity, verify_stabilization)
from multiproj.ring import Space, basis_size
from multiproj.scheme import ZeroScheme, random_general

P = DEFAULT_PRIME


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(1,), (1, 1), (1, 2), (2, 1)]).map(Space), st.integers(1, 3),
       st.integers(0, 2**32 - 1), st.data())
def test_image_against_sympy(X, s, seed, data):
    Z = random_general(X, s, "mixed", seed)
    a = tuple(data.draw(st.integers(0, 2)) for _ in X.dims)
    i = data.draw(st.integers(0, X.k - 1))
    got = mult_map(Z, a, i, method="span").dim_image
    assert got == sympy_oracle.image_dim(X.dims, a, i, Z.to_dict()["components"], P)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 6), st.integers(0, 2**32 - 1), st.data())
def test_closed_form_matches_span_on_p1(k, s, seed, data):
    X = Space((1,) * k)
    Z = random_general(X, s, "mixed", seed)
    a = tuple(data.draw(st.integers(0, 3)) for _ in range(k))
    i = data.draw(st.integers(0, k - 1))
    assert mult_map(Z, a, i, "koszul").dim_image == mult_map(Z, a, i, "span").dim_image


def test_mult_map_examples():
    X = Space((1, 1))
    Z = random_general(X, 3, seed=2)
    rep = mult_map(Z, (1, 1), 0)
    assert (rep.dim_image, rep.dim_coker) == (2, 1)
    assert p1_cokernel_formula((1, 1), 0, 3) == 1
    assert mult_map(random_general(X, 2, seed=2), (1, 1), 0).dim_coker == 0
    assert p1_cokernel_formula((1, 1), 0, 2) == 0
    zero = mult_map(Z, (1, 0), 1)
    assert zero.dim_image == 0 and zero.dim_coker == zero.dim_target
    assert mult_map(ZeroScheme(Space((1,))), (4,), 0).dim_coker == 0
    with pytest.raises(UnsupportedSpace):
        mult_map(random_general(Space((2,)), 1, seed=1), (1,), 0, method="koszul")


def test_three_p1_factors_five_points():
    X = Space((1, 1, 1))
    Z = random_general(X, 5, seed=9)
    for i in range(3):
        assert p1_cokernel_formula((1, 1, 1), i, 5) == 1
        assert mult_map(Z, (1, 1, 1), i, "span").dim_coker == 1


def test_images_into_bidegree_two_one():
    # (2,0) carries no sections for 3 points, so only (1,1) contributes: one new generator
    X = Space((1, 1))
    Z = random_general(X, 3, seed=2)
    span = subspace_sum(image_subspace(Z, (1, 1), 0), image_subspace(Z, (2, 0), 1))
    assert span.dim == 2
    assert regions(Z, Box((2, 1))).h0((2, 1)) == 3


def test_mixed_formula_on_p1_times_p2():
    X = Space((1, 2))
    Z = random_general(X, 4, seed=5)
    for i in range(2):
        formula = mixed_cokernel_formula(X.dims, (1, 1), i, 4)
        assert mult_map(Z, (1, 1), i, "span").dim_coker == formula
    # Delta = 2*3 = 6; for the P^2 slot 6*C(4,2)/C(3,2) - 3*(6-4) - 4 = 12 - 6 - 4
    assert mixed_cokernel_formula(X.dims, (1, 1), 1, 4) == 2


def test_stabilization_index_examples():
    X = Space((1, 1))
    assert stabilization_index(ZeroScheme(X), (0,), 0).e == 0
    st5 = stabilization_index(random_general(X, 5, seed=1), (1,), 0)
    assert st5.e == 2 and st5.h1_values[:3] == [3, 1, 0]


@pytest.mark.parametrize("seed", range(10))
def test_check_stabilization(seed):
    X = Space((2, 1))
    Z = random_general(X, 4, "mixed", seed)
    chk = check_stabilization(Z, (2,), 1)
    assert chk.ok, chk


def test_stabilization_campaign_small():
    rep = verify_stabilization(instances=25, seed=3)
    assert rep.ok and len(rep.records) == 25
    assert all(r["coker"] == r["expected"] for r in rep.records)
    assert {r["e"] for r in rep.records} >= {0, 1}


def test_generator_table_three_points():
    X = Space((1, 1))
    Z = random_general(X, 3, seed=2)
    box = Box.cube(2, 3)
    gt = generator_table(Z, box)
    want = {(1, 1): 1, (3, 0): 1, (0, 3): 1, (2, 1): 1, (1, 2): 1}
    assert gt.nonzero == want
    assert generator_table(Z, box, method="span").nonzero == want
    assert gt.total == 5


def test_one_w_rule_overcounts():
    # the rule adds W = 3 at (3,1) and (1,3) although (2,1) and (1,2) already cover those degrees;
    # by hand: h0 = 1 at each of (1,1), (3,0), (0,3), plus W = 1, 1, 0, 3, 0, 3 one step above them
    X = Space((1, 1))
    Z = random_general(X, 3, seed=2)
    box = Box.cube(2, 3)
    table = regions(Z, box)
    assert expected_generator_total(table, 3, lambda a, i: p1_cokernel_formula(a, i, 3)) == 11
    # one point: the ideal is generated by two linear forms, the rule predicts three
    one = random_general(X, 1, seed=2)
    t1 = regions(one, Box.cube(2, 2))
    assert generator_table(one, Box.cube(2, 2)).total == 2
    assert expected_generator_total(t1, 1, lambda a, i: p1_cokernel_formula(a, i, 1)) == 3


@pytest.mark.parametrize("seed", range(5))
def test_generators_only_in_first_layer(seed):
    X = Space((1, 1, 1))
    Z = random_general(X, 6, seed=seed)
    box = Box.cube(3, 6)
    table = regions(Z, box)
    assert generators_outside_first_layer(generator_table(Z, box, table=table), table) == []


def test_generator_table_empty_scheme():
    gt = generator_table(ZeroScheme(Space((1, 2))), Box((2, 2)))
    assert gt.nonzero == {(0, 0): 1}


@pytest.mark.parametrize("seed", range(5))
def test_predicted_surjectivity_means_no_generators(seed):
    X = Space((1, 1))
    Z = random_general(X, 5, seed=seed)
    box = Box.cube(2, 5)
    table = regions(Z, box)
    gt = generator_table(Z, box, method="span", table=table)
    for b in box:
        if surjectivity_predicted_zero(table, b):
            assert gt.gens(b) == 0


@pytest.mark.parametrize("seed", range(5))
def test_surjectivity_persists(seed):
    X = Space((1, 1))
    Z = random_general(X, 6, "mixed", seed)
    table = regions(Z, Box.cube(2, 8))
    for a in Box.cube(2, 5):
        for i in range(2):
            below = shift(a, i, -1)
            if min(below) < 0 or table.h1(below) or mult_map(Z, a, i, "span").dim_coker:
                continue
            for t in range(1, 3):
                assert mult_map(Z, shift(a, i, t), i, "span").dim_coker == 0


def test_p1_campaign():
    rep = verify_p1_cokernel(2, 3, seeds=5)
    assert rep.ok and rep.pass_rate == 1.0
    assert all(r["pass"] for r in rep.records)
    assert rep.extra["outside_hypothesis"]


def test_mixed_campaign():
    rep = verify_mixed_cokernel((1, 2), 4, seeds=5)
    assert rep.ok and all(rep.extra["maximal_rank"])
    with pytest.raises(UnsupportedSpace):
        verify_mixed_cokernel((3, 1), 4, seeds=1)


def test_plane_surjectivity():
    inside = verify_plane_surjectivity((1,), (1,), 1, 5, seeds=5)
    assert inside.params["bound"] == 6 and inside.ok
    assert all(r["computed"] == 0 for r in inside.records)
    assert verify_plane_surjectivity((), (), 0, 0, seeds=3).ok
    # s = 2 points of P^2 with t = 0 exceed the bound C(2,2) = 1: the map misses one dimension
    outside = verify_plane_surjectivity((), (), 0, 2, seeds=3)
    assert not outside.params["hypothesis_ok"]
    assert [r["computed"] for r in outside.records] == [1, 1, 1]


def test_formula_arithmetic():
    assert p1_cokernel_formula((2, 1), 0, 3) == 3 + 4 * 2 - 2 * 6
    assert mixed_cokernel_formula((2, 2), (1, 1), 0, 5) == -5 + 9 * 6 // 3 - 3 * 4
    assert mixed_cokernel_formula((2, 2), (1, 1), 0, 1) == 0
    assert basis_size(Space((1, 1)), (2, 1)) == 6
