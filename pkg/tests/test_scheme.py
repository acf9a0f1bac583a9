import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multiproj.cohomo import fiber_trace
from multiproj.ring import Space
from multiproj.scheme import (Kind, SchemeFormatError, ZeroScheme, degree, make_component, random_corpus,
                              random_general, random_in_fiber, residual, trace_degree)

spaces = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(lambda d: Space(tuple(d)))


def test_degrees_by_kind():
    X = Space((1, 1))
    assert degree(ZeroScheme(X)) == 0
    assert random_general(X, 5).degree == 5
    assert ZeroScheme(X, (make_component(X, "double", ((1, 0), (1, 0))),)).degree == 3
    Y = Space((2, 2))
    assert ZeroScheme(Y, (make_component(Y, "double", ((1, 0, 0), (1, 0, 0))),)).degree == 5
    assert random_general(X, 2, "tangent").degree == 4


def test_random_is_deterministic():
    X = Space((1, 2))
    assert random_general(X, 4, "mixed", 7) == random_general(X, 4, "mixed", 7)
    assert random_general(X, 4, "mixed", 7) != random_general(X, 4, "mixed", 8)
    assert random_general(X, 0).degree == 0


def test_random_in_fiber():
    X = Space((1, 2))
    Z = random_in_fiber(X, 0, (2, 3), 1, seed=1)
    assert len(Z) == 1 and Z.projection(0) == {Z.components[0].point[0]}
    Z = random_in_fiber(X, 0, (2, 3), 4, seed=1, kind="tangent")
    assert len(Z.projection(0)) == 1
    assert all(c.chunks(X)[0] is None for c in Z.components)
    with pytest.raises(ValueError):
        random_in_fiber(X, 0, (2, 3), 1, kind="double")


@settings(max_examples=50, deadline=None)
@given(spaces, st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_json_round_trip(X, s, seed):
    Z = random_general(X, s, "mixed", seed)
    again = ZeroScheme.from_json(Z.to_json())
    assert again == Z
    assert again.to_json() == Z.to_json()


def test_scale_invariant_input():
    X = Space((1, 1))
    a = make_component(X, "reduced", ((2, 4), (3, 1)))
    b = make_component(X, "reduced", ((1, 2), (6, 2)))
    assert a == b


@pytest.mark.parametrize("doc, field", [
    ('{"space": [1, 1], "components": [{"kind": "blob", "point": [[1, 0], [0, 1]]}]}', "components[0].kind"),
    ('{"space": [1, 1], "components": [{"kind": "reduced", "point": [[1, 0]]}]}', "components[0].point"),
    ('{"space": [1, 1], "components": [{"kind": "reduced", "point": [[0, 0], [0, 1]]}]}', "components[0].point"),
    ('{"space": [1, 1], "components": [{"kind": "tangent", "point": [[1, 0], [0, 1]]}]}',
     "components[0].direction"),
    ('{"space": [1, 1], "components": [{"kind": "tangent", "point": [[1, 0], [0, 1]], "direction": [1]}]}',
     "components[0].direction"),
    ('{"space": [0], "components": []}', "space"),
    ('{"space": [1], "components": {}}', "components"),
    ('[1, 2]', "<root>"),
    ('{"space": [1', "<root>"),
    ('{"space": [1], "components": [{"kind": "reduced", "point": [[1, 1]]},'
     ' {"kind": "reduced", "point": [[2, 2]]}]}', "components"),
])
def test_format_errors_name_the_field(doc, field):
    with pytest.raises(SchemeFormatError) as info:
        ZeroScheme.from_json(doc)
    assert info.value.field == field


def test_residual_examples():
    X = Space((1, 1))
    pt = ((1, 1), (2, 1))
    D = (1, -1)  # x0 - x1 = 0 on the first factor, through pt
    off = ZeroScheme(X, (make_component(X, "reduced", ((3, 1), (2, 1))),))
    assert residual(off, 0, D) == off
    red = ZeroScheme(X, (make_component(X, "reduced", pt),))
    assert residual(red, 0, D).degree == 0
    dbl = ZeroScheme(X, (make_component(X, "double", pt),))
    res = residual(dbl, 0, D)
    assert [c.kind for c in res.components] == [Kind.REDUCED] and res.degree == 1
    assert trace_degree(dbl, 0, D) == 2
    across = ZeroScheme(X, (make_component(X, "tangent", pt, (1, 0)),))
    inside = ZeroScheme(X, (make_component(X, "tangent", pt, (0, 1)),))
    assert residual(across, 0, D).degree == 1
    assert residual(inside, 0, D).degree == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 1))
def test_residual_plus_fiber_trace_is_degree(seed, i):
    # on a P^1 factor the divisor pi_i^{-1}(H) is a fiber, whose trace has its own functionals
    X = Space((1, 2))
    Z = random_general(X, 3, "mixed", seed)
    target = Z.components[0].point[0]
    H = (target[1], -target[0])
    Y = Z if i == 0 else Z.union(random_in_fiber(X, 0, target, 2, seed + 1, "tangent"))
    assert residual(Y, 0, H).degree + len(fiber_trace(Y, 0, target)) == Y.degree


def test_corpus_bounds():
    corpus = random_corpus(50, seed=3)
    assert len(corpus) == 50
    assert all(Z.degree <= 12 and Z.space.k <= 3 and max(Z.space.dims) <= 2 for Z in corpus)
    assert {c.kind for Z in corpus for c in Z.components} == set(Kind)
    assert [Z.to_json() for Z in random_corpus(50, seed=3)] == [Z.to_json() for Z in corpus]
