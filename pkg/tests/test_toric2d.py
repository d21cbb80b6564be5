from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from torofold.toric2d import (
    Chart2D,
    Fan2D,
    MonomialIdeal2D,
    NotApplicable,
    Plain,
    StrictTransformCondition,
    all_fans,
    det,
    enumerate_charts,
    exhaustive_min_insertions,
    fan_satisfies,
    is_principal_in_chart,
    ladder_ideal,
    minimal_principalizing_fan,
    newton_polygon,
    omega,
    omega_by_valuations,
    smooth_closure,
)

ideals = st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=3).map(
    MonomialIdeal2D.of
)


def test_newton_polygon_examples():
    np_ = newton_polygon(MonomialIdeal2D.of([(0, 2), (3, 0)]))
    assert np_.vertices == ((0, 2), (3, 0)) and np_.normals == ((2, 3),)
    np_ = newton_polygon(MonomialIdeal2D.of([(0, 1)]))
    assert np_.vertices == ((0, 1),) and np_.normals == ()
    np_ = newton_polygon(MonomialIdeal2D.of([(0, 3), (1, 1)]))
    assert np_.normals == ((2, 1),)


def test_non_minimal_generators_rejected():
    with pytest.raises(ValueError):
        MonomialIdeal2D(((0, 1), (1, 1)))


def test_plain_fan_example():
    fan = minimal_principalizing_fan(MonomialIdeal2D.of([(0, 2), (3, 0)]))
    assert sorted(fan.insertion_order) == [(1, 1), (1, 2), (2, 3)]


def test_strict_transform_fan_example():
    fan = minimal_principalizing_fan(ladder_ideal(3, [1]), StrictTransformCondition(3, (1,)))
    assert fan.insertion_order == ((1, 1), (2, 1))


def test_principal_ideal_needs_nothing():
    assert minimal_principalizing_fan(MonomialIdeal2D.of([(2, 5)])).insertion_order == ()


def test_strict_transform_needs_positive_r():
    with pytest.raises(NotApplicable):
        minimal_principalizing_fan(ladder_ideal(3, [0]), StrictTransformCondition(3, (0,)))


def test_chart_shapes_of_example_fan():
    fan = Fan2D.trivial().insert((1, 1)).insert((2, 1))
    charts = enumerate_charts(fan)
    assert [(c.a1, c.b1) for c in charts if c.shape == "interior"] == [(2, 1), (1, 1)]
    assert [(c.a1, c.b1, c.c1, c.d1) for c in charts if c.shape == "two_point"] == [
        (1, 2, 0, 1), (2, 1, 1, 1)
    ]
    assert [c.b1 for c in charts if c.shape == "strict"] == [1]


def test_identity_fan_has_one_chart():
    assert [c.shape for c in enumerate_charts(Fan2D.trivial())] == ["identity"]


def test_chart_count_of_five_ray_fan():
    fan = minimal_principalizing_fan(MonomialIdeal2D.of([(0, 2), (3, 0)]))
    shapes = [c.shape for c in enumerate_charts(fan)]
    assert shapes.count("interior") == 3
    assert shapes.count("two_point") + shapes.count("strict") == 4


def test_principal_in_chart_examples():
    I = MonomialIdeal2D.of([(0, 3), (1, 1)])
    assert is_principal_in_chart(I, Chart2D("two_point", 1, 2, 0, 1)) == (0, 3)
    J = MonomialIdeal2D.of([(2, 2)])
    assert is_principal_in_chart(J, Chart2D("identity", 1, 0)) == (2, 2)
    K = MonomialIdeal2D.of([(0, 2), (3, 0)])
    assert is_principal_in_chart(K, Chart2D("identity", 1, 0)) is None


def test_omega_example_both_paths():
    assert omega(3, [1]) == 4
    assert omega_by_valuations(3, [1]) == 4


def test_omega_rejects_degenerate_ladders():
    with pytest.raises(NotApplicable):
        omega(2, [])
    with pytest.raises(NotApplicable):
        omega(4, [1, 0])


@given(st.integers(3, 5).flatmap(lambda m: st.tuples(
    st.just(m), st.lists(st.integers(0, 5), min_size=m - 3, max_size=m - 3), st.integers(1, 5)
)))
def test_omega_paths_agree(case):
    m, head, last = case
    r = head + [last]
    assert omega(m, r) == omega_by_valuations(m, r)


@given(st.lists(st.tuples(st.integers(1, 7), st.integers(1, 7)), min_size=1, max_size=4))
def test_smooth_closure_is_smooth_and_contains_targets(raw):
    from math import gcd

    targets = [(p // gcd(p, q), q // gcd(p, q)) for p, q in raw]
    fan = smooth_closure(targets)
    assert all(t in fan.rays for t in targets)
    assert all(det(a, b) == 1 for a, b in fan.cones())
    replay = Fan2D.trivial()
    for w in fan.insertion_order:
        replay = replay.insert(w)
    assert replay.rays == fan.rays


@given(ideals)
def test_minimal_fan_principalizes(I):
    fan = minimal_principalizing_fan(I)
    assert fan_satisfies(I, fan)


LEVELS = all_fans(5)


@given(ideals)
def test_minimal_fan_matches_exhaustive_search(I):
    fan = minimal_principalizing_fan(I)
    if fan.n_insertions() <= 5:
        assert exhaustive_min_insertions(I, max_insertions=5, levels=LEVELS) == fan.n_insertions()
