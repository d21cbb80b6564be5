import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from torofold.plane import (
    PlaneMonomial,
    chart_a,
    chart_b,
    classify_point,
    from_series,
    is_snc_at_origin,
    jacobian,
    pmul,
    run_dim2,
    squarefree,
    support_certificate,
)
from torofold.randomforms import Bounds, dim2_pair
from torofold.verify import FAIL, PASS, PreconditionViolated

F = Fraction


def leaves(rep):
    return [l.chart for l in rep.tree.leaves if l.chart and "form" in l.chart]


def test_plane_monomial_invariants():
    with pytest.raises(PreconditionViolated):
        PlaneMonomial(2, 4)
    with pytest.raises(PreconditionViolated):
        PlaneMonomial(2, 0, 3)


def test_snc_test():
    assert is_snc_at_origin({(1, 0): F(1)})
    assert is_snc_at_origin({(1, 1): F(1)})
    assert is_snc_at_origin({(1, 0): F(1), (2, 1): F(1), (0, 2): F(1)})  # smooth
    assert not is_snc_at_origin({(2, 0): F(1), (0, 3): F(1)})  # cusp
    assert not is_snc_at_origin({(2, 0): F(1), (0, 2): F(-1)})  # node
    assert is_snc_at_origin({(2, 0): F(1), (1, 1): F(1)})  # x (x + y)
    assert not is_snc_at_origin({(3, 0): F(1), (1, 2): F(1)})  # x (x^2 + y^2)


def test_jacobian_and_charts():
    assert jacobian({(1, 0): F(1)}, {(0, 2): F(1)}) == {(0, 1): F(2)}
    assert chart_a({(1, 1): F(1)}) == {(2, 1): F(1)}
    assert chart_b({(1, 1): F(1)}) == {(1, 2): F(1)}


def test_squarefree():
    p = pmul({(1, 0): F(1)}, pmul({(1, 0): F(1)}, {(0, 1): F(1), (1, 0): F(1)}))
    sq = squarefree(p)
    assert set(sq) == {(1, 0), (0, 1)} or set(sq) == {(2, 0), (1, 1)}


def test_xy2_is_already_form_one():
    rep = run_dim2(PlaneMonomial(1), from_series("x*y^2"))
    assert rep.verdict == PASS and rep.fan["blowups"] == 0
    (leaf,) = leaves(rep)
    assert (leaf["form"], leaf["e"], leaf["f"]) == (1, 1, 2)


def test_x2_x_plus_y3():
    rep = run_dim2(PlaneMonomial(2), from_series("x + y^3"))
    assert rep.verdict == PASS
    assert all(l["form"] in (1, 2) and l["ok"] for l in leaves(rep))
    assert any(l.get("f") == 3 for l in leaves(rep))


def test_pure_x_power_takes_support_branch():
    rep = run_dim2(PlaneMonomial(1), from_series("x^3"))
    assert rep.verdict == PASS and rep.notes == ["v in k[[x]]"]


def test_support_certificate_for_two_curve():
    u = PlaneMonomial(1, 2)
    assert support_certificate(u, {(1, 2): F(1), (2, 4): F(3)})[0]
    assert not support_certificate(u, {(1, 1): F(1)})[0]


def test_nonzero_constant_rejected():
    with pytest.raises(PreconditionViolated):
        run_dim2(PlaneMonomial(1), {(0, 0): F(1), (1, 0): F(1)})


def test_irrational_branches_are_certified():
    # J = 3 y^2 - 2 x^2 has two conjugate branches through the origin
    rep = run_dim2(PlaneMonomial(1), from_series("y^3 - 2*x^2*y"))
    assert rep.verdict == PASS
    assert any(l.point == "irrational point" for l in rep.tree.leaves)


def test_form_two_direct_check():
    cls = classify_point({(1, 1): F(1)}, {(1, 1): F(1), (2, 3): F(1)}, 1)
    assert cls.form == 2 and cls.ok
    assert (cls.exps["c1"], cls.exps["d1"], cls.exps["det"]) == (2, 3, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_random_pairs_reach_monomial_forms(seed):
    u, v = dim2_pair(random.Random(seed), Bounds())
    rep = run_dim2(u, v)
    assert rep.verdict in (PASS, "inconclusive")
    assert rep.verdict != FAIL
    for l in leaves(rep):
        if l["form"] == 1:
            assert l["f"] > 0
        else:
            assert l["det"] != 0
