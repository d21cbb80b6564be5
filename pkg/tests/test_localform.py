import pytest
from hypothesis import given, strategies as st

from torofold.localform import (
    DegenerateV,
    InvariantViolation,
    NotApplicable,
    NotPrepared,
    One,
    Prepared,
    ThreePrepForm,
    Three,
    Two,
    classify_3prepared,
    decompose,
    jacobian_ideal_check,
    normalize_tschirnhaus,
    point_type_from_u,
    sigma,
    z_coefficient,
)
from torofold.pseries import AtLeast, Exact, TruncatedSeries as S, ord_restrict


def P(text, trunc=16):
    return S.parse(text, trunc)


def test_point_type_invariants():
    with pytest.raises(InvariantViolation):
        Two(2, 4)
    with pytest.raises(InvariantViolation):
        Three(2, 2, 4)
    assert point_type_from_u([2, 3]).kind == 2
    assert point_type_from_u([1, 0, 0]).kind == 1


def test_decompose_one_point():
    f = decompose(One(2), P("x^3 + x*z^2"))
    assert f.P.terms() == [((3, 0, 0), 1)]
    assert f.mono == (1, 0, 0)
    assert f.F.coeffs == P("z^2").coeffs
    assert f.v() == P("x^3 + x*z^2")


def test_decompose_two_point():
    f = decompose(Two(1, 1), P("x*y + x*z"))
    assert f.P.terms() == [((1, 0, 0), 1)]
    assert f.mono == (1, 0, 0)
    assert f.F.coeffs == P("z").coeffs


def test_degenerate_v():
    with pytest.raises(DegenerateV):
        decompose(One(1), P("x^5"))


def test_sigma_examples():
    assert sigma(decompose(One(1), P("x*z^2 + x^2*y"))) == Exact(1)
    assert sigma(decompose(Two(1, 1), P("x^2*y + x^2*y*z"))) == Exact(0)
    assert sigma(decompose(Two(1, 1), P("x*y*z^3 + x^2*y^3"))) == Exact(2)


def test_sigma_two_point_unit_with_zero_determinant_fails_loudly():
    form = decompose(Two(1, 1), P("x*y*z + x^2*y^2"))
    bad = type(form)(form.ptype, form.P, (1, 1, 0), P("1 + z"), form.trunc)
    with pytest.raises(InvariantViolation):
        sigma(bad)


def test_sigma_three_point_cases():
    unit = decompose(Three(1, 1, 1), P("x^2*y*z + x^2*y^2*z"))
    assert sigma(unit) == Exact(0)
    nonunit = decompose(Three(1, 1, 1), P("x^3*y*z + x^2*y^2*z"))
    assert isinstance(sigma(nonunit), AtLeast)


def test_sigma_one_point_truncated():
    assert sigma(decompose(One(1), P("x*y + x^2*z", 4))) == Exact(0)
    # F = z^4 + x y is known to degree 4, so ord F(0,y,z) is only bounded below
    assert sigma(decompose(One(1), P("x*z^4 + x^2*y", 5))) == AtLeast(3)


def test_jacobian_check_one_point():
    rep = jacobian_ideal_check(decompose(One(2), P("x*z^2 + x^2*y")))
    assert rep.passed


def test_jacobian_check_prepared_two_point():
    rep = jacobian_ideal_check(decompose(Two(1, 1), P("x^2*y + x^2*y*z")))
    assert rep.passed


@given(st.integers(1, 3), st.integers(1, 4), st.integers(2, 4))
def test_jacobian_check_random_one_points(a, c, m):
    v = P(f"x^{c}*z^{m} + x^{c + 1}*y + x^{c}*y^2*z")
    assert jacobian_ideal_check(decompose(One(a), v)).passed


def test_tschirnhaus_completes_the_square():
    # x ((z - x)^2 + x^3 y)
    res = normalize_tschirnhaus(decompose(One(1), P("x*z^2 - 2*x^2*z + x^3 + x^4*y")))
    assert res.m == 2
    assert res.phi == P("x", res.phi.trunc)
    assert z_coefficient(res.form.F, 1).is_zero()


def test_tschirnhaus_fixed_point():
    form = decompose(One(1), P("x*z^2 + x^2*y"))
    res = normalize_tschirnhaus(form)
    assert res.phi.is_zero()
    assert res.form.F == form.F.truncate(res.form.F.trunc)


def test_tschirnhaus_cubic_newton_step():
    res = normalize_tschirnhaus(decompose(One(1), P("x*z^3 + 3*x^2*z^2 + x^3*y")))
    assert res.m == 3
    assert z_coefficient(res.form.F, 2).is_zero()


def test_tschirnhaus_rejects_small_order():
    with pytest.raises(NotApplicable):
        normalize_tschirnhaus(decompose(One(1), P("x*z + x^2*y")))


def test_classify_eq2():
    c = classify_3prepared(decompose(Two(1, 1), P("x*y*z^2 + x^2*y")))
    assert isinstance(c, ThreePrepForm) and c.kind == "eq2" and c.m == 2
    a, b = c.form.ptype.exps[:2]
    cc, d = c.form.mono[:2]
    assert (c.r[2] + cc) * b - (c.s[2] + d) * a != 0


def test_classify_eq3():
    c = classify_3prepared(decompose(One(1), P("x*z^3 + x^3*z + x^2*y")))
    assert isinstance(c, ThreePrepForm) and c.kind == "eq3"
    # x^2 z lies in (x), so it is absorbed into tau_3 = y + x z
    assert c.m == 3 and c.r[3] == 1
    assert ord_restrict(c.taus[3], [0, 2]) == Exact(1)
    assert sorted(c.ideal_generators()) == [(0, 0, 3), (1, 0, 0)]


def test_classify_prepared():
    assert isinstance(classify_3prepared(decompose(One(1), P("x*z + x^2*y"))), Prepared)


def test_classify_eq4_needs_prefer_and_large_tail():
    f = decompose(One(1), P("x*z^3 + x^2*z + x^6*y"))
    c = classify_3prepared(f, prefer="eq4")
    assert isinstance(c, ThreePrepForm) and c.kind == "eq4" and c.t == 5 and c.omega_bound == 4
    low = classify_3prepared(decompose(One(1), P("x*z^3 + x^2*z + x^5*y")), prefer="eq4")
    assert isinstance(low, NotPrepared)


def test_classify_prefers_eq3_on_ambiguous_input():
    c = classify_3prepared(decompose(One(1), P("x*z^3 + x^2*z + x^6*y")))
    assert c.kind == "eq3"


@given(st.integers(1, 3), st.integers(2, 5), st.integers(1, 4))
def test_decompose_roundtrip(a, m, c):
    v = P(f"x^{a} + x^{c}*z^{m} + x^{c + 1}*y + x^{c}*y^2")
    f = decompose(One(a), v)
    f.validate()
    assert f.v().agrees_with(v)
