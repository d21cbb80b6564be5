from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import monomial_images, series, small_q
from torofold.pseries import (
    AtLeast,
    Exact,
    MalformedChart,
    NotAUnit,
    StructuralError,
    TruncatedSeries as S,
    invert_unit,
    mul,
    ord_restrict,
    partial,
    pow_rational,
    substitute,
)

X, Y, Z = 0, 1, 2


def P(text, trunc=16):
    return S.parse(text, trunc)


def test_parse_roundtrip():
    s = P("z^2 + 3/2*x*y - x^3")
    assert s.coefficient((1, 1, 0)) == Fraction(3, 2)
    assert s.coefficient((3, 0, 0)) == -1
    assert P(str(s)) == s


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        P("x + sin(y)")


def test_mul_difference_of_squares():
    assert mul(P("1+x", 5), P("1-x", 5)) == P("1-x^2", 5)


def test_mul_monomials():
    assert mul(P("x", 2), P("y", 2)) == P("x*y", 2)


def test_mul_geometric():
    geo = S({(k, 0, 0): 1 for k in range(9)}, 8)
    assert mul(geo, P("1-x", 8)) == S.one(8)


def test_nvars_mismatch():
    with pytest.raises(StructuralError):
        mul(S.var(0, 4, nvars=1), S.var(0, 4, nvars=2))


def test_invert_unit_examples():
    assert invert_unit(S.one(4)) == S.one(4)
    assert invert_unit(P("1+x", 4)) == P("1 - x + x^2 - x^3 + x^4", 4)
    assert invert_unit(S.const(2, 4)) == S.const(Fraction(1, 2), 4)
    with pytest.raises(NotAUnit):
        invert_unit(P("x+y", 4))


def test_pow_rational_examples():
    assert pow_rational(S.one(6), Fraction(3, 7)) == S.one(6)
    half = pow_rational(P("1+x", 3), Fraction(1, 2))
    assert half == P("1 + 1/2*x - 1/8*x^2 + 1/16*x^3", 3)
    assert pow_rational(S.const(4, 3), Fraction(1, 2)) == S.const(2, 3)
    with pytest.raises(NotAUnit):
        pow_rational(P("x", 3), Fraction(1, 2))


def test_substitute_examples():
    x1y1 = P("x*y")
    assert substitute(P("x"), [x1y1, P("y"), P("z")]) == x1y1
    out = substitute(P("z^2 + x*y"), [P("x"), P("x*y"), P("x*z")])
    assert out.agrees_with(P("x^2*z^2 + x^2*y"))


def test_substitute_translated_monomial_rule():
    alpha = 3
    yt = P(f"y + {alpha}")
    images = [mul(P("x"), yt * yt), mul(P("x^2"), yt), P("z")]
    exact = S(P("x*y").coeffs, 16, 3, (0, 0, 0))
    lhs = substitute(exact, [S(i.coeffs, 16, 3, (0, 0, 0)) for i in images])
    rhs = S(mul(P("x^3"), yt * yt * yt).coeffs, 16, 3, (0, 0, 0))
    assert lhs.coeffs == rhs.coeffs


def test_substitute_rejects_unit_image():
    with pytest.raises(MalformedChart):
        substitute(P("x + y"), [P("1 + x"), P("y"), P("z")])


def test_partial_examples():
    assert partial(P("z^2"), Z).coeffs == P("2*z").coeffs
    assert partial(P("x^3*y"), Y).coeffs == P("x^3").coeffs
    assert partial(S.const(5), X).is_zero()


def test_ord_restrict_examples():
    assert ord_restrict(P("z^2 + x*y"), [X]) == Exact(2)
    assert ord_restrict(P("x*y"), [X, Y]) == AtLeast(16)
    assert ord_restrict(P("1+z"), []) == Exact(0)


def _eval_points():
    return [(Fraction(1, 3), Fraction(-2, 5), Fraction(1, 7)), (Fraction(2), Fraction(1, 2), Fraction(-1, 3))]


def test_substitute_matches_evaluation():
    """Exact polynomial composition agrees with pointwise evaluation."""
    E = (0, 0, 0)
    s = S(P("z^2 + x*y - 2*x^3*z").coeffs, 0, 3, E)
    imgs = [S(P(t).coeffs, 0, 3, E) for t in ("x", "x*y + x", "x*z - 1/2")]
    out = substitute(s, imgs)
    for pt in _eval_points():
        inner = [im.evaluate(pt) for im in imgs]
        assert out.evaluate(pt) == s.evaluate(inner)


@given(series(), series(), monomial_images())
def test_substitute_is_multiplicative(s, t, imgs):
    lhs = substitute(mul(s, t), imgs)
    rhs = mul(substitute(s, imgs), substitute(t, imgs))
    assert lhs.agrees_with(rhs)


@given(series(), series(), monomial_images())
def test_substitute_is_additive(s, t, imgs):
    assert substitute(s + t, imgs).agrees_with(substitute(s, imgs) + substitute(t, imgs))


@given(series(unit=True))
def test_invert_unit_involution(s):
    assert invert_unit(invert_unit(s)) == s
    assert mul(s, invert_unit(s)) == S.one(s.trunc)


@given(series(unit=True).filter(lambda s: s.constant_term == 1), small_q, small_q)
def test_pow_rational_exponent_law(s, lam, mu):
    lhs = mul(pow_rational(s, lam), pow_rational(s, mu))
    assert lhs == pow_rational(s, lam + mu)


@given(series(unit=True).filter(lambda s: s.constant_term == 1), st.integers(1, 4))
def test_pow_rational_root_inverts_power(s, q):
    assert pow_rational(s, Fraction(1, q)) ** q == s


@given(series())
def test_partials_commute(s):
    assert partial(partial(s, X), Y) == partial(partial(s, Y), X)


@given(series(), series(), st.sampled_from([X, Y, Z]))
def test_leibniz(s, t, var):
    lhs = partial(mul(s, t), var)
    rhs = mul(partial(s, var), t) + mul(s, partial(t, var))
    assert lhs.agrees_with(rhs)


@given(series(), st.integers(0, 8))
def test_truncate_is_idempotent(s, k):
    assert s.truncate(k).truncate(k) == s.truncate(k)
    assert all(sum(e) <= min(k, s.trunc) for e in s.truncate(k).coeffs)
