"""Seeded generators of random valid inputs for the property suites."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import toric2d
from .localform import (
    DegenerateV,
    LocalForm,
    One,
    PointType,
    Three,
    ThreePrepForm,
    Two,
    classify_3prepared,
    decompose,
)
from .plane import PlaneMonomial
from .pseries import DEFAULT_TRUNC, EXACT, TruncatedSeries


@dataclass(frozen=True)
class Bounds:
    exp_max: int = 6
    m_min: int = 2
    m_max: int = 5
    coeff_max: int = 5
    trunc: int = DEFAULT_TRUNC


def _coeff(rng: random.Random, b: Bounds) -> Fraction:
    while True:
        c = Fraction(rng.randint(-b.coeff_max, b.coeff_max), rng.randint(1, 3))
        if c:
            return c


def _series(terms: dict, b: Bounds) -> TruncatedSeries:
    return TruncatedSeries(terms, b.trunc, 3, EXACT)


def _add(terms: dict, e, c) -> None:
    terms[e] = terms.get(e, 0) + c
    if not terms[e]:
        del terms[e]


def _coprime_pair(rng, lo, hi):
    while True:
        a, b = rng.randint(lo, hi), rng.randint(lo, hi)
        if gcd(a, b) == 1:
            return a, b


def random_two_point(rng, b: Bounds) -> PointType:
    a, bb = _coprime_pair(rng, 1, 3)
    return Two(a, bb, rng.randint(1, 2))


def random_three_point(rng, b: Bounds) -> PointType:
    while True:
        a, bb, c = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
        if gcd(gcd(a, bb), c) == 1:
            return Three(a, bb, c, rng.randint(1, 2))


def _form(ptype: PointType, mono, F: dict, b: Bounds) -> LocalForm | None:
    v: dict = {}
    for e, c in F.items():
        _add(v, tuple(x + y for x, y in zip(e, mono)), c)
    try:
        return decompose(ptype, _series(v, b))
    except DegenerateV:
        return None


def _random_mono(rng, b: Bounds, nvars: int):
    return tuple(rng.randint(0, 3) if i < nvars else 0 for i in range(3))


def _random_terms(rng, b: Bounds, n: int, constant=False) -> dict:
    terms: dict = {}
    while len(terms) < n:
        e = tuple(rng.randint(0, b.exp_max) for _ in range(3))
        if sum(e) == 0 and not constant:
            continue
        if sum(e) > b.exp_max + 2:
            continue
        _add(terms, e, _coeff(rng, b))
    return terms


# -- toroidal monotonicity suite -----------------------------------------------------


def torgood_form(rng, b: Bounds, kind: int) -> LocalForm:
    """A valid 2-point form, or a prepared 3-point form."""
    while True:
        if kind == 2:
            pt = random_two_point(rng, b)
            F = _random_terms(rng, b, rng.randint(2, 5))
            F[(0, 0, rng.randint(1, 4))] = _coeff(rng, b)
            mono = _random_mono(rng, b, 2)
        else:
            pt = random_three_point(rng, b)
            F = _random_terms(rng, b, rng.randint(1, 4))
            F[(0, 0, 0)] = _coeff(rng, b)
            mono = _random_mono(rng, b, 3)
        f = _form(pt, mono, F, b)
        if f is not None and f.kind == kind and (kind == 2 or f.F.constant_term):
            return f


# -- principalization suite -------------------------------------------------------------


def step2_three_point(rng, b: Bounds) -> LocalForm:
    """A 3-point form with ``F(0,0,0) = 0``."""
    while True:
        F = _random_terms(rng, b, rng.randint(2, 4))
        f = _form(random_three_point(rng, b), _random_mono(rng, b, 3), F, b)
        if f is not None and f.kind == 3 and not f.F.constant_term:
            return f


def step2_two_point(rng, b: Bounds) -> LocalForm:
    """A 2-point form with ``F(0,0,z) = 0``."""
    while True:
        F = {e: c for e, c in _random_terms(rng, b, rng.randint(2, 5)).items() if e[0] or e[1]}
        f = _form(random_two_point(rng, b), _random_mono(rng, b, 2), F, b) if F else None
        if f is None or f.kind != 2:
            continue
        if all(e[0] or e[1] for e in f.F.coeffs):
            return f


# -- 3-prepared ladders ---------------------------------------------------------------


def eq3_form(rng, b: Bounds, m: int | None = None) -> ThreePrepForm:
    """``u = x^a``, ``v = P(x) + x^c (tau_0 z^m + sum tau_i x^r_i z^(m-i) + tau_m x^r_m)``."""
    while True:
        mm = m or rng.randint(b.m_min, b.m_max)
        F: dict = {(0, 0, mm): _coeff(rng, b)}
        if rng.random() < 0.5:
            F[(rng.randint(1, 2), 0, mm)] = _coeff(rng, b)
        for i in range(2, mm):
            if rng.random() < 0.6:
                F[(rng.randint(1, b.exp_max), 0, mm - i)] = _coeff(rng, b)
        if rng.random() < 0.7 or not any(e[2] == 1 for e in F):
            rm = rng.randint(1, b.exp_max)
            F[(rm, 1, 0)] = _coeff(rng, b)
            if rng.random() < 0.3:
                F[(rm, 2, 0)] = _coeff(rng, b)
        f = _form(One(rng.randint(1, 3)), (rng.randint(1, 3), 0, 0), F, b)
        if f is None:
            continue
        c = classify_3prepared(f)
        if isinstance(c, ThreePrepForm) and c.kind == "eq3" and c.m == mm:
            return c


def eq2_form(rng, b: Bounds, m: int | None = None) -> ThreePrepForm:
    """A 2-point ladder with the determinant condition on the last term."""
    while True:
        mm = m or rng.randint(b.m_min, b.m_max)
        pt = random_two_point(rng, b)
        mono = _random_mono(rng, b, 2)
        F: dict = {(0, 0, mm): _coeff(rng, b)}
        for i in range(2, mm + 1):
            if rng.random() < 0.6 or (i == mm and not any(e[2] == 1 for e in F)):
                while True:
                    r, s = rng.randint(0, b.exp_max), rng.randint(0, b.exp_max)
                    if 0 < r + s <= b.exp_max + 2:
                        break
                F[(r, s, mm - i)] = _coeff(rng, b)
        f = _form(pt, mono, F, b)
        if f is None or f.kind != 2:
            continue
        c = classify_3prepared(f)
        if not (isinstance(c, ThreePrepForm) and c.kind == "eq2" and c.m == mm):
            continue
        a, bb = c.form.ptype.exps[:2]
        cc, d = c.form.mono[:2]
        if c.nonzero(mm) and (c.r[mm] + cc) * bb - (c.s[mm] + d) * a == 0:
            continue
        return c


def random_ladder(rng, b: Bounds, m_min: int = 3):
    """Random irredundant ``(m, [r_2..r_{m-1}])`` with ``r_{m-1} > 0``.

    Nonzero entries increase strictly, so no ladder term is divisible by a
    later one and the ladder read back from the form is the one generated.
    """
    m = rng.randint(max(m_min, b.m_min), b.m_max)
    while True:
        r = [rng.randint(1, b.exp_max) if rng.random() < 0.6 else 0 for _ in range(2, m - 1)]
        r.append(rng.randint(1, b.exp_max))
        nz = [x for x in r if x]
        if all(p < q for p, q in zip(nz, nz[1:])):
            return m, r


def eq4_form(m: int, r: list[int], t: int, rng=None, b: Bounds = Bounds(), a: int = 1):
    """``v = x (z^m + sum tau_i x^r_i z^(m-i) + x^t y^2)``, classified."""
    rng = rng or random.Random(0)
    F: dict = {(0, 0, m): _coeff(rng, b)}
    for i, ri in enumerate(r, start=2):
        if ri:
            F[(ri, 0, m - i)] = _coeff(rng, b)
    F[(t, 2, 0)] = _coeff(rng, b)
    f = _form(One(a), (1, 0, 0), F, Bounds(trunc=max(b.trunc, t + 4)))
    return classify_3prepared(f)


def eq4_case(rng, b: Bounds):
    m, r = random_ladder(rng, b)
    return m, r, toric2d.omega(m, r)


# -- dim2 suite ------------------------------------------------------------------------


def dim2_pair(rng, b: Bounds, degree: int = 6):
    if rng.random() < 0.5:
        u = PlaneMonomial(rng.randint(1, 4))
    else:
        a, bb = _coprime_pair(rng, 1, 3)
        u = PlaneMonomial(a, bb, rng.randint(1, 2))
    v: dict = {}
    for _ in range(rng.randint(1, 8)):
        i, j = rng.randint(0, degree), rng.randint(0, degree)
        if 0 < i + j <= degree:
            v[(i, j)] = _coeff(rng, b)
    if rng.random() < 0.15:
        # J = 0 branch: v in k[x] or k[x^a y^b]
        v = {(k * u.a, k * u.b): _coeff(rng, b) for k in range(1, 4) if k * (u.a + u.b) <= degree}
    if not v:
        v = {(1, 0): Fraction(1)}
    return u, v
