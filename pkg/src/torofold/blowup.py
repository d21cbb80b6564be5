"""Chart substitutions for toroidal and permissible blow-ups.

A :class:`ChartMap` expresses the old coordinates through new ones,

    old_i = prod_j (new_j + c_j) ** E[i][j],

with integer exponents and a translation ``c_j`` per new variable.
:func:`apply_chart` substitutes the map into a :class:`LocalForm` and
re-derives the normal form at the origin of the new chart.  When the
pulled-back ``u`` picks up a unit factor from translated variables, that
unit is absorbed into the first divisor variable by a rational power
(``x1 -> x1 * W^(1/e)``), so the result is again ``u = M^l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from gmpy2 import mpq

from .localform import (
    DegenerateV,
    Inconclusive,
    InvariantViolation,
    LocalForm,
    NotApplicable,
    decompose,
    point_type_from_u,
    sigma,
)
from .pseries import (
    TOTAL,
    AtLeast,
    Exact,
    MalformedChart,
    TruncatedSeries,
    as_q,
    invert_unit,
    ord_restrict,
    partial,
    pow_rational_normalized,
    substitute,
)
from . import toric2d

# Deterministic stand-ins for generic constants.
GENERIC = (Fraction(3, 7), Fraction(5, 11), Fraction(7, 13))


def _det3(m) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


@dataclass(frozen=True)
class ChartMap:
    matrix: tuple[tuple[int, int, int], ...]
    shifts: tuple[Fraction, Fraction, Fraction] = (Fraction(0),) * 3
    kind: str = "toroidal"
    unimodular: bool = False

    def __post_init__(self):
        m = tuple(tuple(int(a) for a in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shifts", tuple(Fraction(c) for c in self.shifts))
        if len(m) != 3 or any(len(r) != 3 for r in m):
            raise MalformedChart("exponent matrix must be 3x3")
        for i, row in enumerate(m):
            for j, e in enumerate(row):
                if e < 0 and not self.shifts[j]:
                    raise MalformedChart(
                        f"negative exponent on the untranslated variable {j} in row {i}"
                    )
            if not any(e > 0 and not self.shifts[j] for j, e in enumerate(row)):
                raise MalformedChart(f"image of old variable {i} does not vanish at the chart origin")
        if self.unimodular and abs(_det3(m)) != 1:
            raise MalformedChart(f"matrix {m} is not unimodular (det {_det3(m)})")

    @property
    def det(self) -> int:
        return _det3(self.matrix)

    def to_dict(self) -> dict:
        return {
            "chart_kind": self.kind,
            "matrix": [list(r) for r in self.matrix],
            "constants": [str(c) for c in self.shifts],
        }


def monomial_chart(matrix, kind="toroidal", unimodular=False) -> ChartMap:
    return ChartMap(matrix, (Fraction(0),) * 3, kind, unimodular)


@dataclass(frozen=True)
class ChartResult:
    form: LocalForm
    sigma_before: Exact | AtLeast
    sigma_after: Exact | AtLeast
    chart: ChartMap
    order: tuple[int, int, int]  # chart column feeding each canonical variable
    kappa: mpq = mpq(1)  # u = kappa * M^l before rescaling
    notes: str = ""

    @property
    def point_kind(self) -> int:
        return self.form.kind

    def to_dict(self) -> dict:
        return {
            "chart": self.chart.to_dict(),
            "point": f"{self.form.kind}-point",
            "sigma_before": str(self.sigma_before),
            "sigma_after": str(self.sigma_after),
            "form": str(self.form),
            "notes": self.notes,
        }


def sigma_drop(before, after) -> bool | None:
    """``after < before``; None when truncation hides the answer."""
    if isinstance(after, AtLeast):
        return None if isinstance(before, AtLeast) else False
    if isinstance(before, AtLeast):
        return True
    return after.n < before.n


def sigma_not_above(before, after) -> bool | None:
    if isinstance(before, AtLeast):
        return True
    if isinstance(after, AtLeast):
        return None if after.bound <= before.n else False
    return after.n <= before.n


def _row_image(row, shifts, T, w) -> TruncatedSeries:
    mono = [e if not shifts[j] else 0 for j, e in enumerate(row)]
    img = TruncatedSeries.monomial(mono, 1, T, 3, w)
    for j, e in enumerate(row):
        if shifts[j] and e:
            base = TruncatedSeries.var(j, T, 3, w) + as_q(shifts[j])
            if e < 0:
                base = invert_unit(base)
            img = img * (base ** abs(e))
    return img


@lru_cache(maxsize=4096)
def _chart_images(E, c, T, w, ue):
    """Row images of a chart after the twist, with the divisor data; depends only on the chart."""
    imgs = [_row_image(E[i], c, T, w) for i in range(3)]
    mu = [sum(ue[i] * E[i][j] for i in range(3)) for j in range(3)]
    divisors = [j for j in range(3) if not c[j] and mu[j] > 0]
    if not divisors:
        raise MalformedChart("no component of the divisor passes through the chart origin")
    twisted = [j for j in range(3) if c[j] and mu[j]]
    kappa = mpq(1)
    for j in twisted:
        kappa *= as_q(c[j]) ** mu[j]
    if twisted:
        k = divisors[0]
        W = TruncatedSeries.one(T, 3, w)
        for j in twisted:
            base = TruncatedSeries.var(j, T, 3, w).scale(1 / as_q(c[j])) + 1
            if mu[j] < 0:
                base = invert_unit(base)
            W = W * base ** abs(mu[j])
        _, body = pow_rational_normalized(W, Fraction(-1, mu[k]))
        tw = [TruncatedSeries.var(i, T, 3, w) for i in range(3)]
        tw[k] = tw[k] * body
        imgs = [substitute(im, tw) for im in imgs]
    return tuple(imgs), tuple(mu), tuple(divisors), kappa


def apply_chart(form: LocalForm, chart: ChartMap, trunc: int | None = None) -> ChartResult:
    """Substitute ``chart`` into ``form`` and re-derive the normal form.

    Exact inputs keep untranslated directions exact and expand translated
    ones to ``trunc``; truncated inputs use total degree.  Raises
    :class:`Inconclusive` when unseen high-order terms could change the
    monomial factor of the new form.
    """
    sb = sigma(form)
    E, c = chart.matrix, chart.shifts
    exact = form.F.is_exact
    if exact:
        w = tuple(1 if c[j] else 0 for j in range(3))
        T = trunc if trunc is not None else form.trunc
    else:
        w = TOTAL
        T = form.trunc
    ue = form.ptype.u_exps
    imgs, mu, divisors, kappa = _chart_images(
        tuple(map(tuple, E)), tuple(as_q(x) for x in c), T, w, tuple(ue)
    )
    v = form.v()
    v1 = substitute(v, imgs, T if exact else None)
    order = tuple(list(divisors) + [j for j in range(3) if j not in divisors])
    perm = [0, 0, 0]
    for k, j in enumerate(order):
        perm[j] = k
    v1 = v1.permute(perm)
    mu1 = tuple(mu[j] if j in divisors else 0 for j in order)
    ptype = point_type_from_u(mu1)
    try:
        new = decompose(ptype, v1)
    except DegenerateV as exc:
        raise Inconclusive(f"v is a series in the new monomial up to truncation: {exc}") from exc
    new = LocalForm(new.ptype, new.P, new.mono, new.F, v1.trunc)
    if not v1.is_exact:
        _shadow_guard(form, chart, order, len(divisors), new)
    sa = sigma(new)
    return ChartResult(new, sb, sa, chart, order, kappa)


def _shadow_guard(form, chart, order, n, new) -> None:
    """Every unseen term must be divisible by the new monomial factor."""
    E = chart.matrix
    if form.F.is_exact:
        exps = [tuple(a + b for a, b in zip(e, form.mono)) for e in form.F.coeffs]
    else:
        exps = [form.mono]
    for e in exps:
        for k in range(n):
            j = order[k]
            sh = sum(e[i] * E[i][j] for i in range(3))
            if sh < new.mono[k]:
                raise Inconclusive(
                    f"unseen terms may lower the monomial factor in variable {k} "
                    f"(shadow {sh} < {new.mono[k]})"
                )


def apply_chart_adaptive(form: LocalForm, chart: ChartMap, start: int | None = None) -> ChartResult:
    """Apply a chart, doubling the translated-direction truncation until sigma is certified."""
    cap = max(form.trunc, 4)
    sb = sigma(form)
    if start is None:
        start = sb.n + 3 if isinstance(sb, Exact) else cap
    K = min(max(start, 2), cap)
    while True:
        res = apply_chart(form, chart, K)
        if isinstance(res.sigma_after, Exact) or res.form.F.is_exact or K >= cap:
            return res
        K = min(2 * K, cap)


def compose_monomial(first: ChartMap, order: Sequence[int], second: ChartMap) -> ChartMap:
    """The single chart equal to ``first`` followed by ``second``.

    ``order`` is the column order of the canonical variables produced by
    applying ``first``; both charts must be untranslated.
    """
    if any(first.shifts) or any(second.shifts):
        raise MalformedChart("only untranslated charts compose to a single monomial chart")
    A, B = first.matrix, second.matrix
    Pm = [[1 if order[k] == j else 0 for k in range(3)] for j in range(3)]
    AP = [[sum(A[i][j] * Pm[j][k] for j in range(3)) for k in range(3)] for i in range(3)]
    M = [[sum(AP[i][k] * B[k][l] for k in range(3)) for l in range(3)] for i in range(3)]
    return monomial_chart(M, "composite")


# -- toroidal charts at 2-points and 3-points ----------------------------------------


def transform_2curve_chart(form: LocalForm, a, alpha=0) -> ChartResult:
    """``x = x1^a11 (y1+alpha)^a12, y = x1^a21 (y1+alpha)^a22`` at a 2-point."""
    if form.kind != 2:
        raise NotApplicable("needs a 2-point form")
    (a11, a12), (a21, a22) = a
    chart = ChartMap(
        ((a11, a12, 0), (a21, a22, 0), (0, 0, 1)),
        (Fraction(0), Fraction(alpha), Fraction(0)),
        "2-curve",
        unimodular=True,
    )
    return apply_chart_adaptive(form, chart)


def transform_3point_chart(form: LocalForm, a, consts=(0, 0, 0)) -> ChartResult:
    """The general toroidal chart at a prepared 3-point."""
    if form.kind != 3:
        raise NotApplicable("needs a 3-point form")
    if sigma(form) != Exact(0):
        raise NotApplicable("3-points with sigma > 0 are principalized first")
    if all(consts):
        raise MalformedChart("at least one translation constant must be zero")
    chart = ChartMap(a, tuple(Fraction(c) for c in consts), "3-point", unimodular=True)
    return apply_chart_adaptive(form, chart)


def legal_2curve_charts(max_entry: int = 2, constants=(0,) + GENERIC[:1]):
    """Unimodular nonnegative 2x2 charts with entries up to ``max_entry``."""
    out = []
    rng = range(max_entry + 1)
    for a11, a12, a21, a22 in product(rng, repeat=4):
        if abs(a11 * a22 - a12 * a21) != 1:
            continue
        for alpha in constants:
            if alpha:
                if a11 == 0 or a21 == 0:
                    continue
            elif (a11 == 0 and a12 == 0) or (a21 == 0 and a22 == 0):
                continue
            out.append((((a11, a12), (a21, a22)), alpha))
    return out


def legal_3point_charts(max_entry: int = 1, constants=(0,) + GENERIC[:1]):
    """Unimodular nonnegative 3x3 charts with translation patterns."""
    out = []
    rng = range(max_entry + 1)
    for flat in product(rng, repeat=9):
        m = (flat[0:3], flat[3:6], flat[6:9])
        if abs(_det3(m)) != 1:
            continue
        for cs in product(constants, repeat=3):
            if all(cs):
                continue
            ok = all(any(m[i][j] > 0 and not cs[j] for j in range(3)) for i in range(3))
            if ok:
                out.append((m, cs))
    return out


# -- principalization of the support ideal --------------------------------------


def _dot(g, w) -> int:
    return g[0] * w[0] + g[1] * w[1] + g[2] * w[2]


def _principal(gens, cone) -> bool:
    imgs = [tuple(_dot(g, w) for w in cone) for g in gens]
    lo = tuple(min(p[k] for p in imgs) for k in range(3))
    return lo in imgs


def _face_linear(gens, a, b) -> bool:
    va = min(_dot(g, a) for g in gens)
    vb = min(_dot(g, b) for g in gens)
    return any(_dot(g, a) == va and _dot(g, b) == vb for g in gens)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def principalizing_fan_3d(gens, max_steps: int = 200) -> tuple[list, list]:
    """Star subdivisions of the octant until every cone principalizes ``gens``.

    Nonlinear 2-faces are subdivided first (2-curve blow-ups); a cone whose
    faces are all linear is subdivided at its barycenter (3-point blow-up).
    Returns the cones and the blow-up centers in order.
    """
    e = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    cones = [e]
    steps = []
    for _ in range(max_steps):
        bad = [c for c in cones if not _principal(gens, c)]
        if not bad:
            return cones, steps
        faces = set()
        for c in bad:
            for a, b in combinations(c, 2):
                if not _face_linear(gens, a, b):
                    faces.add(tuple(sorted((a, b))))
        if faces:
            a, b = min(faces, key=lambda f: (sum(f[0]) + sum(f[1]), f))
            w = _add(a, b)
            new = []
            for c in cones:
                if a in c and b in c:
                    new.append(tuple(w if r == a else r for r in c))
                    new.append(tuple(w if r == b else r for r in c))
                else:
                    new.append(c)
            cones = new
            steps.append(("2-curve", a, b))
        else:
            c = min(bad)
            w = _add(_add(c[0], c[1]), c[2])
            cones = [d for d in cones if d != c] + [
                tuple(w if r == c[k] else r for r in c) for k in range(3)
            ]
            steps.append(("3-point", c))
    raise Inconclusive(f"principalization did not finish within {max_steps} blow-ups")


def _cone_matrix(cone):
    return tuple(tuple(cone[j][i] for j in range(3)) for i in range(3))


def support_ideal(F: TruncatedSeries, variables: Sequence[int]) -> list[tuple[int, ...]]:
    pts = {tuple(e[i] if i in variables else 0 for i in range(3)) for e in F.coeffs}
    return sorted(
        g for g in pts if not any(h != g and all(h[i] <= g[i] for i in range(3)) for h in pts)
    )


def principalize_3point(form: LocalForm, max_steps: int = 200) -> list[ChartResult]:
    """Toroidal charts at 3-points making the support ideal of F principal."""
    if form.kind != 3:
        raise NotApplicable("needs a 3-point form")
    if form.F.is_zero():
        raise Inconclusive("F vanishes up to truncation", form.trunc)
    if form.F.constant_term:
        return []
    gens = support_ideal(form.F, (0, 1, 2))
    cones, _ = principalizing_fan_3d(gens, max_steps)
    out = []
    for cone in sorted(cones):
        chart = monomial_chart(_cone_matrix(cone), "3-point-fan", unimodular=True)
        out.append(apply_chart(form, chart))
    return out


def principalize_2point_coeffs(form: LocalForm) -> list[ChartResult]:
    """2-curve blow-ups making the ideal of the z-coefficients of F principal."""
    if form.kind != 2:
        raise NotApplicable("needs a 2-point form")
    if form.F.is_zero():
        raise Inconclusive("F vanishes up to truncation", form.trunc)
    pts = [(e[0], e[1]) for e in form.F.coeffs]
    I = toric2d.MonomialIdeal2D.of(pts)
    fan = toric2d.minimal_principalizing_fan(I)
    out = []
    for w1, w2 in fan.cones():
        chart = monomial_chart(
            ((w1[0], w2[0], 0), (w1[1], w2[1], 0), (0, 0, 1)), "2-curve-fan", unimodular=True
        )
        out.append(apply_chart(form, chart))
    return out


# -- blow-ups of points and permissible curves ------------------------------------


def blowup_center_charts(center: Sequence[int], constants=(0,) + GENERIC[:1]) -> list[ChartMap]:
    """Charts of the blow-up of the coordinate subspace ``{x_i = 0, i in center}``.

    For each ``k`` in the center the chart ``x_k = x1_k`` and
    ``x_l = x1_k (x1_l + c_l)`` for the other center variables, with
    ``c_l`` running over ``constants``.
    """
    charts = []
    for k in center:
        others = [l for l in center if l != k]
        for cs in product(constants, repeat=len(others)):
            m = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
            shifts = [Fraction(0)] * 3
            for l, cl in zip(others, cs):
                m[l][k] = 1
                shifts[l] = Fraction(cl)
            charts.append(ChartMap(m, shifts, f"blowup-{''.join('xyz'[i] for i in center)}-{'xyz'[k]}"))
    return charts


def blowup_point(form: LocalForm, require_prepared: bool = True) -> list[ChartResult]:
    """Blow up the origin; the standard charts and generic points of the exceptional plane."""
    if require_prepared and sigma(form) != Exact(0):
        raise NotApplicable("the point is not prepared")
    return [apply_chart_adaptive(form, ch) for ch in blowup_center_charts((0, 1, 2))]


def _is_var(F: TruncatedSeries, i: int) -> bool:
    e = [0, 0, 0]
    e[i] = 1
    return dict(F.coeffs) == {tuple(e): 1}


CURVE_CENTERS = {1: (0, 1), 4: (0, 2), 6: (0, 2)}


def blowup_permissible_curve(form: LocalForm, variant: int) -> list[ChartResult]:
    """Blow up a permissible curve in one of the coordinate forms 1, 4 or 6."""
    if variant not in CURVE_CENTERS:
        raise NotApplicable(f"curve form {variant} goes through point blow-ups first")
    if sigma(form) != Exact(0):
        raise NotApplicable("the point is not prepared")
    if variant == 1 and not (form.kind == 1 and _is_var(form.F, 2)):
        raise NotApplicable("form 1 needs a 1-point with F = z")
    if variant == 4 and not (form.kind == 2 and _is_var(form.F, 2)):
        raise NotApplicable("form 4 needs a 2-point with F = z")
    if variant == 6 and not (form.kind == 2 and form.F.constant_term):
        raise NotApplicable("form 6 needs a 2-point with F a unit")
    return [apply_chart_adaptive(form, ch) for ch in blowup_center_charts(CURVE_CENTERS[variant])]


@dataclass(frozen=True)
class CurveForm:
    variant: int
    r: int | None = None
    detail: str = ""


def _solve_for(f: TruncatedSeries, var: int, other: int) -> TruncatedSeries:
    """The series ``g(other)`` with ``f = 0`` along ``var = g``."""
    T = f.trunc
    g = TruncatedSeries.zero(T, 3, f.weights)
    fv = partial(f, var)
    for _ in range(T + 2):
        imgs = [TruncatedSeries.var(i, T, 3, f.weights) for i in range(3)]
        imgs[var] = g
        val = substitute(f, imgs, T)
        if val.is_zero():
            break
        der = substitute(fv, imgs, T)
        new = (g - val * invert_unit(der.truncate(val.trunc))).truncate(T)
        if new == g:
            break
        g = new
    return g


def classify_curve_form(form: LocalForm, f: TruncatedSeries) -> CurveForm:
    """Which coordinate form a permissible curve ``x = f(y, z) = 0`` takes at the origin."""
    if sigma(form) != Exact(0):
        raise NotApplicable("the point is not prepared")
    if any(e[0] for e in f.coeffs):
        raise NotApplicable("the second equation must be a series in y and z")
    if f.constant_term:
        raise NotApplicable("the curve does not pass through the origin")
    fy = f.coefficient((0, 1, 0))
    fz = f.coefficient((0, 0, 1))
    if not fy and not fz:
        raise NotApplicable("the curve is singular at the origin")
    T = f.trunc if not f.is_exact else form.trunc
    fs = f if not f.is_exact else f.with_weights(TOTAL, T)
    if form.kind == 1:
        if not _is_var(form.F, 2):
            raise NotApplicable("normalize F = z first")
        if fy:
            return CurveForm(1, None, "solved for y")
        g = _solve_for(fs, 2, 1)
        if g.is_zero():
            return CurveForm(2, None, "x = z = 0")
        r = g.order()
        if r >= g.trunc:
            raise Inconclusive("curve agrees with z = 0 up to truncation", g.trunc)
        return CurveForm(3, r, f"z = {-g}")
    if form.kind == 2:
        if form.F.constant_term:
            if not fz:
                raise NotApplicable("the curve is tangent to the 2-curve")
            return CurveForm(6, None, "z replaced by the second equation")
        if not _is_var(form.F, 2):
            raise NotApplicable("normalize F = z first")
        if not fz:
            raise NotApplicable("the curve is the 2-curve or tangent to it")
        if f.restrict([2]).is_zero():
            if not f.is_exact:
                raise Inconclusive("divisibility by z only known up to truncation", f.trunc)
            return CurveForm(4, None, "x = z = 0")
        return CurveForm(5, None, "second equation not divisible by z")
    raise NotApplicable("curves through 3-points are 2-curves")
