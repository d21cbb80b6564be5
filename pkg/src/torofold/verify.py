"""Harnesses that execute the local reduction theorems chart by chart.

Each harness builds the relevant ideal and fan, substitutes the form into
every chart over the center point, and compares the resulting sigma values
with the theorem's conclusion.  Verdicts are ``pass``, ``fail`` or
``inconclusive``; truncation never produces a ``fail``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import toric2d, upoly
from .blowup import (
    GENERIC,
    ChartMap,
    ChartResult,
    apply_chart_adaptive,
    blowup_permissible_curve,
    blowup_point,
    legal_2curve_charts,
    legal_3point_charts,
    sigma_not_above,
    transform_2curve_chart,
    transform_3point_chart,
    monomial_chart,
    principalize_2point_coeffs,
    principalize_3point,
    principalizing_fan_3d,
)
from .localform import (
    Inconclusive,
    LocalForm,
    NotApplicable,
    ThreePrepForm,
    classify_3prepared,
    decompose,
    sigma,
)
from .pseries import AtLeast, Exact, TruncatedSeries, partial, substitute

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class PreconditionViolated(ValueError):
    pass


class DepthExceeded(RuntimeError):
    pass


@dataclass
class Leaf:
    label: str
    verdict: str
    sigma: str
    point: str = ""
    chart: dict | None = None
    form: str = ""
    detail: str = ""

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "verdict": self.verdict,
            "sigma": self.sigma,
            "point": self.point,
            "detail": self.detail,
        }
        if self.chart is not None:
            d["chart"] = self.chart
        if self.form:
            d["form"] = self.form
        return d


@dataclass
class ChartTree:
    root: str
    leaves: list[Leaf] = field(default_factory=list)

    def add(self, leaf: Leaf) -> None:
        self.leaves.append(leaf)


@dataclass
class TheoremReport:
    theorem: str
    verdict: str
    sigma_before: str
    gamma_after: str | None
    tree: ChartTree
    fan: dict | None = None
    omega_used: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def witness(self) -> Leaf | None:
        return next((l for l in self.tree.leaves if l.verdict == FAIL), None)

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "sigma_before": self.sigma_before,
            "gamma_after": self.gamma_after,
            "root": self.tree.root,
            "charts": [l.to_dict() for l in self.tree.leaves],
            "fan": self.fan,
            "omega_used": self.omega_used,
            "witness": w.label if w else None,
            "notes": self.notes,
        }


def _combine(leaves: list[Leaf]) -> str:
    if any(l.verdict == FAIL for l in leaves):
        return FAIL
    if any(l.verdict == INCONCLUSIVE for l in leaves):
        return INCONCLUSIVE
    return PASS


def _gamma(values) -> str | None:
    vals = list(values)
    if not vals:
        return None
    if any(isinstance(v, AtLeast) for v in vals):
        return str(max(vals, key=lambda v: v.bound if isinstance(v, AtLeast) else v.n))
    return str(max(v.n for v in vals))


def _leaf_from(label, res: ChartResult, ok: bool | None, detail="") -> Leaf:
    verdict = PASS if ok else (INCONCLUSIVE if ok is None else FAIL)
    return Leaf(
        label,
        verdict,
        str(res.sigma_after),
        f"{res.form.kind}-point",
        res.chart.to_dict(),
        str(res.form),
        detail,
    )


def _lt(s, bound: int) -> bool | None:
    if isinstance(s, Exact):
        return s.n < bound
    return False if s.bound >= bound else None


def _le(s, bound: int) -> bool | None:
    if isinstance(s, Exact):
        return s.n <= bound
    return False if s.bound > bound else None


def _safe_apply(form, chart, label, tree, sigmas):
    try:
        res = apply_chart_adaptive(form, chart)
    except Inconclusive as exc:
        tree.add(Leaf(label, INCONCLUSIVE, "?", chart=chart.to_dict(), detail=str(exc)))
        return None
    sigmas.append(res.sigma_after)
    return res


# -- 1-point theorems ---------------------------------------------------------------


def _chart3d(c: toric2d.Chart2D, alpha=GENERIC[0]) -> ChartMap:
    """Lift a chart in (x, z) to (x, y, z) with y untouched."""
    (xa, xb), (za, zb) = c.matrix()
    if c.shape == "interior":
        return ChartMap(((xa, 0, 0), (0, 1, 0), (za, 0, 1)), (0, 0, alpha), "exceptional-curve")
    kind = {"two_point": "fixed-point", "strict": "strict-transform", "identity": "identity"}[c.shape]
    return monomial_chart(((xa, 0, xb), (0, 1, 0), (za, 0, zb)), kind)


def worst_interior_sigma(form: LocalForm, a1: int, b1: int) -> int | None:
    """Upper bound for sigma over all points ``alpha != 0`` of the exceptional curve ``(a1, b1)``.

    With ``x = x1^a1, z = x1^b1 t`` the lowest x1-order part of F restricted
    to ``y = 0`` is a polynomial ``h(t)``; at ``t = alpha`` the new F
    restricted to the divisor has z1-order ``1 + mult_alpha(h')``.  None
    when ``h`` is constant.
    """
    terms = [(e, c) for e, c in form.F.coeffs.items() if e[1] == 0]
    if not terms:
        return None
    s = min(a1 * e[0] + b1 * e[2] for e, _ in terms)
    h = {}
    for e, c in terms:
        if a1 * e[0] + b1 * e[2] == s:
            h[e[2]] = h.get(e[2], 0) + Fraction(c)
    poly = [h.get(k, Fraction(0)) for k in range(max(h) + 1)]
    dp = upoly.deriv(poly)
    if not dp:
        return None
    return upoly.max_nonzero_root_multiplicity(dp)


def as_template(f, kind: str) -> ThreePrepForm:
    """Accept a matched template or a form to classify; prepared forms are not applicable."""
    if isinstance(f, LocalForm):
        if sigma(f) == Exact(0):
            raise NotApplicable("the point is already prepared")
        f = classify_3prepared(f, prefer="eq4" if kind == "eq4" else None)
    if not isinstance(f, ThreePrepForm):
        raise PreconditionViolated(f"not a 3-prepared ladder: {getattr(f, 'witness', f)}")
    if f.kind != kind:
        raise PreconditionViolated(f"expected an {kind} form, got {f.kind}")
    return f


def _ladder_ideal_2d(f: ThreePrepForm, with_tau_m: bool) -> toric2d.MonomialIdeal2D:
    gens = [(0, f.m)]
    for i in range(2, f.m):
        if f.nonzero(i):
            gens.append((f.r[i], f.m - i))
    if with_tau_m and f.nonzero(f.m):
        gens.append((f.r[f.m], 0))
    return toric2d.MonomialIdeal2D.of(gens)


def _run_1point_charts(form, m, I, fan, tree, sigmas, strict_ok_needs_drop=False):
    for c in toric2d.enumerate_charts(fan):
        label = f"{c.shape}({c.a1},{c.b1},{c.c1},{c.d1})"
        principal = toric2d.is_principal_in_chart(I, c) is not None
        res = _safe_apply(form, _chart3d(c), label, tree, sigmas)
        if res is None:
            continue
        s = res.sigma_after
        if c.shape == "interior":
            ok = _lt(s, m - 1)
            worst = worst_interior_sigma(form, c.a1, c.b1)
            detail = f"worst over alpha <= {worst}"
            if ok and worst is not None and worst >= m - 1:
                ok = False
            tree.add(_leaf_from(label + " generic alpha", res, ok, detail))
        elif c.shape == "two_point":
            prepared = s == Exact(0)
            ok = (prepared == principal) and (_lt(s, m - 1) if principal else True)
            if isinstance(s, AtLeast) and principal:
                ok = None
            tree.add(_leaf_from(label, res, ok, f"principal={principal}"))
        else:
            ok = _lt(s, m - 1) if (principal or strict_ok_needs_drop) else _le(s, m - 1)
            tree.add(_leaf_from(label, res, ok, f"principal={principal}"))


def run_1point_reduction(f: ThreePrepForm | LocalForm) -> TheoremReport:
    """Chart-by-chart check of the 1-point reduction for a matched eq3 form."""
    f = as_template(f, "eq3")
    f.validate()
    m = f.m
    form = f.form
    I = _ladder_ideal_2d(f, True)
    fan = toric2d.minimal_principalizing_fan(I)
    tree = ChartTree(str(form))
    sigmas: list = []
    _run_1point_charts(form, m, I, fan, tree, sigmas)
    return TheoremReport(
        "1-point reduction",
        _combine(tree.leaves),
        str(Exact(m - 1)),
        _gamma(sigmas),
        tree,
        {"ideal": I.to_list(), **fan.to_dict()},
    )


def tail_dominates(c: toric2d.Chart2D, t: int, gens) -> bool:
    """``x^t`` pulls back to strictly higher order than every generator."""
    if c.shape == "identity":
        return False
    (xa, xb), _ = c.matrix()
    tail = (t * xa, t * xb)
    for g in gens:
        img = c.pullback(g)
        for k, xe in enumerate((xa, xb)):
            if xe > 0 and not tail[k] > img[k]:
                return False
    return True


def run_1point_spec(f: ThreePrepForm | LocalForm) -> TheoremReport:
    """Chart-by-chart check of the eq4 reduction, including the tail bound."""
    if isinstance(f, LocalForm) and not any(e[2] == 0 for e in f.F.coeffs):
        rep = run_1point_reduction(f)
        rep.notes.append("no x^t tail; checked as an eq3 ladder with tau_m = 0")
        return rep
    f = as_template(f, "eq4")
    m = f.m
    r = f.r_list()
    om = toric2d.omega(m, r)
    if f.t is None or f.t <= om:
        raise PreconditionViolated(f"t = {f.t} must exceed omega = {om}")
    form = f.form
    I = toric2d.ladder_ideal(m, r)
    fan = toric2d.minimal_principalizing_fan(I, toric2d.StrictTransformCondition(m, tuple(r)))
    tree = ChartTree(str(form))
    sigmas: list = []
    _run_1point_charts(form, m, I, fan, tree, sigmas, strict_ok_needs_drop=True)
    notes = []
    for c in toric2d.enumerate_charts(fan):
        if not tail_dominates(c, f.t, I.gens):
            tree.add(Leaf(f"tail {c.shape}({c.a1},{c.b1})", FAIL, "-", detail="x^t tail not dominated"))
    notes.append("x^t tail exceeds every generator order in every chart")
    return TheoremReport(
        "1-point reduction with tail",
        _combine(tree.leaves),
        str(Exact(m - 1)),
        _gamma(sigmas),
        tree,
        {"ideal": I.to_list(), **fan.to_dict()},
        om,
        notes,
    )


# -- 2-point theorem -----------------------------------------------------------------


def fiber_charts_3d(cones) -> list[tuple[str, ChartMap]]:
    """Charts at every torus orbit of the fan lying over the origin.

    Fixed points of cones, generic points of 1-dimensional orbits of
    2-faces in the open octant and generic points of 2-dimensional orbits
    of interior rays.
    """
    out = []
    faces_seen, rays_seen = set(), set()
    for cone in sorted(cones):
        M = tuple(tuple(cone[j][i] for j in range(3)) for i in range(3))
        out.append((f"3-point {cone}", monomial_chart(M, "fixed-point", unimodular=True)))
        for i, j in combinations(range(3), 2):
            face = tuple(sorted((cone[i], cone[j])))
            s = tuple(a + b for a, b in zip(*face))
            if face in faces_seen or not all(s):
                continue
            faces_seen.add(face)
            k = 3 - i - j
            shifts = [Fraction(0)] * 3
            shifts[k] = GENERIC[0]
            out.append((f"curve {face}", ChartMap(M, shifts, "curve-orbit", unimodular=True)))
        for i in range(3):
            w = cone[i]
            if w in rays_seen or not all(w):
                continue
            rays_seen.add(w)
            shifts = [GENERIC[0], GENERIC[1], GENERIC[2]]
            shifts[i] = Fraction(0)
            out.append((f"surface {w}", ChartMap(M, shifts, "surface-orbit", unimodular=True)))
    return out


def run_2point_reduction(f: ThreePrepForm | LocalForm) -> TheoremReport:
    """Chart-by-chart check that sigma drops everywhere over a 2-point."""
    f = as_template(f, "eq2")
    a, b = f.form.ptype.exps[:2]
    c, d = f.form.mono[:2]
    m = f.m
    if f.nonzero(m) and (f.r[m] + c) * b - (f.s[m] + d) * a == 0:
        raise PreconditionViolated("(r_m + c) b - (s_m + d) a = 0")
    f.validate()
    gens = [(0, 0, m)]
    for i in range(2, m):
        if f.nonzero(i):
            gens.append((f.r[i], f.s[i], m - i))
    if f.nonzero(m):
        gens.append((f.r[m], f.s[m], 0))
    tree = ChartTree(str(f.form))
    sigmas: list = []
    try:
        cones, steps = principalizing_fan_3d(gens)
    except Inconclusive as exc:
        tree.add(Leaf("fan", INCONCLUSIVE, "?", detail=str(exc)))
        return TheoremReport("2-point reduction", INCONCLUSIVE, str(Exact(m - 1)), None, tree)
    for label, chart in fiber_charts_3d(cones):
        res = _safe_apply(f.form, chart, label, tree, sigmas)
        if res is not None:
            tree.add(_leaf_from(label, res, _lt(res.sigma_after, m - 1)))
    fan = {"ideal": [list(g) for g in gens], "cones": [[list(r) for r in c] for c in sorted(cones)],
           "blowups": len(steps)}
    return TheoremReport(
        "2-point reduction", _combine(tree.leaves), str(Exact(m - 1)), _gamma(sigmas), tree, fan
    )


# -- principalization at 3-points and 2-points ---------------------------------------


def run_3point_principalization(form: LocalForm) -> TheoremReport:
    """Toroidal principalization making sigma finite, and zero at 3-points."""
    sb = sigma(form)
    tree = ChartTree(str(form))
    if isinstance(sb, Exact):
        if form.kind == 3 and sb.n != 0:
            tree.add(Leaf("input", FAIL, str(sb), detail="3-point with finite nonzero sigma"))
            return TheoremReport("3-point principalization", FAIL, str(sb), str(sb), tree)
        tree.add(Leaf("input", PASS, str(sb), f"{form.kind}-point", detail="already finite"))
        return TheoremReport("3-point principalization", PASS, str(sb), str(sb), tree)
    try:
        if form.kind == 3:
            results = principalize_3point(form)
        elif form.kind == 2:
            results = principalize_2point_coeffs(form)
        else:
            raise NotApplicable("1-points always have finite sigma")
    except Inconclusive as exc:
        tree.add(Leaf("principalization", INCONCLUSIVE, "?", detail=str(exc)))
        return TheoremReport("3-point principalization", INCONCLUSIVE, str(sb), None, tree)
    sigmas = []
    for k, res in enumerate(results):
        s = res.sigma_after
        sigmas.append(s)
        if res.form.kind == 3:
            # the constant term is always known, so AtLeast here is a genuine failure
            ok = s == Exact(0)
        elif res.form.kind == 2:
            ok = True if isinstance(s, Exact) else None
        else:
            ok = True
        tree.add(_leaf_from(f"chart {k}", res, ok))
    return TheoremReport(
        "3-point principalization", _combine(tree.leaves), str(sb), _gamma(sigmas), tree
    )


def specialize_2curve(form: LocalForm, alpha=GENERIC[0]) -> TheoremReport:
    """sigma vanishes at a generic point of the 2-curve through a 2-point."""
    if form.kind != 2:
        raise NotApplicable("needs a 2-point form")
    sb = sigma(form)
    if not isinstance(sb, Exact):
        raise PreconditionViolated("sigma must be finite")
    if sb.n == 0:
        raise NotApplicable("already prepared")
    tree = ChartTree(str(form))
    Fz = partial(form.F, 2).restrict([0, 1])
    if Fz.is_zero():
        tree.add(Leaf("dF/dz(0,0,z)", INCONCLUSIVE if not form.F.is_exact else FAIL, "-",
                      detail="vanishes up to truncation"))
        return TheoremReport("specialization", _combine(tree.leaves), str(sb), None, tree)
    degree = Fz.degree()
    v = form.v()
    if not v.is_exact:
        raise PreconditionViolated("translation along z needs an exact form")
    T = form.trunc
    imgs = [TruncatedSeries.var(i, T, 3, v.weights) for i in range(3)]
    imgs[2] = imgs[2] + Fraction(alpha)
    shifted = decompose(form.ptype, substitute(v, imgs, T))
    s1 = sigma(shifted)
    ok = s1 == Exact(0)
    tree.add(Leaf(f"z -> z + {alpha}", PASS if ok else FAIL, str(s1), "2-point", form=str(shifted),
                  detail=f"dF/dz(0,0,z) has degree {degree}; at most {degree} exceptional values"))
    return TheoremReport("specialization", _combine(tree.leaves), str(sb), str(s1), tree)


def _prepared_everywhere(name: str, form: LocalForm, results) -> TheoremReport:
    tree = ChartTree(str(form))
    sigmas = []
    for res in results:
        s = res.sigma_after
        sigmas.append(s)
        ok = True if s == Exact(0) else (None if isinstance(s, AtLeast) and s.bound == 0 else False)
        shifts = ",".join(str(c) for c in res.chart.shifts)
        tree.add(_leaf_from(f"{res.chart.kind} at ({shifts})", res, ok))
    return TheoremReport(name, _combine(tree.leaves), str(sigma(form)), _gamma(sigmas), tree)


def run_point_blowup(form: LocalForm) -> TheoremReport:
    """Every point over a blown-up prepared point is prepared."""
    return _prepared_everywhere("point blow-up", form, blowup_point(form))


def run_curve_blowup(form: LocalForm, variant: int) -> TheoremReport:
    """Every point over a blown-up permissible curve is prepared."""
    return _prepared_everywhere(f"curve blow-up (form {variant})", form,
                                blowup_permissible_curve(form, variant))


def run_torgood(form: LocalForm) -> TheoremReport:
    """sigma does not increase under any legal toroidal chart."""
    sb = sigma(form)
    tree = ChartTree(str(form))
    sigmas = []
    if form.kind == 2:
        charts = [(a, al, transform_2curve_chart) for a, al in legal_2curve_charts()]
    elif form.kind == 3 and sb == Exact(0):
        charts = [(a, cs, transform_3point_chart) for a, cs in legal_3point_charts()]
    else:
        raise NotApplicable("toroidal charts act on 2-points and prepared 3-points")
    for a, consts, transform in charts:
        label = f"{a} at {consts}"
        try:
            res = transform(form, a, consts)
        except Inconclusive as exc:
            tree.add(Leaf(label, INCONCLUSIVE, "?", detail=str(exc)))
            continue
        sigmas.append(res.sigma_after)
        tree.add(_leaf_from(label, res, sigma_not_above(sb, res.sigma_after)))
    return TheoremReport("toroidal monotonicity", _combine(tree.leaves), str(sb), _gamma(sigmas), tree)
