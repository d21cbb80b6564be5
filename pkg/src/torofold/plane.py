"""Morphism germs between surfaces: reduction to monomial forms by point blow-ups.

For ``u = x^a`` or ``u = (x^a y^b)^l`` and a polynomial ``v`` the Jacobian
``J = u_x v_y - u_y v_x`` is computed.  When ``J`` vanishes, ``v`` is a
series in ``x`` (or in ``x^a y^b``), which is certified from the support.
Otherwise the curve ``u J = 0`` is made SNC over the origin by quadratic
transforms and each terminal point is classified as

* form 1: ``u = x1^a1``, ``v = P(x1) + x1^e y1^f``, ``f > 0``;
* form 2: ``u = (x1^a1 y1^b1)^l1``, ``v = P(x1^a1 y1^b1) + x1^c1 y1^d1``,
  ``a1 d1 - b1 c1 != 0``.

The exponents are read off the Jacobian of the local pullbacks: with
``u = x^a1`` and ``J = x^B g^C`` (``g`` transverse to ``x = 0``) one has
``e = B - a1 + 1`` and ``f = C + 1``; with ``u = M^l1`` and ``J = x^C y^D``
one has ``c1 = C - l1 a1 + 1`` and ``d1 = D - l1 b1 + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

import sympy

from . import upoly
from .pseries import TruncatedSeries
from .verify import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    ChartTree,
    DepthExceeded,
    Leaf,
    PreconditionViolated,
    TheoremReport,
    _combine,
)

Poly2 = dict  # {(i, j): Fraction}

DEFAULT_MAX_DEPTH = 24


@dataclass(frozen=True)
class PlaneMonomial:
    """``u = x^a`` (``b == 0``) or ``u = (x^a y^b)^l`` with ``gcd(a, b) = 1``."""

    a: int
    b: int = 0
    l: int = 1

    def __post_init__(self):
        if self.a < 1 or self.b < 0 or self.l < 1:
            raise PreconditionViolated("need a >= 1, b >= 0, l >= 1")
        if self.b == 0 and self.l != 1:
            raise PreconditionViolated("u = x^a takes l = 1")
        if self.b > 0 and gcd(self.a, self.b) != 1:
            raise PreconditionViolated("coprimality: gcd(a, b) must be 1")

    def poly(self) -> Poly2:
        return {(self.a * self.l, self.b * self.l): Fraction(1)}

    def __str__(self) -> str:
        if self.b == 0:
            return f"x^{self.a}"
        return f"(x^{self.a}*y^{self.b})^{self.l}"


# -- exact bivariate polynomials -------------------------------------------------


def _clean(p: Poly2) -> Poly2:
    return {e: c for e, c in p.items() if c != 0}


def padd(p: Poly2, q: Poly2, sign=1) -> Poly2:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, Fraction(0)) + sign * c
    return _clean(out)


def pmul(p: Poly2, q: Poly2) -> Poly2:
    out: Poly2 = {}
    for (i, j), c in p.items():
        for (k, l), d in q.items():
            key = (i + k, j + l)
            out[key] = out.get(key, Fraction(0)) + c * d
    return _clean(out)


def pdiff(p: Poly2, var: int) -> Poly2:
    out = {}
    for e, c in p.items():
        if e[var]:
            f = list(e)
            f[var] -= 1
            out[tuple(f)] = c * e[var]
    return out


def jacobian(u: Poly2, v: Poly2) -> Poly2:
    return padd(pmul(pdiff(u, 0), pdiff(v, 1)), pmul(pdiff(u, 1), pdiff(v, 0)), -1)


def chart_a(p: Poly2) -> Poly2:
    """``x = x1, y = x1 y1``."""
    return {(i + j, j): c for (i, j), c in p.items()}


def chart_b(p: Poly2) -> Poly2:
    """``x = x1 y1, y = y1``."""
    return {(i, i + j): c for (i, j), c in p.items()}


def translate_y(p: Poly2, t: Fraction) -> Poly2:
    if t == 0:
        return dict(p)
    out: Poly2 = {}
    for (i, j), c in p.items():
        for k in range(j + 1):
            key = (i, k)
            out[key] = out.get(key, Fraction(0)) + c * comb(j, k) * t ** (j - k)
    return _clean(out)


def val(p: Poly2, var: int) -> int:
    return min(e[var] for e in p)


def strip(p: Poly2) -> tuple[int, int, Poly2]:
    i, j = val(p, 0), val(p, 1)
    return i, j, {(e[0] - i, e[1] - j): c for e, c in p.items()}


def order(p: Poly2) -> int:
    return min(i + j for i, j in p)


def on_x_axis(p: Poly2) -> list[Fraction]:
    """``p(0, t)`` as a coefficient list in ``t``."""
    n = max((j for i, j in p if i == 0), default=-1)
    out = [Fraction(0)] * (n + 1)
    for (i, j), c in p.items():
        if i == 0:
            out[j] = c
    return upoly.norm(out)


_X, _Y = sympy.symbols("x y")


def squarefree(p: Poly2) -> Poly2:
    """Squarefree part over Q, normalized to keep coefficients rational."""
    expr = sum(sympy.Rational(c.numerator, c.denominator) * _X**i * _Y**j for (i, j), c in p.items())
    sp = sympy.Poly(expr, _X, _Y, domain="QQ").sqf_part()
    return {
        e: Fraction(int(c.p), int(c.q)) for e, c in zip(sp.monoms(), sp.coeffs())
    }


def reduced_support(p: Poly2) -> Poly2:
    """Keep at most one factor of each coordinate axis."""
    i, j, g = strip(p)
    return {(e[0] + min(i, 1), e[1] + min(j, 1)): c for e, c in g.items()}


def from_series(s) -> Poly2:
    if isinstance(s, dict):
        return _clean({tuple(e): Fraction(c) for e, c in s.items()})
    if isinstance(s, str):
        s = TruncatedSeries.parse(s, 64, 2)
    return _clean({tuple(e[:2]): Fraction(int(c.numerator), int(c.denominator)) for e, c in s.coeffs.items()})


# -- SNC test and leaf classification --------------------------------------------


def is_snc_at_origin(h: Poly2) -> bool:
    """Whether the reduced curve ``h = 0`` is SNC at the origin."""
    i, j, g = strip(h)
    if g.get((0, 0), 0) != 0:
        return True
    if order(g) >= 2 or (i and j):
        return False
    if i and g.get((0, 1), 0) == 0:
        return False
    if j and g.get((1, 0), 0) == 0:
        return False
    return True


@dataclass
class Classification:
    form: int
    exps: dict
    ok: bool
    detail: str

    def to_dict(self) -> dict:
        return {"form": self.form, **self.exps, "ok": self.ok, "detail": self.detail}


def _swap(p: Poly2) -> Poly2:
    return {(j, i): c for (i, j), c in p.items()}


def _form1(U, V, J, a_input) -> Classification:
    a1 = val(U, 0)
    B = val(J, 0)
    j0 = on_x_axis({(e[0] - B, e[1]): c for e, c in J.items()})
    c1, _ = upoly.strip_zero_roots(j0)
    e, f = B - a1 + 1, c1 + 1
    exps = {"a1": a1, "e": e, "f": f, "e_alt": B - a1 + a_input}
    detail = "exponents from the differential identity"
    ok = f > 0
    if U == {(a1, 0): Fraction(1)}:
        R = {k: c for k, c in V.items() if k[1] != 0}
        ed = val(R, 0) if R else None
        fd = upoly.strip_zero_roots(on_x_axis({(k[0] - ed, k[1]): c for k, c in R.items()}))[0] if R else None
        ok = ok and (ed, fd) == (e, f)
        detail = f"direct check e={ed}, f={fd}"
    return Classification(1, exps, ok, detail)


def _form2(U, V, J) -> Classification:
    p, q = val(U, 0), val(U, 1)
    l1 = gcd(p, q)
    a1, b1 = p // l1, q // l1
    C, D, rest = strip(J)
    c1, d1 = C - l1 * a1 + 1, D - l1 * b1 + 1
    det = a1 * d1 - b1 * c1
    exps = {"a1": a1, "b1": b1, "l1": l1, "c1": c1, "d1": d1, "det": det}
    ok = det != 0 and rest.get((0, 0), 0) != 0
    detail = "exponents from the differential identity"
    if U == {(p, q): Fraction(1)}:
        R = {k: c for k, c in V.items() if k[0] * b1 != k[1] * a1}
        cd = min(R) if R else None
        dominated = bool(R) and all(k[0] >= cd[0] and k[1] >= cd[1] for k in R)
        ok = ok and dominated and cd == (c1, d1)
        detail = f"direct check (c1, d1)={cd}"
    return Classification(2, exps, ok, detail)


def classify_point(U: Poly2, V: Poly2, a_input: int) -> Classification:
    """Classify an SNC point (local coordinates centered at the origin)."""
    J = jacobian(U, V)
    p, q, unit = strip(U)
    if unit.get((0, 0), 0) == 0:
        return Classification(0, {}, False, "u is not a monomial times a unit")
    if p and q:
        return _form2(U, V, J)
    if q and not p:
        return _form1(_swap(U), _swap(V), _swap(J), a_input)
    if p:
        return _form1(U, V, J, a_input)
    return Classification(0, {}, False, "u is a unit")


# -- resolution ---------------------------------------------------------------------


class _Resolver:
    def __init__(self, a_input: int, max_depth: int):
        self.a_input = a_input
        self.max_depth = max_depth
        self.tree: list[Leaf] = []
        self.blowups = 0
        self.max_seen = 0

    def leaf(self, path: str, U, V, point="") -> None:
        cls = classify_point(U, V, self.a_input)
        self.tree.append(
            Leaf(path or "origin", PASS if cls.ok else FAIL, "-", point or f"form {cls.form}",
                 {"path": path or "origin", **cls.to_dict()})
        )

    def visit(self, U, V, H, path: str, depth: int) -> None:
        self.max_seen = max(self.max_seen, depth)
        if is_snc_at_origin(H):
            self.leaf(path, U, V)
            return
        if depth >= self.max_depth:
            raise DepthExceeded(f"more than {self.max_depth} quadratic transforms at {path or 'origin'}")
        self.blowups += 1
        pre = f"{path}/" if path else ""
        UA, VA, HA = chart_a(U), chart_a(V), reduced_support(chart_a(H))
        k = val(HA, 0)
        h0 = on_x_axis({(e[0] - k, e[1]): c for e, c in HA.items()})
        self._exceptional_points(UA, VA, HA, h0, pre, depth)
        self.visit(chart_b(U), chart_b(V), reduced_support(chart_b(H)), pre + "B", depth + 1)

    def _exceptional_points(self, UA, VA, HA, h0, pre, depth) -> None:
        # h0 is the strict transform (with the y1 axis factor restored) on x1 = 0
        roots = upoly.rational_roots(h0) if upoly.deg(h0) >= 1 else []
        for t in roots:
            self.visit(translate_y(UA, t), translate_y(VA, t), translate_y(HA, t), f"{pre}A(t={t})", depth + 1)
        generic = Fraction(1)
        while generic in roots or upoly.evaluate(h0, generic) == 0:
            generic += 1
        self.leaf(f"{pre}A(generic t={generic})", translate_y(UA, generic), translate_y(VA, generic),
                  "generic point of exceptional curve")
        self._irrational(UA, VA, h0, roots, pre)

    def _irrational(self, UA, VA, h0, roots, pre) -> None:
        _, q = upoly.strip_zero_roots(h0)
        for t in roots:
            if t != 0:
                while upoly.evaluate(q, t) == 0:
                    q = upoly.divmod_(q, [-t, Fraction(1)])[0]
        if upoly.deg(q) < 1:
            return
        parts = upoly.squarefree_parts(q)
        for k, qk in parts.items():
            if k > 1:
                self.tree.append(Leaf(f"{pre}A(roots of {_fmt(qk)})", INCONCLUSIVE, "-",
                                      "irrational point", None, "", f"irrational root of multiplicity {k}"))
                continue
            JA = jacobian(UA, VA)
            a1, B = val(UA, 0), val(JA, 0)
            j0 = on_x_axis({(e[0] - B, e[1]): c for e, c in JA.items()})
            for m, jm in upoly.squarefree_parts(j0).items():
                common = upoly.pgcd(qk, jm)
                if upoly.deg(common) >= 1:
                    self._irrational_leaf(pre, common, a1, B, m)
                    qk = upoly.divmod_(qk, common)[0]
            if upoly.deg(qk) >= 1:
                self._irrational_leaf(pre, qk, a1, B, 0)

    def _irrational_leaf(self, pre, q, a1, B, c1) -> None:
        e, f = B - a1 + 1, c1 + 1
        cls = Classification(1, {"a1": a1, "e": e, "f": f, "e_alt": B - a1 + self.a_input}, f > 0,
                             "simple intersection with the exceptional curve")
        path = f"{pre}A(roots of {_fmt(q)})"
        self.tree.append(Leaf(path, PASS if cls.ok else FAIL, "-", "irrational point",
                              {"path": path, **cls.to_dict()}))


def _fmt(p) -> str:
    return " + ".join(f"{c}*t^{k}" for k, c in enumerate(p) if c != 0)


def support_certificate(u: PlaneMonomial, v: Poly2) -> tuple[bool, str]:
    """Whether ``v`` lies in ``k[x]`` (resp. ``k[x^a y^b]``) by inspecting its support."""
    if u.b == 0:
        bad = [e for e in v if e[1] != 0]
        return not bad, "v in k[[x]]" if not bad else f"term x^{bad[0][0]}*y^{bad[0][1]} not a pure x power"
    bad = [e for e in v if e[0] * u.b != e[1] * u.a]
    ok = not bad
    return ok, f"v in k[[x^{u.a}*y^{u.b}]]" if ok else f"exponent {bad[0]} not a multiple of ({u.a},{u.b})"


def run_dim2(u: PlaneMonomial, v, max_depth: int = DEFAULT_MAX_DEPTH) -> TheoremReport:
    """Reduce ``(u, v)`` to forms 1) and 2) over the origin, or certify ``J = 0``."""
    V = from_series(v)
    if not V or V.get((0, 0), 0) != 0:
        raise PreconditionViolated("v must be nonzero with positive order")
    U = u.poly()
    J = jacobian(U, V)
    root = f"u={u}, v={_fmt2(V)}"
    tree = ChartTree(root)
    if not J:
        ok, why = support_certificate(u, V)
        tree.add(Leaf("J = 0", PASS if ok else FAIL, "-", "support", {"path": "origin"}, detail=why))
        rep = TheoremReport("dim2", _combine(tree.leaves), "-", None, tree)
        rep.notes.append(why)
        return rep
    H = reduced_support(squarefree(pmul(U, J)))
    res = _Resolver(u.a, max_depth)
    try:
        res.visit(U, V, H, "", 0)
    except DepthExceeded as exc:
        tree.leaves = res.tree
        tree.add(Leaf("depth", INCONCLUSIVE, "-", detail=str(exc)))
        return TheoremReport("dim2", INCONCLUSIVE, "-", None, tree, notes=[str(exc)])
    tree.leaves = res.tree
    return TheoremReport(
        "dim2", _combine(tree.leaves), "-", None, tree,
        {"blowups": res.blowups, "depth": res.max_seen}, notes=[f"J = {_fmt2(J)}"],
    )


def _fmt2(p: Poly2) -> str:
    def mono(i, j):
        parts = [f"x^{i}" if i > 1 else "x" * i, f"y^{j}" if j > 1 else "y" * j]
        return "*".join(s for s in parts if s) or "1"

    return " + ".join(f"{c}*{mono(*e)}" for e, c in sorted(p.items())) or "0"
