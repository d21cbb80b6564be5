"""Normal forms of a morphism germ (u, v) at 1-, 2- and 3-points.

Coordinates are always ordered with the divisor variables first: at an
n-point the germ of D is ``x_1 * ... * x_n = 0`` and

    u = M^l,    v = P(M) + x^mono * F

where ``M`` is the primitive distinguished monomial (``x`` at a 1-point,
``x^a y^b`` at a 2-point, ``x^a y^b z^c`` at a 3-point).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from gmpy2 import mpq

from .pseries import (
    TOTAL,
    AtLeast,
    Exact,
    TruncatedSeries,
    invert_unit,
    ord_restrict,
    partial,
    substitute,
)

SigmaValue = Exact | AtLeast


class LocalFormError(Exception):
    pass


class InvariantViolation(LocalFormError, ValueError):
    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}" if detail else invariant)


class DegenerateV(LocalFormError):
    """v is a series in the distinguished monomial alone."""


class Inconclusive(LocalFormError):
    def __init__(self, reason: str, bound: int | None = None):
        self.bound = bound
        super().__init__(reason)


class NotApplicable(LocalFormError):
    pass


@dataclass(frozen=True)
class PointType:
    """Exponent data of ``u = (x^a y^b z^c)^l``; ``exps`` is primitive."""

    exps: tuple[int, int, int]
    l: int

    def __post_init__(self):
        n = self.kind
        if n == 0:
            raise InvariantViolation("point type", "u must involve a divisor variable")
        if any(self.exps[i] <= 0 for i in range(n)) or any(self.exps[n:]):
            raise InvariantViolation(
                "divisor variables first", f"exponents {self.exps} must be positive on a prefix"
            )
        if self.l < 1:
            raise InvariantViolation("positive l", str(self.l))
        g = 0
        for e in self.exps:
            g = gcd(g, e)
        if g != 1:
            raise InvariantViolation(
                "coprimality", f"gcd{self.exps[:n]} = {g}, expected 1"
            )

    @property
    def kind(self) -> int:
        return sum(1 for e in self.exps if e)

    @property
    def u_exps(self) -> tuple[int, int, int]:
        return tuple(self.l * e for e in self.exps)

    def u(self, trunc=16, weights=TOTAL) -> TruncatedSeries:
        return TruncatedSeries.monomial(self.u_exps, 1, trunc, 3, weights)

    def to_dict(self) -> dict:
        n = self.kind
        return {"kind": n, "exps": list(self.exps[:n]), "l": self.l}


def One(a: int) -> PointType:
    """``u = x^a``."""
    return PointType((1, 0, 0), a)


def Two(a: int, b: int, l: int = 1) -> PointType:
    """``u = (x^a y^b)^l``."""
    if gcd(a, b) != 1:
        raise InvariantViolation("coprimality", f"gcd(a, b) = gcd({a}, {b}) != 1 at a 2-point")
    return PointType((a, b, 0), l)


def Three(a: int, b: int, c: int, l: int = 1) -> PointType:
    """``u = (x^a y^b z^c)^l``."""
    if gcd(gcd(a, b), c) != 1:
        raise InvariantViolation("coprimality", f"gcd(a, b, c) != 1 at a 3-point")
    return PointType((a, b, c), l)


def point_type_from_u(u_exps: Sequence[int]) -> PointType:
    """Point type of a monomial ``u`` in canonical (divisor-first) order."""
    g = 0
    for e in u_exps:
        g = gcd(g, e)
    return PointType(tuple(e // g for e in u_exps), g)


def _power_of(e, M) -> int | None:
    """k with e = k*M, or None."""
    k = None
    for ei, mi in zip(e, M):
        if mi == 0:
            if ei:
                return None
            continue
        if ei % mi:
            return None
        q = ei // mi
        if k is None:
            k = q
        elif k != q:
            return None
    return k


@dataclass(frozen=True)
class LocalForm:
    ptype: PointType
    P: TruncatedSeries
    mono: tuple[int, int, int]
    F: TruncatedSeries
    trunc: int = field(default=16)

    @property
    def kind(self) -> int:
        return self.ptype.kind

    def u(self) -> TruncatedSeries:
        return self.ptype.u(self.F.trunc, self.F.weights)

    def p_part(self, weights=None, trunc=None) -> TruncatedSeries:
        M = self.ptype.exps
        w = self.F.weights if weights is None else weights
        T = self.trunc if trunc is None else trunc
        return TruncatedSeries(
            {tuple(k * m for m in M): c for (k, _, _), c in self.P.coeffs.items()}, T, 3, w
        )

    def v(self) -> TruncatedSeries:
        """Recompose ``v = P(M) + x^mono F``."""
        return self.p_part() + self.F.shift(self.mono).truncate(self.trunc)

    def validate(self) -> None:
        n = self.kind
        F = self.F
        if F.is_zero():
            raise InvariantViolation("nonzero F")
        lo = F.min_exponents()
        for i in range(n):
            if lo[i]:
                raise InvariantViolation(
                    "non-divisibility", f"{'xyz'[i]} divides F"
                )
        M = self.ptype.exps
        for e in F.coeffs:
            full = tuple(a + b for a, b in zip(e, self.mono))
            if _power_of(full, M) is not None:
                raise InvariantViolation(
                    "no pure powers",
                    f"x^mono F has the term {full} which is a power of the distinguished monomial",
                )

    def to_dict(self) -> dict:
        return {
            "point_type": self.ptype.to_dict(),
            "mono": list(self.mono[: self.kind]),
            "P": self.P.to_literal(),
            "F": self.F.to_literal(),
            "F_text": str(self.F),
            "trunc": self.trunc,
        }

    def __str__(self) -> str:
        n = self.kind
        names = "xyz"
        M = "*".join(
            f"{names[i]}^{self.ptype.exps[i]}" if self.ptype.exps[i] != 1 else names[i]
            for i in range(n)
        )
        mono = "*".join(
            f"{names[i]}^{self.mono[i]}" for i in range(n) if self.mono[i]
        ) or "1"
        return f"{n}-point u=({M})^{self.ptype.l}, v=P({M}) + {mono}*({self.F})"


def decompose(ptype: PointType, v: TruncatedSeries) -> LocalForm:
    """Split ``v = P(M) + x^mono F`` with the normal-form invariants."""
    M = ptype.exps
    n = ptype.kind
    pcoeffs = {}
    rest = {}
    for e, c in v.coeffs.items():
        k = _power_of(e, M)
        if k is None:
            rest[e] = c
        else:
            pcoeffs[(k, 0, 0)] = c
    if not rest:
        raise DegenerateV(f"v = {v} is a series in the distinguished monomial")
    if v.is_exact:
        P = TruncatedSeries(pcoeffs, v.trunc, 1, (0, 0, 0))
    else:
        wM = sum(w * m for w, m in zip(v.weights, M)) or 1
        P = TruncatedSeries(pcoeffs, v.trunc // wM, 1, (1, 0, 0))
    R = v._like(rest)
    lo = R.min_exponents()
    mono = tuple(lo[i] if i < n else 0 for i in range(3))
    F = R.divide_monomial(mono)
    return LocalForm(ptype, P, mono, F, v.trunc)


def sigma(form: LocalForm) -> SigmaValue:
    """The invariant sigma_D at the origin of the form."""
    n = form.kind
    F = form.F
    if n == 1:
        o = ord_restrict(F, [0])
        if isinstance(o, Exact):
            if o.n == 0:
                raise InvariantViolation("no pure powers", "F is a unit at a 1-point")
            return Exact(o.n - 1)
        return AtLeast(max(o.bound - 1, 0))
    if n == 2:
        o = ord_restrict(F, [0, 1])
        if isinstance(o, Exact):
            if o.n == 0:
                a, b = form.ptype.exps[:2]
                c, d = form.mono[:2]
                if a * d - b * c == 0:
                    raise InvariantViolation(
                        "ad-bc != 0", f"F(0,0,0) != 0 but ad-bc = 0 for a,b,c,d = {a},{b},{c},{d}"
                    )
                return Exact(0)
            return Exact(o.n - 1)
        return AtLeast(o.bound)
    if F.constant_term:
        if _rank_A(form) != 2:
            raise InvariantViolation("rank(A) = 2", "F(0,0,0) != 0 but the exponent matrix is singular")
        return Exact(0)
    return AtLeast(F.trunc)


def _rank_A(form: LocalForm) -> int:
    a, b, c = form.ptype.exps
    d, e, f = form.mono
    minors = (a * e - b * d, a * f - c * d, b * f - c * e)
    return 2 if any(minors) else 1


def sigma_le(s: SigmaValue, bound: int) -> bool | None:
    """``s <= bound``; None when an AtLeast value cannot decide it."""
    if isinstance(s, Exact):
        return s.n <= bound
    return False if s.bound > bound else None


# -- fitting ideal identities ---------------------------------------------


@dataclass
class JacobianReport:
    passed: bool | None
    degree: int
    monomial_factor: tuple[int, int, int] | None
    residual: list[str]
    expected: list[str]
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "degree": self.degree,
            "monomial_factor": list(self.monomial_factor) if self.monomial_factor else None,
            "residual": self.residual,
            "expected": self.expected,
            "reason": self.reason,
        }


def _log_derivative(s: TruncatedSeries, i: int, n: int) -> TruncatedSeries:
    d = partial(s, i)
    if i < n:
        e = [0, 0, 0]
        e[i] = 1
        return d.shift(e).truncate(s.trunc)
    return d


def jacobian_ideal_check(form: LocalForm, max_degree: int = 6) -> JacobianReport:
    """Compare the residual fitting ideal with the closed formulas.

    The image of ``du ^ dv`` in log 2-forms is computed from the recomposed
    (u, v); its coefficients are divided by their largest common monomial in
    the divisor variables and reduced modulo the divisor variables.  The
    result must equal the ideal ``(dF/dy, dF/dz)`` at a 1-point,
    ``((ad-bc)F, dF/dz)`` at a 2-point and ``(minors(A) * F)`` at a
    3-point, compared modulo ``m^(D+1)`` in the remaining variables.
    """
    n = form.kind
    v = form.v()
    if v.is_exact:
        v = v.with_weights(TOTAL, form.trunc)
    u = form.ptype.u(v.trunc)
    du = [_log_derivative(u, i, n) for i in range(3)]
    dv = [_log_derivative(v, i, n) for i in range(3)]
    coeffs = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        coeffs.append(du[i] * dv[j] - du[j] * dv[i])
    nonzero = [c for c in coeffs if c]
    if not nonzero:
        return JacobianReport(False, 0, None, [], [], "du ^ dv vanishes")
    lo = [min(c.min_exponents()[k] for c in nonzero) for k in range(3)]
    G = tuple(lo[k] if k < n else 0 for k in range(3))
    residual = [c.divide_monomial(G).restrict(range(n)) for c in nonzero]
    F = form.F if not form.F.is_exact else form.F.with_weights(TOTAL, form.trunc)
    if n == 1:
        expected = [partial(F, 1), partial(F, 2)]
    elif n == 2:
        a, b = form.ptype.exps[:2]
        c, d = form.mono[:2]
        expected = [F.scale(a * d - b * c), partial(F, 2)]
    else:
        a, b, c = form.ptype.exps
        d, e, f = form.mono
        expected = [F.scale(a * e - b * d), F.scale(a * f - c * d), F.scale(b * f - c * e)]
    expected = [g.restrict(range(n)) for g in expected]
    known = min(g.trunc for g in residual + expected)
    D = min(max_degree, known - 1)
    if D < 0:
        return JacobianReport(
            None, D, G, [], [], f"truncation {known} too low to compare ideals"
        )
    free = [k for k in range(n, 3)]
    A = _ideal_span(residual, free, D)
    B = _ideal_span(expected, free, D)
    ok = _same_span(A, B)
    return JacobianReport(
        ok, D, G, [str(g.truncate(D)) for g in residual], [str(g.truncate(D)) for g in expected]
    )


def _monomials(free: list[int], D: int):
    out = [(0, 0, 0)]
    for k in free:
        nxt = []
        for e in out:
            for p in range(D + 1):
                f = list(e)
                f[k] = p
                if sum(f) <= D:
                    nxt.append(tuple(f))
        out = nxt
    return sorted(set(out), key=lambda e: (sum(e), e))


def _ideal_span(gens, free, D):
    rows = []
    for g in gens:
        for mono in _monomials(free, D):
            row = {}
            for e, c in g.coeffs.items():
                f = (e[0] + mono[0], e[1] + mono[1], e[2] + mono[2])
                if sum(f) <= D:
                    row[f] = c
            if row:
                rows.append(row)
    return _echelon(rows)


def _echelon(rows):
    basis: dict = {}
    for row in rows:
        row = dict(row)
        while row:
            piv = min(row, key=lambda e: (sum(e), e))
            if piv in basis:
                b = basis[piv]
                c = row[piv] / b[piv]
                for e, val in b.items():
                    nv = row.get(e, 0) - c * val
                    if nv:
                        row[e] = nv
                    else:
                        row.pop(e, None)
            else:
                basis[piv] = row
                break
    return basis


def _reduce(row, basis):
    row = dict(row)
    while row:
        piv = min(row, key=lambda e: (sum(e), e))
        if piv not in basis:
            return row
        b = basis[piv]
        c = row[piv] / b[piv]
        for e, val in b.items():
            nv = row.get(e, 0) - c * val
            if nv:
                row[e] = nv
            else:
                row.pop(e, None)
    return row


def _same_span(A, B) -> bool:
    return len(A) == len(B) and all(not _reduce(r, A) for r in B.values())


# -- Tschirnhaus normalization ---------------------------------------------


@dataclass(frozen=True)
class TschirnhausResult:
    form: LocalForm
    phi: TruncatedSeries
    m: int


def _to_total(s: TruncatedSeries, trunc: int) -> TruncatedSeries:
    return s.with_weights(TOTAL, trunc) if s.is_exact else s


def normalize_tschirnhaus(form: LocalForm, trunc: int | None = None) -> TschirnhausResult:
    """Shift ``z -> z - phi(x, y)`` so the ``z^(m-1)`` coefficient of F vanishes."""
    if form.kind == 3:
        raise NotApplicable("3-points have no free variable")
    T = form.trunc if trunc is None else trunc
    F = _to_total(form.F, T)
    o = ord_restrict(F, [0, 1])
    if isinstance(o, AtLeast):
        raise Inconclusive(f"ord F(0,0,z) >= {o.bound} exceeds truncation", o.bound)
    m = o.n
    if m < 2:
        raise NotApplicable(f"ord F(0,0,z) = {m} < 2")
    if m >= F.trunc:
        raise Inconclusive(f"ord F(0,0,z) = {m} not below truncation {F.trunc}", F.trunc)
    H = F
    for _ in range(m - 1):
        H = partial(H, 2)
    Hz = partial(H, 2)
    X = TruncatedSeries.var(0, H.trunc)
    Y = TruncatedSeries.var(1, H.trunc)
    phi = TruncatedSeries.zero(H.trunc)
    for _ in range(H.trunc + 2):
        img = [X, Y, phi]
        val = substitute(H, img, H.trunc)
        if val.is_zero():
            break
        der = substitute(Hz, img, Hz.trunc)
        step = val * invert_unit(der.truncate(val.trunc))
        new = (phi - step).truncate(Hz.trunc)
        if new == phi:
            break
        phi = new
    v = _to_total(form.v(), T)
    Z = TruncatedSeries.var(2, v.trunc)
    shifted = substitute(v, [TruncatedSeries.var(0, v.trunc), TruncatedSeries.var(1, v.trunc), Z + phi])
    new_form = decompose(form.ptype, shifted)
    return TschirnhausResult(new_form, phi, m)


def z_coefficient(F: TruncatedSeries, k: int) -> TruncatedSeries:
    return F.coefficients_in(2).get(k, F._like({}))


# -- 3-prepared templates ---------------------------------------------------


@dataclass(frozen=True)
class Prepared:
    form: LocalForm
    kind: str = "prepared"


@dataclass(frozen=True)
class NotPrepared:
    form: LocalForm
    witness: str
    kind: str = "not_prepared"


@dataclass(frozen=True)
class ThreePrepForm:
    """A matched ladder ``tau_0 z^m + sum tau_i x^r_i (y^s_i) z^(m-i) [+ x^t Omega]``."""

    kind: str  # "eq2" | "eq3" | "eq4"
    m: int
    form: LocalForm
    taus: dict  # i -> TruncatedSeries (i = 0, 2..m); zero series when absent
    r: dict
    s: dict
    t: int | None = None
    omega_tail: TruncatedSeries | None = None
    omega_bound: int | None = None

    def nonzero(self, i: int) -> bool:
        tau = self.taus.get(i)
        return tau is not None and not tau.is_zero()

    def r_list(self) -> list[int]:
        """r_2..r_{m-1} with r_i = 0 where tau_i = 0."""
        return [self.r.get(i, 0) if self.nonzero(i) else 0 for i in range(2, self.m)]

    def validate(self) -> None:
        m = self.m
        tau0 = self.taus[0]
        if not tau0.constant_term:
            raise InvariantViolation("tau_0 unit")
        if self.kind == "eq2":
            a, b = self.form.ptype.exps[:2]
            c, d = self.form.mono[:2]
            for i in range(2, m + 1):
                if self.nonzero(i) and self.r[i] + self.s[i] <= 0:
                    raise InvariantViolation("r_i + s_i > 0", f"i = {i}")
            if self.nonzero(m) and (self.r[m] + c) * b - (self.s[m] + d) * a == 0:
                raise InvariantViolation("(r_m+c)b-(s_m+d)a != 0")
            if not (self.nonzero(m) or self.nonzero(m - 1)):
                raise InvariantViolation("tau_{m-1} != 0 or tau_m != 0")
        elif self.kind == "eq3":
            for i in range(2, m + 1):
                if self.nonzero(i) and self.r[i] <= 0:
                    raise InvariantViolation("r_i > 0", f"i = {i}")
            if self.nonzero(m):
                o = ord_restrict(self.taus[m], [0, 2])
                if o != Exact(1):
                    raise InvariantViolation("ord tau_m(0,y,0) = 1", str(o))
            if not (self.nonzero(m) or self.nonzero(m - 1)):
                raise InvariantViolation("tau_{m-1} != 0 or tau_m != 0")
        elif self.kind == "eq4":
            if not self.nonzero(m - 1):
                raise InvariantViolation("tau_{m-1} != 0")
            if self.omega_bound is not None and not self.t > self.omega_bound:
                raise InvariantViolation("t > omega", f"t = {self.t}, omega = {self.omega_bound}")

    def ideal_generators(self) -> list[tuple[int, ...]]:
        """Exponents of the principalization ideal (x, y, z order)."""
        m = self.m
        gens = [(0, 0, m)]
        for i in range(2, m):
            if self.nonzero(i):
                gens.append((self.r[i], self.s.get(i, 0), m - i))
        if self.kind != "eq4" and self.nonzero(m):
            gens.append((self.r[m], self.s.get(m, 0), 0))
        return gens

    def to_dict(self) -> dict:
        return {
            "template": self.kind,
            "m": self.m,
            "r": {str(i): self.r[i] for i in sorted(self.r)},
            "s": {str(i): self.s[i] for i in sorted(self.s)},
            "taus": {str(i): str(self.taus[i]) for i in sorted(self.taus)},
            "t": self.t,
            "omega": self.omega_bound,
        }


def _divides(mono, e, n) -> bool:
    return all(e[i] >= mono[i] for i in range(n))


def _ladder(levels: dict, m: int, n: int, start: int, taus, r, s, form) -> str | None:
    """Greedy ladder extraction on z-levels ``start..m-1`` (level k = z^k)."""
    for k in range(start, m):
        terms = levels.get(k, {})
        i = m - k
        if not terms:
            taus[i] = form.F._like({})
            continue
        lo = tuple(min(e[j] for e in terms) if j < n else 0 for j in range(3))
        unit_term = next(
            (e for e in terms if e[0] == lo[0] and (n == 1 or e[1] == lo[1]) and (n > 1 or e[1] == 0)),
            None,
        )
        if unit_term is None:
            return f"z^{k} coefficient is not a monomial times a unit"
        if i == 1:
            return f"z^{m - 1} coefficient is nonzero"
        tau = {}
        for kk in range(k, m):
            lv = levels.get(kk, {})
            for e in [e for e in lv if _divides(lo, e, n)]:
                c = lv.pop(e)
                tau[(e[0] - lo[0], e[1] - (lo[1] if n > 1 else 0), kk - k)] = c
        taus[i] = form.F._like(tau)
        r[i] = lo[0]
        s[i] = lo[1] if n > 1 else 0
    return None


def _levels(F: TruncatedSeries, m: int):
    levels: dict[int, dict] = {}
    top = {}
    for e, c in F.coeffs.items():
        if e[2] >= m:
            top[(e[0], e[1], e[2] - m)] = c
        else:
            levels.setdefault(e[2], {})[(e[0], e[1], e[2])] = c
    return levels, top


def classify_3prepared(form: LocalForm, omega_fn=None, prefer: str | None = None):
    """Match a form against the 3-prepared templates.

    Returns :class:`Prepared` when sigma is 0, a :class:`ThreePrepForm`
    when a template matches, and :class:`NotPrepared` with a witness
    otherwise.  The ladder is read off the z-expansion of F; each unit
    coefficient absorbs every later term divisible by its monomial.
    A 1-point form can match both eq3 and eq4 (``x^t y`` is also a
    ``tau_m`` term); eq3 wins unless ``prefer="eq4"``.
    """
    sg = sigma(form)
    if isinstance(sg, AtLeast):
        raise Inconclusive(f"sigma is only known to be {sg}", sg.bound)
    if sg.n == 0:
        return Prepared(form)
    if form.kind == 3:
        return NotPrepared(form, "3-points with sigma > 0 do not occur in 3-prepared forms")
    m = sg.n + 1
    n = form.kind
    F = form.F
    if form.kind == 1 and ord_restrict(F, [0, 1]) != Exact(m):
        return NotPrepared(form, f"ord F(0,0,z) != m = {m}; coordinates are not adapted")
    levels, top = _levels(F, m)
    tau0 = F._like(top)
    if not tau0.constant_term:
        return NotPrepared(form, "coefficient of z^m is not a unit")

    # eq2 / eq3
    witness = "eq4 requested"
    if prefer != "eq4":
        lv = {k: dict(v) for k, v in levels.items()}
        taus = {0: tau0}
        r: dict = {}
        s: dict = {}
        witness = None
        c0 = lv.get(0, {})
        if c0:
            lo = tuple(min(e[j] for e in c0) if j < n else 0 for j in range(3))
            tau_m = {}
            for kk in range(0, m):
                lvk = lv.get(kk, {})
                for e in [e for e in lvk if _divides(lo, e, n)]:
                    c = lvk.pop(e)
                    tau_m[(e[0] - lo[0], e[1] - lo[1], kk)] = c
            taus[m] = F._like(tau_m)
            r[m] = lo[0]
            s[m] = lo[1] if n > 1 else 0
            if n == 1:
                if ord_restrict(taus[m], [0, 2]) != Exact(1):
                    witness = "ord tau_m(0,y,0) != 1"
            else:
                if not taus[m].constant_term:
                    witness = "z^0 coefficient is not a monomial times a unit"
        else:
            taus[m] = F._like({})
        if witness is None:
            witness = _ladder(lv, m, n, 1, taus, r, s, form)
        if witness is None:
            kind = "eq2" if n == 2 else "eq3"
            cand = ThreePrepForm(kind, m, form, taus, r, s)
            try:
                cand.validate()
                return cand
            except InvariantViolation as exc:
                witness = str(exc)
    if n == 2:
        return NotPrepared(form, witness)

    # eq4
    if m < 3:
        return NotPrepared(form, witness + "; eq4 needs m >= 3")
    c0 = levels.get(0, {})
    if not c0:
        return NotPrepared(form, witness)
    best_fail = witness
    for order in ("ladder_first", "tail_first"):
        lv = {k: dict(v) for k, v in levels.items()}
        t = min(e[0] for e in c0)
        taus4 = {0: tau0}
        r4: dict = {}
        tail = {}

        def absorb_tail():
            for kk in range(0, m):
                lvk = lv.get(kk, {})
                for e in [e for e in lvk if e[0] >= t]:
                    tail[e] = lvk.pop(e)

        if order == "tail_first":
            absorb_tail()
        else:
            tail.update(lv.pop(0, {}))
        w = _ladder(lv, m, 1, 1, taus4, r4, {}, form)
        if w is not None:
            best_fail = w
            continue
        absorb_tail()
        if any(lv.get(kk) for kk in range(m)):
            best_fail = "terms outside the ladder are not divisible by x^t"
            continue
        cand = ThreePrepForm(
            "eq4", m, form, taus4, r4, {i: 0 for i in r4}, t,
            F._like(tail).divide_monomial((t, 0, 0)),
        )
        if not cand.nonzero(m - 1):
            best_fail = "tau_{m-1} = 0"
            continue
        if omega_fn is None:
            from .toric2d import omega as omega_fn  # noqa: PLC0415
        try:
            om = omega_fn(m, cand.r_list())
        except ValueError as exc:
            best_fail = f"omega undefined: {exc}"
            continue
        cand = ThreePrepForm(
            "eq4", m, form, taus4, r4, {i: 0 for i in r4}, t, cand.omega_tail, om
        )
        if t <= om:
            return NotPrepared(form, f"eq4 ladder found but t = {t} <= omega = {om}")
        return cand
    return NotPrepared(form, best_fail)
