"""Exact truncated power series in up to three variables over the rationals.

A series stores a sparse map from exponent triples to ``mpq`` coefficients
together with a truncation order ``trunc`` and a 0/1 weight per variable.
Every term whose weighted degree ``sum(w_i * e_i)`` is at most ``trunc`` is
known exactly; nothing is known about terms of larger weighted degree.

With the default weights ``(1, 1, 1)`` this is ordinary truncation by total
degree.  A zero weight marks a direction in which the series is carried
exactly (a polynomial in that variable); all-zero weights describe an exact
polynomial.  Chart computations use mixed weights so that monomial
coordinates stay exact while translated coordinates are expanded to a
bounded degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from gmpy2 import iroot, mpq, mpz

Q = mpq
Exp = tuple[int, int, int]

VARS = ("x", "y", "z")
TOTAL = (1, 1, 1)
EXACT = (0, 0, 0)
DEFAULT_TRUNC = 16


class SeriesError(Exception):
    """Base class for series errors."""


class StructuralError(SeriesError):
    """Operands with incompatible variable counts or weights."""


class NotAUnit(SeriesError):
    """A unit series was required but the constant term vanishes."""


class NotAPerfectPower(SeriesError):
    """The requested rational root of a constant is irrational."""


class MalformedChart(SeriesError):
    """A substitution that is not a well-defined map of formal series."""


class TruncationError(SeriesError):
    """The requested result is an infinite series in an exact direction."""


@dataclass(frozen=True)
class Exact:
    n: int

    def __str__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class AtLeast:
    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


def as_q(c) -> mpq:
    if isinstance(c, str):
        return mpq(c.strip())
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def _wdeg(e: Exp, w: Sequence[int]) -> int:
    return w[0] * e[0] + w[1] * e[1] + w[2] * e[2]


def _add_exp(a: Exp, b: Exp) -> Exp:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def grlex_key(e: Exp):
    return (sum(e), e)


class TruncatedSeries:
    """Immutable sparse series; see the module docstring for truncation."""

    __slots__ = ("coeffs", "trunc", "nvars", "weights")

    def __init__(
        self,
        coeffs: Mapping[Exp, object] | None = None,
        trunc: int = DEFAULT_TRUNC,
        nvars: int = 3,
        weights: Sequence[int] = TOTAL,
    ):
        if nvars not in (1, 2, 3):
            raise StructuralError(f"nvars must be 1, 2 or 3, got {nvars}")
        weights = tuple(int(w) for w in weights)
        if len(weights) != 3 or any(w not in (0, 1) for w in weights):
            raise StructuralError(f"weights must be three 0/1 values, got {weights}")
        clean: dict[Exp, mpq] = {}
        for e, c in (coeffs or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != 3 or min(e) < 0:
                raise StructuralError(f"bad exponent {e}")
            if any(e[i] for i in range(nvars, 3)):
                raise StructuralError(f"exponent {e} uses a variable beyond nvars={nvars}")
            if _wdeg(e, weights) > trunc:
                continue
            c = as_q(c)
            if c:
                clean[e] = clean.get(e, mpq(0)) + c
                if not clean[e]:
                    del clean[e]
        self.coeffs = clean
        self.trunc = int(trunc)
        self.nvars = nvars
        self.weights = weights

    # construction -----------------------------------------------------

    @classmethod
    def _raw(cls, coeffs: dict, trunc: int, nvars: int, weights: tuple) -> "TruncatedSeries":
        s = object.__new__(cls)
        s.coeffs = coeffs
        s.trunc = trunc
        s.nvars = nvars
        s.weights = weights
        return s

    def _like(self, coeffs: dict, trunc: int | None = None) -> "TruncatedSeries":
        return TruncatedSeries._raw(
            coeffs, self.trunc if trunc is None else trunc, self.nvars, self.weights
        )

    @classmethod
    def zero(cls, trunc=DEFAULT_TRUNC, nvars=3, weights=TOTAL):
        return cls({}, trunc, nvars, weights)

    @classmethod
    def const(cls, c, trunc=DEFAULT_TRUNC, nvars=3, weights=TOTAL):
        return cls({(0, 0, 0): c}, trunc, nvars, weights)

    @classmethod
    def one(cls, trunc=DEFAULT_TRUNC, nvars=3, weights=TOTAL):
        return cls.const(1, trunc, nvars, weights)

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1, trunc=DEFAULT_TRUNC, nvars=3, weights=TOTAL):
        e = tuple(exp) + (0,) * (3 - len(exp))
        return cls({e: coeff}, trunc, nvars, weights)

    @classmethod
    def var(cls, i: int, trunc=DEFAULT_TRUNC, nvars=3, weights=TOTAL):
        e = [0, 0, 0]
        e[i] = 1
        return cls.monomial(e, 1, trunc, nvars, weights)

    @classmethod
    def from_terms(cls, terms: Iterable, trunc=DEFAULT_TRUNC, nvars=3, weights=TOTAL):
        """Build from ``[[e_x, e_y, e_z], "p/q"]`` literal entries."""
        coeffs: dict[Exp, mpq] = {}
        for exp, c in terms:
            e = tuple(int(k) for k in exp) + (0,) * (3 - len(exp))
            coeffs[e] = coeffs.get(e, mpq(0)) + as_q(c)
        return cls(coeffs, trunc, nvars, weights)

    @classmethod
    def parse(cls, text: str, trunc=DEFAULT_TRUNC, nvars=3, weights=TOTAL):
        """Parse a polynomial written in x, y, z with rational coefficients.

        Only sums of products of numbers and powers of x, y, z are accepted,
        e.g. ``"z^2 + 3/2*x*y - x^3"``.
        """
        import re

        src = text.replace(" ", "").replace("**", "^")
        if not src:
            return cls.zero(trunc, nvars, weights)
        if src[0] not in "+-":
            src = "+" + src
        coeffs: dict[Exp, mpq] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", src):
            c = mpq(1)
            e = [0, 0, 0]
            for factor in body.split("*"):
                m = re.fullmatch(r"([xyz])(?:\^(\d+))?", factor)
                if m:
                    e[VARS.index(m.group(1))] += int(m.group(2) or 1)
                    continue
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    c *= mpq(factor)
                    continue
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            if sign == "-":
                c = -c
            t = tuple(e)
            coeffs[t] = coeffs.get(t, mpq(0)) + c
        return cls(coeffs, trunc, nvars, weights)

    # inspection -------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return not any(self.weights)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def coefficient(self, exp: Sequence[int]) -> mpq:
        e = tuple(exp) + (0,) * (3 - len(exp))
        return self.coeffs.get(e, mpq(0))

    @property
    def constant_term(self) -> mpq:
        return self.coeffs.get((0, 0, 0), mpq(0))

    def terms(self) -> list[tuple[Exp, mpq]]:
        """Terms in graded lexicographic order."""
        return sorted(self.coeffs.items(), key=lambda t: grlex_key(t[0]))

    def order(self) -> int | None:
        """Minimal total degree of a known nonzero term, None for zero."""
        if not self.coeffs:
            return None
        return min(sum(e) for e in self.coeffs)

    def weighted_order(self) -> int | None:
        if not self.coeffs:
            return None
        return min(_wdeg(e, self.weights) for e in self.coeffs)

    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def min_exponents(self) -> Exp:
        """Componentwise minimum of the support (the largest monomial divisor)."""
        if not self.coeffs:
            raise ValueError("zero series has no monomial divisor")
        es = list(self.coeffs)
        return tuple(min(e[i] for e in es) for i in range(3))

    def __repr__(self) -> str:
        return f"TruncatedSeries({self}, trunc={self.trunc}, weights={self.weights})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in self.terms():
            mono = "*".join(
                VARS[i] if e[i] == 1 else f"{VARS[i]}^{e[i]}" for i in range(3) if e[i]
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_literal(self) -> list:
        return [[list(e), str(c)] for e, c in self.terms()]

    # comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return (
                self.coeffs == other.coeffs
                and self.trunc == other.trunc
                and self.weights == other.weights
            )
        if isinstance(other, (int, mpq, Fraction)) or type(other).__name__ == "mpz":
            return self.coeffs == ({(0, 0, 0): as_q(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash((frozenset(self.coeffs.items()), self.trunc, self.weights))

    def agrees_with(self, other: "TruncatedSeries", trunc: int | None = None) -> bool:
        """Equality up to the common (or given) truncation order."""
        _check_compatible(self, other)
        t = min(self.trunc, other.trunc) if trunc is None else trunc
        return self.truncate(t).coeffs == other.truncate(t).coeffs

    # arithmetic -------------------------------------------------------

    def truncate(self, trunc: int) -> "TruncatedSeries":
        if trunc >= self.trunc:
            return self._like(dict(self.coeffs), trunc if self.is_exact else self.trunc)
        w = self.weights
        return self._like({e: c for e, c in self.coeffs.items() if _wdeg(e, w) <= trunc}, trunc)

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            _check_compatible(self, other)
            return other
        return TruncatedSeries.const(as_q(other), self.trunc, self.nvars, self.weights)

    def __add__(self, other):
        other = self._coerce(other)
        t = min(self.trunc, other.trunc)
        w = self.weights
        out = {e: c for e, c in self.coeffs.items() if _wdeg(e, w) <= t}
        for e, c in other.coeffs.items():
            if _wdeg(e, w) > t:
                continue
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self._like(out, t)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "TruncatedSeries":
        c = as_q(c)
        if not c:
            return self._like({})
        return self._like({e: v * c for e, v in self.coeffs.items()})

    def shift(self, exp: Sequence[int], coeff=1) -> "TruncatedSeries":
        """Multiply by the monomial ``coeff * x^exp``."""
        e0 = tuple(exp) + (0,) * (3 - len(exp))
        c0 = as_q(coeff)
        w = self.weights
        t = self.trunc
        if not self.is_exact:
            t = self.trunc + _wdeg(e0, w)
        return self._like({_add_exp(e, e0): c * c0 for e, c in self.coeffs.items()}, t)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("use pow_rational or invert_unit for non-natural powers")
        result = TruncatedSeries.one(self.trunc, self.nvars, self.weights)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def divide_monomial(self, exp: Sequence[int]) -> "TruncatedSeries":
        """Exact division by ``x^exp``; every known term must be divisible."""
        e0 = tuple(exp) + (0,) * (3 - len(exp))
        out = {}
        for e, c in self.coeffs.items():
            q = (e[0] - e0[0], e[1] - e0[1], e[2] - e0[2])
            if min(q) < 0:
                raise ValueError(f"term with exponent {e} is not divisible by {e0}")
            out[q] = c
        t = self.trunc if self.is_exact else self.trunc - _wdeg(e0, self.weights)
        return self._like(out, t)

    def restrict(self, zeroed: Iterable[int]) -> "TruncatedSeries":
        """Set the listed variables (indices) to zero."""
        z = set(zeroed)
        return self._like(
            {e: c for e, c in self.coeffs.items() if not any(e[i] for i in z)}
        )

    def select(self, pred) -> "TruncatedSeries":
        return self._like({e: c for e, c in self.coeffs.items() if pred(e)})

    def permute(self, perm: Sequence[int]) -> "TruncatedSeries":
        """Rename variable ``i`` to ``perm[i]``."""
        out = {}
        for e, c in self.coeffs.items():
            f = [0, 0, 0]
            for i in range(3):
                f[perm[i]] += e[i]
            out[tuple(f)] = c
        w = [0, 0, 0]
        for i in range(3):
            w[perm[i]] = self.weights[i]
        nv = max([perm[i] + 1 for i in range(self.nvars)] + [self.nvars])
        return TruncatedSeries._raw(out, self.trunc, nv, tuple(w))

    def with_weights(self, weights: Sequence[int], trunc: int) -> "TruncatedSeries":
        """Reinterpret an exact series under another truncation scheme."""
        if not self.is_exact:
            raise StructuralError("only exact series can be re-weighted")
        return TruncatedSeries(self.coeffs, trunc, self.nvars, weights)

    def evaluate(self, point: Sequence) -> mpq:
        """Evaluate the known part at a rational point."""
        pt = [as_q(p) for p in point] + [mpq(0)] * (3 - len(point))
        total = mpq(0)
        for e, c in self.coeffs.items():
            total += c * pt[0] ** e[0] * pt[1] ** e[1] * pt[2] ** e[2]
        return total

    def coefficients_in(self, var: int) -> dict[int, "TruncatedSeries"]:
        """Expand as ``sum_k a_k * var^k`` with ``a_k`` free of ``var``."""
        parts: dict[int, dict] = {}
        for e, c in self.coeffs.items():
            k = e[var]
            f = list(e)
            f[var] = 0
            parts.setdefault(k, {})[tuple(f)] = c
        return {k: self._like(v) for k, v in sorted(parts.items())}


def _check_compatible(s: TruncatedSeries, t: TruncatedSeries) -> None:
    if s.nvars != t.nvars:
        raise StructuralError(f"nvars mismatch: {s.nvars} vs {t.nvars}")
    if s.weights != t.weights:
        raise StructuralError(f"weight mismatch: {s.weights} vs {t.weights}")


def mul(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    """Truncated product; the result carries ``min(s.trunc, t.trunc)``."""
    _check_compatible(s, t)
    T = min(s.trunc, t.trunc)
    w = s.weights
    if len(s.coeffs) > len(t.coeffs):
        s, t = t, s
    out: dict[Exp, mpq] = {}
    tw = [(e, c, _wdeg(e, w)) for e, c in t.coeffs.items()]
    for e1, c1 in s.coeffs.items():
        d1 = _wdeg(e1, w)
        if d1 > T:
            continue
        for e2, c2, d2 in tw:
            if d1 + d2 > T:
                continue
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
            v = out.get(e)
            out[e] = c1 * c2 if v is None else v + c1 * c2
    return TruncatedSeries._raw({e: c for e, c in out.items() if c}, T, s.nvars, w)


def _require_unit(s: TruncatedSeries) -> tuple[mpq, TruncatedSeries]:
    c = s.constant_term
    if not c:
        raise NotAUnit(f"constant term of {s} vanishes")
    h = (s - c).scale(1 / c)
    if h and any(_wdeg(e, s.weights) == 0 for e in h.coeffs):
        raise TruncationError(
            "unit depends on an exactly-carried variable; its inverse or root is an infinite series"
        )
    return c, h


def _geometric_sum(h: TruncatedSeries, coeff_fn) -> TruncatedSeries:
    """``sum_k coeff_fn(k) h^k``; terminates because h has weighted order >= 1."""
    result = TruncatedSeries.one(h.trunc, h.nvars, h.weights)
    power = result
    k = 0
    while True:
        k += 1
        power = power * h
        if not power:
            return result
        c = coeff_fn(k)
        if c:
            result = result + power.scale(c)


def invert_unit(s: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a unit series, up to its truncation."""
    c, h = _require_unit(s)
    return _geometric_sum(h, lambda k: (-1) ** k).scale(1 / c)


def rational_root(c, q: int) -> mpq:
    """Exact real ``q``-th root of a rational; the positive root for positive input."""
    c = as_q(c)
    if q <= 0:
        raise ValueError("root index must be positive")
    if q == 1:
        return c
    sign = 1
    if c < 0:
        if q % 2 == 0:
            raise NotAPerfectPower(f"{c} has no real {q}-th root")
        sign, c = -1, -c
    num, ok1 = iroot(mpz(c.numerator), q)
    den, ok2 = iroot(mpz(c.denominator), q)
    if not (ok1 and ok2):
        raise NotAPerfectPower(f"{c} is not a perfect {q}-th power")
    return sign * mpq(num, den)


@dataclass(frozen=True)
class RootConstant:
    """The symbolic constant ``base ** (p / q)`` (positive real root)."""

    base: mpq
    exponent: Fraction

    def __str__(self) -> str:
        return f"({self.base})^({self.exponent})"


def pow_rational_normalized(s: TruncatedSeries, lam) -> tuple[RootConstant, TruncatedSeries]:
    """Split ``s^lam`` as a root constant times a series with constant term 1."""
    lam = Fraction(lam)
    c, h = _require_unit(s)
    body = _geometric_sum(h, lambda k: _binom(lam, k))
    return RootConstant(c, lam), body


def pow_rational(s: TruncatedSeries, lam) -> TruncatedSeries:
    """``s^lam`` for a unit series and rational ``lam`` by the binomial series.

    The constant factor uses the positive real root, so the constant term
    must be a perfect power in the rationals; otherwise use
    :func:`pow_rational_normalized`, which keeps the constant symbolic.
    """
    lam = Fraction(lam)
    root, body = pow_rational_normalized(s, lam)
    scale = rational_root(root.base, lam.denominator) ** lam.numerator
    return body.scale(scale)


def _binom(lam: Fraction, k: int) -> mpq:
    out = Fraction(1)
    for i in range(k):
        out = out * (lam - i) / (i + 1)
    return as_q(out)


def partial(s: TruncatedSeries, var: int) -> TruncatedSeries:
    """Formal partial derivative; truncation drops by the variable's weight."""
    out = {}
    for e, c in s.coeffs.items():
        if e[var]:
            f = list(e)
            f[var] -= 1
            out[tuple(f)] = c * e[var]
    t = s.trunc if s.is_exact else s.trunc - s.weights[var]
    return s._like(out, t)


def ord_restrict(s: TruncatedSeries, zeroed: Iterable[int] = ()) -> Exact | AtLeast:
    """Order of ``s`` after setting the listed variables to zero."""
    r = s.restrict(zeroed)
    n = r.order()
    if n is None:
        return AtLeast(s.trunc)
    if s.is_exact or n < s.trunc:
        return Exact(n)
    return AtLeast(s.trunc)


def _substitute_monomials(s, imgs, used, T, nvars, w) -> TruncatedSeries:
    terms = {i: next(iter(imgs[i].coeffs.items())) for i in used}
    out: dict[Exp, mpq] = {}
    for e, c in s.coeffs.items():
        ne = (0, 0, 0)
        for i in used:
            if e[i]:
                ie, ic = terms[i]
                ne = (ne[0] + e[i] * ie[0], ne[1] + e[i] * ie[1], ne[2] + e[i] * ie[2])
                c = c * ic ** e[i]
        if _wdeg(ne, w) > T:
            continue
        v = out.get(ne)
        out[ne] = c if v is None else v + c
    return TruncatedSeries._raw({e: c for e, c in out.items() if c}, T, nvars, w)


def substitute(
    s: TruncatedSeries,
    images: Sequence[TruncatedSeries],
    trunc: int | None = None,
) -> TruncatedSeries:
    """Compose ``s`` with the map ``var_i -> images[i]``.

    All images share one truncation scheme, which becomes the scheme of the
    result.  For a non-exact ``s`` every image must vanish at the origin and
    the output truncation is the largest order certified by the input's
    truncation; an exact ``s`` may be composed with arbitrary images.
    """
    if len(images) < s.nvars:
        raise MalformedChart(f"need {s.nvars} images, got {len(images)}")
    imgs = list(images[:3]) + [None] * (3 - len(images))
    used = [i for i in range(3) if any(e[i] for e in s.coeffs)]
    ref = next(im for im in images if im is not None)
    for im in images:
        if im is not None:
            _check_compatible(im, ref)
    w_new = ref.weights
    T = min(im.trunc for im in images if im is not None)
    if trunc is not None:
        T = min(T, trunc) if not ref.is_exact else trunc
    if not s.is_exact:
        bounds = []
        for i in range(s.nvars):
            if not s.weights[i]:
                continue
            im = imgs[i]
            if im is not None and im.constant_term:
                raise MalformedChart(
                    f"image of {VARS[i]} has a nonzero constant term; composition is not defined"
                )
            wo = im.weighted_order() if im is not None else None
            if wo is None:
                continue
            if wo == 0:
                raise MalformedChart(
                    f"image of {VARS[i]} has weighted order 0 in the target scheme"
                )
            bounds.append((s.trunc + 1) * wo - 1)
        if bounds:
            T = min([T] + bounds)
    for i in used:
        if imgs[i] is None:
            raise MalformedChart(f"no image for {VARS[i]}")
    imgs = [im.truncate(T) if im is not None else None for im in imgs]
    if all(imgs[i] is not None and len(imgs[i].coeffs) == 1 for i in used):
        return _substitute_monomials(s, imgs, used, T, ref.nvars, w_new)
    one = TruncatedSeries.one(T, ref.nvars, w_new)
    cache: dict[tuple[int, int], TruncatedSeries] = {}

    def power(i: int, k: int) -> TruncatedSeries:
        key = (i, k)
        if key not in cache:
            if k == 0:
                cache[key] = one
            else:
                cache[key] = power(i, k - 1) * imgs[i]
        return cache[key]

    groups: dict[tuple[int, int], dict[int, mpq]] = {}
    for e, c in s.coeffs.items():
        groups.setdefault((e[1], e[2]), {})[e[0]] = c
    acc: dict[Exp, mpq] = {}
    for (j, k), inner in sorted(groups.items()):
        lin: dict[Exp, mpq] = {}
        for i, c in inner.items():
            for e, d in power(0, i).coeffs.items():
                v = lin.get(e)
                lin[e] = c * d if v is None else v + c * d
        prod = mul(one._like({e: c for e, c in lin.items() if c}), power(1, j) * power(2, k))
        for e, d in prod.coeffs.items():
            v = acc.get(e)
            acc[e] = d if v is None else v + d
    return TruncatedSeries._raw({e: c for e, c in acc.items() if c}, T, ref.nvars, w_new)
