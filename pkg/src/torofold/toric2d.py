"""Two-dimensional toric geometry for monomial ideals in k[x, z].

A ray ``(p, q)`` is the monomial valuation ``v(x) = p, v(z) = q``.  Fans
are refinements of the positive quadrant, with rays listed by angle from
``(1, 0)`` to ``(0, 1)``.  The cone spanned by consecutive rays
``w1, w2`` is the chart ``x = x1^w1[0] z1^w2[0], z = x1^w1[1] z1^w2[1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from math import floor, gcd
from typing import Iterable, Sequence


class NotApplicable(ValueError):
    pass


Ray = tuple[int, int]

X_AXIS: Ray = (1, 0)
Z_AXIS: Ray = (0, 1)


def make_ray(p: int, q: int) -> Ray:
    if p < 0 or q < 0 or (p == 0 and q == 0):
        raise ValueError(f"ray ({p}, {q}) is not in the positive quadrant")
    if gcd(p, q) != 1:
        raise ValueError(f"ray ({p}, {q}) is not primitive")
    return (p, q)


def det(w1: Ray, w2: Ray) -> int:
    return w1[0] * w2[1] - w1[1] * w2[0]


def _angle_cmp(w1: Ray, w2: Ray) -> int:
    d = det(w1, w2)
    return -1 if d > 0 else (1 if d < 0 else 0)


def sort_rays(rays: Iterable[Ray]) -> list[Ray]:
    return sorted(set(rays), key=cmp_to_key(_angle_cmp))


@dataclass(frozen=True)
class MonomialIdeal2D:
    """Monomial ideal of k[x, z] given by minimal generators ``(i, j) ~ x^i z^j``."""

    gens: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.gens:
            raise ValueError("empty ideal")
        for g in self.gens:
            if len(g) != 2 or g[0] < 0 or g[1] < 0:
                raise ValueError(f"bad exponent {g}")
        for g in self.gens:
            for h in self.gens:
                if g != h and g[0] <= h[0] and g[1] <= h[1]:
                    raise ValueError(f"{h} is not a minimal generator (divisible by {g})")

    @classmethod
    def of(cls, gens: Iterable[Sequence[int]]) -> "MonomialIdeal2D":
        """Minimal generators of the ideal spanned by ``gens``."""
        pts = {(int(a), int(b)) for a, b in gens}
        mins = [
            g for g in pts
            if not any(h != g and h[0] <= g[0] and h[1] <= g[1] for h in pts)
        ]
        return cls(tuple(sorted(mins)))

    def value(self, w: Ray) -> int:
        return min(w[0] * i + w[1] * j for i, j in self.gens)

    def minimizers(self, w: Ray) -> list[tuple[int, int]]:
        v = self.value(w)
        return [g for g in self.gens if w[0] * g[0] + w[1] * g[1] == v]

    def to_list(self) -> list[list[int]]:
        return [list(g) for g in self.gens]


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[tuple[int, int], ...]
    normals: tuple[Ray, ...]


def newton_polygon(I: MonomialIdeal2D) -> NewtonPolygon:
    """Vertices of the compact boundary of ``conv(I) + R^2_+`` and inner edge normals."""
    pts = sorted(I.gens, key=lambda g: (g[0], -g[1]))
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep only strictly convex turns of the lower-left boundary
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        if hull and p[1] >= hull[-1][1]:
            continue
        hull.append(p)
    normals = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        p, q = y1 - y2, x2 - x1
        g = gcd(p, q)
        normals.append((p // g, q // g))
    return NewtonPolygon(tuple(hull), tuple(normals))


@dataclass(frozen=True)
class Fan2D:
    rays: tuple[Ray, ...]
    insertion_order: tuple[Ray, ...] = ()

    def __post_init__(self):
        if self.rays[0] != X_AXIS or self.rays[-1] != Z_AXIS:
            raise ValueError("fan must run from (1,0) to (0,1)")
        for w1, w2 in self.cones():
            if det(w1, w2) != 1:
                raise ValueError(f"cone {w1},{w2} is not smooth")

    @classmethod
    def trivial(cls) -> "Fan2D":
        return cls((X_AXIS, Z_AXIS))

    def cones(self) -> list[tuple[Ray, Ray]]:
        return list(zip(self.rays, self.rays[1:]))

    def insert(self, w: Ray) -> "Fan2D":
        """Star subdivision at ``w``, which must be the sum of two neighbors."""
        for k, (w1, w2) in enumerate(self.cones()):
            if (w1[0] + w2[0], w1[1] + w2[1]) == w:
                rays = self.rays[: k + 1] + (w,) + self.rays[k + 1 :]
                return Fan2D(rays, self.insertion_order + (w,))
        raise ValueError(f"{w} is not the sum of two adjacent rays")

    def n_insertions(self) -> int:
        return len(self.rays) - 2

    def to_dict(self) -> dict:
        return {
            "rays": [list(r) for r in self.rays],
            "insertion_order": [list(r) for r in self.insertion_order],
        }


def smooth_closure(targets: Iterable[Ray], fan: Fan2D | None = None) -> Fan2D:
    """Minimal smooth refinement of ``fan`` containing every target ray.

    Rays are added by repeated star subdivision, so the resulting insertion
    order is a realizable blow-up sequence.
    """
    fan = fan or Fan2D.trivial()
    pending = sort_rays(targets)
    for t in pending:
        while t not in fan.rays:
            for w1, w2 in fan.cones():
                if det(w1, t) > 0 and det(t, w2) > 0:
                    fan = fan.insert((w1[0] + w2[0], w1[1] + w2[1]))
                    break
            else:  # pragma: no cover - t lies on a ray
                break
    return fan


@dataclass(frozen=True)
class Plain:
    pass


@dataclass(frozen=True)
class StrictTransformCondition:
    m: int
    r: tuple[int, ...]  # r_2 .. r_{m-1}


def ladder_ideal(m: int, r: Sequence[int]) -> MonomialIdeal2D:
    """``(z^m, x^r_i z^(m-i))`` over ``2 <= i <= m-1`` with ``r_i > 0``."""
    gens = [(0, m)] + [(ri, m - i) for i, ri in enumerate(r, start=2) if ri > 0]
    return MonomialIdeal2D.of(gens)


def strict_transform_b1(m: int, r: Sequence[int]) -> int:
    """Least ``b1 > 0`` with ``r_i + b1 (m - i) < b1 m`` for some ``r_i > 0``."""
    ratios = [Fraction(ri, i) for i, ri in enumerate(r, start=2) if ri > 0]
    if not ratios:
        raise NotApplicable("every r_i is 0")
    return floor(min(ratios)) + 1


def minimal_principalizing_fan(I: MonomialIdeal2D, mode=Plain()) -> Fan2D:
    normals = newton_polygon(I).normals
    if isinstance(mode, Plain):
        return smooth_closure(normals)
    b1 = strict_transform_b1(mode.m, mode.r)
    targets = [w for w in normals if w[1] < b1 * w[0]] + [(1, b1)]
    return smooth_closure(targets)


# -- charts -------------------------------------------------------------------


@dataclass(frozen=True)
class Chart2D:
    """Monomial chart ``x = x1^a1 z1^b1, z = x1^c1 z1^d1`` with a shape tag.

    ``interior`` (a1, b1 = v(x), v(z)) stands for ``x = x1^a1,
    z = x1^b1 (z1 + alpha)`` at a general point of an exceptional curve.
    ``two_point`` is a torus-fixed point away from the strict transform of
    ``z = 0`` and ``strict`` is the fixed point on it, ``x = x1,
    z = x1^b1 z1``.  ``identity`` is the unrefined origin.
    """

    shape: str
    a1: int
    b1: int
    c1: int = 0
    d1: int = 0

    def __post_init__(self):
        if self.shape == "interior" and not (self.a1 > 0 and self.b1 > 0):
            raise ValueError("interior chart needs a1, b1 > 0")
        if self.shape == "two_point":
            if not (self.a1 > 0 and self.b1 > 0) or abs(self.a1 * self.d1 - self.b1 * self.c1) != 1:
                raise ValueError("two-point chart needs a1, b1 > 0 and a1 d1 - b1 c1 = +-1")
        if self.shape == "strict" and self.b1 <= 0:
            raise ValueError("strict transform chart needs b1 > 0")

    def matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Rows: exponents of (x1, z1) in x and in z."""
        if self.shape == "interior":
            return ((self.a1, 0), (self.b1, 0))
        if self.shape == "two_point":
            return ((self.a1, self.b1), (self.c1, self.d1))
        if self.shape == "strict":
            return ((1, 0), (self.b1, 1))
        return ((1, 0), (0, 1))

    def pullback(self, g: tuple[int, int]) -> tuple[int, int]:
        (xa, xb), (za, zb) = self.matrix()
        return (g[0] * xa + g[1] * za, g[0] * xb + g[1] * zb)

    def to_dict(self) -> dict:
        d = {"shape": self.shape, "a1": self.a1, "b1": self.b1}
        if self.shape == "two_point":
            d.update(c1=self.c1, d1=self.d1)
        return d


def enumerate_charts(fan: Fan2D) -> list[Chart2D]:
    """Interior charts per inserted ray, then one chart per cone."""
    charts = [Chart2D("interior", w[0], w[1]) for w in fan.rays[1:-1]]
    for w1, w2 in fan.cones():
        if w2 == Z_AXIS:
            if w1 == X_AXIS:
                charts.append(Chart2D("identity", 1, 0))
            else:
                charts.append(Chart2D("strict", 1, w1[1]))
        else:
            charts.append(Chart2D("two_point", w1[0], w2[0], w1[1], w2[1]))
    return charts


def is_principal_in_chart(I: MonomialIdeal2D, c: Chart2D) -> tuple[int, int] | None:
    """Exponent of the generator of ``I`` at the chart origin, if principal."""
    imgs = [c.pullback(g) for g in I.gens]
    lo = (min(e[0] for e in imgs), min(e[1] for e in imgs))
    return lo if lo in imgs else None


# -- omega ----------------------------------------------------------------------


def omega_quantities(c: Chart2D, m: int, r: Sequence[int]) -> list[Fraction]:
    terms = [(0, Fraction(0))] + [(i, Fraction(ri)) for i, ri in enumerate(r, start=2) if ri > 0]
    out = []
    if c.shape == "interior":
        slopes = [Fraction(c.b1, c.a1)]
    elif c.shape == "two_point":
        slopes = [Fraction(c.c1, c.a1), Fraction(c.d1, c.b1)]
    elif c.shape == "strict":
        slopes = [Fraction(c.b1)]
    else:
        return []
    for sl in slopes:
        for i, ri in terms:
            out.append(sl * m if i == 0 else ri + sl * (m - i))
    return out


def _check_omega_args(m: int, r: Sequence[int]) -> None:
    if m < 3:
        raise NotApplicable(f"omega needs m >= 3, got {m}")
    if len(r) != m - 2:
        raise ValueError(f"expected {m - 2} values r_2..r_{m - 1}, got {len(r)}")
    if any(ri < 0 for ri in r):
        raise ValueError("r_i must be nonnegative")
    if r[-1] <= 0:
        raise NotApplicable("r_{m-1} must be positive")


def omega_max(m: int, r: Sequence[int]) -> Fraction:
    _check_omega_args(m, r)
    fan = minimal_principalizing_fan(ladder_ideal(m, r), StrictTransformCondition(m, tuple(r)))
    return max(q for c in enumerate_charts(fan) for q in omega_quantities(c, m, r))


def omega(m: int, r: Sequence[int]) -> int:
    """Least integer strictly above every chart quantity of the minimal fan."""
    return floor(omega_max(m, r)) + 1


# -- exhaustive oracles -------------------------------------------------------------


@lru_cache(maxsize=None)
def all_fans(max_insertions: int) -> tuple[tuple[Fan2D, ...], ...]:
    """Fans by number of insertions, deduplicated by ray set."""
    levels = [[Fan2D.trivial()]]
    seen = {Fan2D.trivial().rays}
    for _ in range(max_insertions):
        nxt = []
        for fan in levels[-1]:
            for w1, w2 in fan.cones():
                new = fan.insert((w1[0] + w2[0], w1[1] + w2[1]))
                if new.rays not in seen:
                    seen.add(new.rays)
                    nxt.append(new)
        levels.append(nxt)
    return tuple(map(tuple, levels))


def fan_satisfies(I: MonomialIdeal2D, fan: Fan2D, mode=Plain()) -> bool:
    """Direct check of the mode's conditions on every chart of ``fan``."""
    for c in enumerate_charts(fan):
        if c.shape in ("strict", "identity") and not isinstance(mode, Plain):
            if c.shape == "identity":
                return False
            if not any(
                ri + c.b1 * (mode.m - i) < c.b1 * mode.m
                for i, ri in enumerate(mode.r, start=2)
                if ri > 0
            ):
                return False
            continue
        if is_principal_in_chart(I, c) is None:
            return False
    return True


def exhaustive_min_insertions(
    I: MonomialIdeal2D, mode=Plain(), max_insertions: int = 6, levels=None
) -> int | None:
    """Fewest star subdivisions satisfying the mode, or None beyond the bound."""
    levels = levels or all_fans(max_insertions)
    for k, fans in enumerate(levels[: max_insertions + 1]):
        if any(fan_satisfies(I, f, mode) for f in fans):
            return k
    return None


def omega_by_valuations(m: int, r: Sequence[int], max_insertions: int = 10) -> int:
    """Independent omega: searched minimal fan, quantities from chart pullbacks.

    Each quantity is the x1- (or z1-) order of a pulled-back generator of
    the ladder ideal divided by the order of ``x`` in the same variable.
    """
    _check_omega_args(m, r)
    I = ladder_ideal(m, r)
    mode = StrictTransformCondition(m, tuple(r))
    levels = all_fans(max_insertions)
    fan = None
    for fans in levels:
        good = [f for f in fans if fan_satisfies(I, f, mode)]
        if good:
            if len(good) > 1:
                raise AssertionError(f"minimal fan is not unique: {good}")
            fan = good[0]
            break
    if fan is None:
        raise NotApplicable(f"no admissible fan within {max_insertions} insertions")
    gens = [(0, m)] + [(ri, m - i) for i, ri in enumerate(r, start=2) if ri > 0]
    best = Fraction(0)
    for c in enumerate_charts(fan):
        if c.shape == "identity":
            continue
        (xa, xb), _ = c.matrix()
        for g in gens:
            img = c.pullback(g)
            for k, xe in enumerate((xa, xb)):
                if xe > 0 and not (c.shape == "strict" and k == 1):
                    best = max(best, Fraction(img[k], xe))
    return floor(best) + 1
