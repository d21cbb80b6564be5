"""Dense univariate polynomials over Q as coefficient lists (lowest degree first)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Poly = list[Fraction]


def norm(p: Sequence) -> Poly:
    q = [Fraction(c) for c in p]
    while q and q[-1] == 0:
        q.pop()
    return q


def deg(p: Poly) -> int:
    return len(norm(p)) - 1


def deriv(p: Poly) -> Poly:
    return norm([k * c for k, c in enumerate(p)][1:])


def divmod_(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    a, b = norm(a), norm(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            r[i + k] -= c * bc
        r = norm(r)
    return norm(q), r


def monic(p: Poly) -> Poly:
    p = norm(p)
    return [c / p[-1] for c in p] if p else p


def pgcd(a: Poly, b: Poly) -> Poly:
    a, b = norm(a), norm(b)
    while b:
        a, b = b, divmod_(a, b)[1]
    return monic(a)


def strip_zero_roots(p: Poly) -> tuple[int, Poly]:
    p = norm(p)
    k = 0
    while p and p[0] == 0:
        p = p[1:]
        k += 1
    return k, p


def squarefree_parts(p: Poly) -> dict[int, Poly]:
    """Yun's decomposition ``p = c * prod_k q_k^k`` with squarefree, coprime ``q_k``."""
    p = norm(p)
    if deg(p) < 1:
        return {}
    out = {}
    a0 = pgcd(p, deriv(p))
    b = divmod_(p, a0)[0]
    c = divmod_(deriv(p), a0)[0]
    d = norm([ci - bi for ci, bi in zip(c + [0] * len(b), deriv(b) + [0] * len(c))])
    k = 1
    while deg(b) >= 1:
        a = pgcd(b, d)
        if deg(a) >= 1:
            out[k] = a
        b = divmod_(b, a)[0]
        c = divmod_(d, a)[0]
        d = norm([ci - bi for ci, bi in zip(c + [0] * len(b), deriv(b) + [0] * len(c))])
        k += 1
    return out


def max_nonzero_root_multiplicity(p: Poly) -> int:
    """Largest multiplicity of a nonzero complex root, 0 if there is none."""
    _, q = strip_zero_roots(p)
    parts = squarefree_parts(q)
    return max(parts, default=0)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            out += [k, n // k]
        k += 1
    return sorted(set(out))


def evaluate(p: Poly, t) -> Fraction:
    acc = Fraction(0)
    for c in reversed(norm(p)):
        acc = acc * t + c
    return acc


def rational_roots(p: Poly) -> list[Fraction]:
    """Distinct rational roots by the rational root test."""
    k, q = strip_zero_roots(p)
    roots = [Fraction(0)] if k else []
    if deg(q) < 1:
        return roots
    den = 1
    for c in q:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in q]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    for num in _divisors(ints[0]):
        for dd in _divisors(ints[-1]):
            for s in (1, -1):
                t = Fraction(s * num, dd)
                if t not in roots and evaluate(q, t) == 0:
                    roots.append(t)
    return sorted(roots)


def multiplicity(p: Poly, t) -> int:
    p = norm(p)
    m = 0
    while p and evaluate(p, t) == 0:
        p = divmod_(p, [-Fraction(t), Fraction(1)])[0]
        m += 1
    return m
