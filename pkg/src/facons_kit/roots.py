"""Exact rational roots of univariate polynomials over Q."""

from __future__ import annotations

import math
from fractions import Fraction


def rational_sqrt(x: Fraction):
    """Exact square root when x is a perfect rational square, else None."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def rational_roots(coeffs: list) -> list:
    """All rational roots of sum(coeffs[k] x^k), exact, ascending.

    Degrees one and two are solved directly; the divisor search of the
    rational root theorem is reserved for low-height higher-degree
    polynomials (far-parameter proxy points produce huge coefficients).
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return []
    roots = set()
    if coeffs[0] == 0:
        roots.add(Fraction(0))
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
    if len(coeffs) <= 1:
        return sorted(roots)
    if len(coeffs) == 2:
        roots.add(-coeffs[0] / coeffs[1])
        return sorted(roots)
    if len(coeffs) == 3:
        c, b, a = coeffs
        disc = b * b - 4 * a * c
        r = rational_sqrt(disc)
        if r is not None:
            roots.add((-b + r) / (2 * a))
            roots.add((-b - r) / (2 * a))
        return sorted(roots)
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, abs(c))
    ints = [c // g for c in ints]
    a0, an = abs(ints[0]), abs(ints[-1])
    if a0 > 10 ** 9 or an > 10 ** 9:
        # height too large for divisor search: probe a small candidate set
        for cand in (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), 3, -3):
            if poly_eval(ints, Fraction(cand)) == 0:
                roots.add(Fraction(cand))
        return sorted(roots)
    for p in divisors(a0):
        for q in divisors(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and poly_eval(ints, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def divisors(n: int) -> list:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def poly_eval(coeffs: list, x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def divide_out_root(coeffs: list, r: Fraction) -> list:
    """Quotient of sum(coeffs[k] x^k) by (x - r); the remainder must vanish."""
    n = len(coeffs) - 1
    quotient = [Fraction(0)] * n
    quotient[n - 1] = coeffs[n]
    for k in range(n - 1, 0, -1):
        quotient[k - 1] = coeffs[k] + r * quotient[k]
    remainder = coeffs[0] + r * quotient[0]
    if remainder != 0:
        raise ValueError("not a root")
    return quotient
