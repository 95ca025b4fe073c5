"""Symbolic substitution of single-term escape curves into polynomials.

A curve ansatz assigns to each source variable a coordinate curve

    x_j(u) = shift_j + coeff_j * u^{w_j}

where shift_j and coeff_j are polynomials over a shared symbol arena
(free shifts b_j, coefficients c_j, solver symbols) and w_j is an
integer weight.  Weight 0 means the coordinate is the constant shift.
Substituting into a polynomial yields a finite Laurent polynomial in u
whose coefficients are polynomials in the symbols; all exponent
bookkeeping is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .poly import Polynomial, PolynomialMap


@dataclass(frozen=True)
class CoordinateCurve:
    """One coordinate of a curve ansatz: shift + coeff * u^weight."""

    shift: Polynomial
    coeff: Polynomial
    weight: int

    def at_one(self) -> Polynomial:
        """The coordinate value at u = 1."""
        return self.shift + self.coeff


@dataclass(frozen=True)
class CurveAnsatz:
    """A curve x(u) with one CoordinateCurve per source variable.

    ``symbols`` is the shared arena of the shift/coefficient polynomials;
    ``relations`` are polynomial side conditions among the symbols (for
    example lam*lam_inv - 1 when a template uses inverse symbols);
    ``units`` lists symbols constrained nonzero (saturated in analyses).
    """

    coordinates: tuple
    symbols: tuple
    relations: tuple = field(default=())
    units: tuple = field(default=())

    def __post_init__(self):
        if not any(c.weight > 0 for c in self.coordinates):
            raise ValueError("curve must tend to infinity: some weight must be positive")
        for c in self.coordinates:
            if c.weight > 0 and not c.shift.is_zero():
                raise ValueError("diverging coordinates absorb their shift (shift must be 0)")
            if c.shift.arena != self.symbols or c.coeff.arena != self.symbols:
                raise ValueError("coordinate polynomials must live in the symbol arena")

    @property
    def weights(self) -> tuple:
        return tuple(c.weight for c in self.coordinates)


class LaurentExpansion:
    """Finite Laurent polynomial in u with Polynomial coefficients."""

    __slots__ = ("symbols", "coeffs")

    def __init__(self, symbols, coeffs: dict | None = None):
        self.symbols = tuple(symbols)
        self.coeffs = {}
        if coeffs:
            for e, p in coeffs.items():
                if not p.is_zero():
                    self.coeffs[int(e)] = p

    def coefficient(self, power: int) -> Polynomial:
        return self.coeffs.get(power, Polynomial.zero(self.symbols))

    def positive_part(self) -> dict:
        return {e: p for e, p in self.coeffs.items() if e > 0}

    def constant_term(self) -> Polynomial:
        return self.coefficient(0)

    def powers(self) -> list:
        return sorted(self.coeffs)

    def __add__(self, other: "LaurentExpansion") -> "LaurentExpansion":
        res = dict(self.coeffs)
        for e, p in other.coeffs.items():
            s = res.get(e)
            res[e] = p if s is None else s + p
        return LaurentExpansion(self.symbols, res)

    def __mul__(self, other: "LaurentExpansion") -> "LaurentExpansion":
        res: dict = {}
        for e1, p1 in self.coeffs.items():
            for e2, p2 in other.coeffs.items():
                e = e1 + e2
                s = res.get(e)
                prod = p1 * p2
                res[e] = prod if s is None else s + prod
        return LaurentExpansion(self.symbols, res)

    def scale(self, factor) -> "LaurentExpansion":
        return LaurentExpansion(self.symbols, {e: p * factor for e, p in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentExpansion)
            and self.symbols == other.symbols
            and self.coeffs == other.coeffs
        )

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            if e == 0:
                parts.append(f"({self.coeffs[e]})")
            else:
                parts.append(f"({self.coeffs[e]})*u^{e}")
        return " + ".join(parts)


def substitute_curve(p: Polynomial, ansatz: CurveAnsatz) -> LaurentExpansion:
    """Expand p(x(u)) as a Laurent polynomial in u.

    Every arena variable of p must have an ansatz coordinate (positional).
    Powers of each coordinate are expanded binomially, so a coordinate
    curve appearing with exponent e contributes shift^(e-k) coeff^k u^(k w).
    """
    if len(ansatz.coordinates) != len(p.arena):
        raise ValueError(
            f"ansatz has {len(ansatz.coordinates)} coordinates for arena of {len(p.arena)}"
        )
    symbols = ansatz.symbols
    one = LaurentExpansion(symbols, {0: Polynomial.const(symbols, 1)})

    # memoized coordinate powers
    caches: list[dict] = [dict() for _ in ansatz.coordinates]

    def coord_power(j: int, e: int) -> LaurentExpansion:
        cache = caches[j]
        got = cache.get(e)
        if got is not None:
            return got
        c = ansatz.coordinates[j]
        if c.weight == 0:
            # coordinate is the constant shift
            res = LaurentExpansion(symbols, {0: c.shift ** e})
        elif c.shift.is_zero():
            res = LaurentExpansion(symbols, {c.weight * e: c.coeff ** e})
        else:
            coeffs: dict = {}
            for k in range(e + 1):
                term = (c.shift ** (e - k)) * (c.coeff ** k) * comb(e, k)
                power = k * c.weight
                s = coeffs.get(power)
                coeffs[power] = term if s is None else s + term
            res = LaurentExpansion(symbols, coeffs)
        cache[e] = res
        return res

    total = LaurentExpansion(symbols)
    for m, coeff in p.terms.items():
        term = one
        for j, e in enumerate(m):
            if e:
                term = term * coord_power(j, e)
        total = total + term.scale(coeff)
    return total


def substitute_curve_map(F: PolynomialMap, ansatz: CurveAnsatz) -> list:
    """Componentwise expansion of F(x(u))."""
    return [substitute_curve(c, ansatz) for c in F.components]


def simple_ansatz(n: int, weights, *, shifts=None) -> CurveAnsatz:
    """Build the standard enumeration ansatz for a weight vector.

    w_j > 0: c_j u^{w_j} (no shift); w_j < 0: b_j + c_j u^{w_j};
    w_j = 0: the constant b_j.  ``shifts`` may pin some b_j to fixed
    rationals (entries: None for free, a Fraction/int for fixed).
    """
    weights = tuple(int(w) for w in weights)
    if len(weights) != n:
        raise ValueError("one weight per coordinate required")
    fixed = list(shifts) if shifts is not None else [None] * n
    b_names = [f"b{j + 1}" for j in range(n) if weights[j] <= 0 and fixed[j] is None]
    c_names = [f"c{j + 1}" for j in range(n) if weights[j] != 0]
    symbols = tuple(b_names + c_names)
    coords = []
    for j, w in enumerate(weights):
        if w > 0:
            shift = Polynomial.zero(symbols)
        elif fixed[j] is not None:
            shift = Polynomial.const(symbols, Fraction(fixed[j]))
        else:
            shift = Polynomial.var(symbols, f"b{j + 1}")
        if w != 0:
            coeff = Polynomial.var(symbols, f"c{j + 1}")
        else:
            coeff = Polynomial.zero(symbols)
        coords.append(CoordinateCurve(shift, coeff, w))
    return CurveAnsatz(tuple(coords), symbols, units=tuple(c_names))
