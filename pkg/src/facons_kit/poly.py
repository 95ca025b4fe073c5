"""Exact sparse multivariate polynomial arithmetic over Q.

Polynomials live in an *arena*: an immutable ordered tuple of variable
names.  Cross-arena operations require an explicit embedding
(:func:`embed`), which prevents silent index confusion between the
source space x_1..x_n and the target space a_1..a_n.

Monomials are exponent tuples of the arena's length; coefficients are
``fractions.Fraction`` and never stored when zero.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Monomial = tuple  # exponent vector, len == arena size
Arena = tuple     # ordered variable names

ZERO = Fraction(0)
ONE = Fraction(1)


class ArenaMismatch(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"coefficient must be rational, got {type(x).__name__}")


class Polynomial:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("arena", "terms")

    def __init__(self, arena: Arena, terms: dict | None = None, *, _clean: bool = True):
        self.arena = tuple(arena)
        if terms is None:
            self.terms = {}
        elif _clean:
            n = len(self.arena)
            clean = {}
            for mono, coeff in terms.items():
                if len(mono) != n:
                    raise ArenaMismatch(f"monomial {mono} has wrong length for arena {self.arena}")
                coeff = _as_fraction(coeff)
                if coeff:
                    clean[tuple(mono)] = coeff
            self.terms = clean
        else:
            self.terms = terms

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, arena: Arena) -> "Polynomial":
        return cls(arena, {}, _clean=False)

    @classmethod
    def const(cls, arena: Arena, value) -> "Polynomial":
        value = _as_fraction(value)
        if not value:
            return cls.zero(arena)
        return cls(arena, {(0,) * len(arena): value}, _clean=False)

    @classmethod
    def var(cls, arena: Arena, name: str) -> "Polynomial":
        arena = tuple(arena)
        try:
            i = arena.index(name)
        except ValueError:
            raise ArenaMismatch(f"variable {name!r} not in arena {arena}") from None
        mono = tuple(1 if j == i else 0 for j in range(len(arena)))
        return cls(arena, {mono: ONE}, _clean=False)

    @classmethod
    def monomial(cls, arena: Arena, exponents, coeff=1) -> "Polynomial":
        return cls(tuple(arena), {tuple(exponents): _as_fraction(coeff)})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        n = len(self.arena)
        return all(m == (0,) * n for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * len(self.arena), ZERO)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.arena == other.arena
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.arena, frozenset(self.terms.items())))

    # -- ring operations ----------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.arena != other.arena:
            raise ArenaMismatch(f"arenas differ: {self.arena} vs {other.arena}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.arena, other)
        self._check(other)
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = res.get(m, ZERO) + c
            if s:
                res[m] = s
            elif m in res:
                del res[m]
        return Polynomial(self.arena, res, _clean=False)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return Polynomial(self.arena, {m: -c for m, c in self.terms.items()}, _clean=False)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.arena, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_fraction(other)
            if not other:
                return Polynomial.zero(self.arena)
            return Polynomial(
                self.arena, {m: c * other for m, c in self.terms.items()}, _clean=False
            )
        self._check(other)
        res: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = res.get(m, ZERO) + c1 * c2
                if s:
                    res[m] = s
                elif m in res:
                    del res[m]
        return Polynomial(self.arena, res, _clean=False)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = Polynomial.const(self.arena, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def mul_term(self, mono: Monomial, coeff) -> "Polynomial":
        coeff = _as_fraction(coeff)
        if not coeff:
            return Polynomial.zero(self.arena)
        return Polynomial(
            self.arena,
            {tuple(a + b for a, b in zip(m, mono)): c * coeff for m, c in self.terms.items()},
            _clean=False,
        )

    # -- structure -----------------------------------------------------

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, index: int) -> int:
        return max((m[index] for m in self.terms), default=-1)

    def variables_used(self) -> set:
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(self.arena[i])
        return used

    def coefficients_in(self, index: int) -> dict:
        """Collect coefficients by the exponent of one variable.

        Returns {exponent: Polynomial with that variable's exponent zeroed}.
        """
        out: dict = {}
        for m, c in self.terms.items():
            e = m[index]
            rest = m[:index] + (0,) + m[index + 1:]
            out.setdefault(e, {})[rest] = c
        return {e: Polynomial(self.arena, d, _clean=False) for e, d in out.items()}

    def leading_coefficient_in(self, index: int) -> "Polynomial":
        d = self.degree_in(index)
        if d < 0:
            return Polynomial.zero(self.arena)
        return self.coefficients_in(index)[d]

    def derivative(self, index: int) -> "Polynomial":
        res = {}
        for m, c in self.terms.items():
            e = m[index]
            if e:
                dm = m[:index] + (e - 1,) + m[index + 1:]
                s = res.get(dm, ZERO) + c * e
                if s:
                    res[dm] = s
                elif dm in res:
                    del res[dm]
        return Polynomial(self.arena, res, _clean=False)

    def content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive; 0 for the zero polynomial."""
        if not self.terms:
            return ZERO
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "Polynomial":
        """Integer-primitive associate with a deterministic sign.

        The leading coefficient under graded-lex of the exponent tuples is
        made positive.
        """
        c = self.content()
        if not c:
            return self
        p = self * (1 / c)
        lead = max(p.terms, key=lambda m: (sum(m), m))
        if p.terms[lead] < 0:
            p = -p
        return p

    def key(self):
        """Canonical hashable form (used for dedup/caching)."""
        return (self.arena, tuple(sorted(self.terms.items())))

    # -- evaluation / substitution --------------------------------------

    def evaluate(self, point) -> complex:
        """Evaluate at a complex point (floating arithmetic at the last step)."""
        if len(point) != len(self.arena):
            raise DimensionMismatch(
                f"point has {len(point)} coordinates, arena has {len(self.arena)}"
            )
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for x, e in zip(point, m):
                if e:
                    v *= complex(x) ** e
            total += v
        return total

    def evaluate_exact(self, point) -> Fraction:
        """Evaluate at a rational point, exactly."""
        if len(point) != len(self.arena):
            raise DimensionMismatch(
                f"point has {len(point)} coordinates, arena has {len(self.arena)}"
            )
        total = ZERO
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v *= _as_fraction(x) ** e
            total += v
        return total

    def compose(self, images: list) -> "Polynomial":
        """Substitute images[i] for arena variable i (all over one arena)."""
        if len(images) != len(self.arena):
            raise DimensionMismatch("one image per arena variable required")
        target = images[0].arena if images else self.arena
        for img in images:
            if img.arena != target:
                raise ArenaMismatch("images must share an arena")
        # memoized per-variable powers
        powers: list[dict[int, Polynomial]] = [
            {0: Polynomial.const(target, 1)} for _ in images
        ]

        def power(i: int, e: int) -> Polynomial:
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        total = Polynomial.zero(target)
        for m, c in self.terms.items():
            term = Polynomial.const(target, c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            total = total + term
        return total

    # -- pretty printing -------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (sum(m), m), reverse=True):
            c = self.terms[m]
            factors = []
            for name, e in zip(self.arena, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                piece = str(c)
            elif c == 1:
                piece = body
            elif c == -1:
                piece = f"-{body}"
            else:
                piece = f"{c}*{body}"
            parts.append(piece)
        out = parts[0]
        for piece in parts[1:]:
            out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r} over {self.arena})"


def embed(p: Polynomial, arena: Arena) -> Polynomial:
    """Re-express p over a larger (or reordered) arena containing its variables."""
    arena = tuple(arena)
    positions = []
    for name in p.arena:
        try:
            positions.append(arena.index(name))
        except ValueError:
            raise ArenaMismatch(f"variable {name!r} missing from target arena") from None
    n = len(arena)
    terms = {}
    for m, c in p.terms.items():
        new = [0] * n
        for pos, e in zip(positions, m):
            new[pos] = e
        terms[tuple(new)] = c
    return Polynomial(arena, terms, _clean=False)


def restrict(p: Polynomial, arena: Arena) -> Polynomial:
    """Project p onto a sub-arena; fails if p uses a dropped variable."""
    arena = tuple(arena)
    drop = [i for i, name in enumerate(p.arena) if name not in arena]
    for m in p.terms:
        for i in drop:
            if m[i]:
                raise ArenaMismatch(
                    f"polynomial uses {p.arena[i]!r}, not present in {arena}"
                )
    return embed_via(p, arena)


def embed_via(p: Polynomial, arena: Arena) -> Polynomial:
    """Like embed but drops identically-zero exponent columns (internal)."""
    arena = tuple(arena)
    idx = {name: k for k, name in enumerate(arena)}
    n = len(arena)
    terms = {}
    for m, c in p.terms.items():
        new = [0] * n
        for name, e in zip(p.arena, m):
            if e:
                new[idx[name]] = e
        terms[tuple(new)] = c
    return Polynomial(arena, terms, _clean=False)


class PolynomialMap:
    """A square polynomial map F: C^n -> C^n with rational coefficients."""

    __slots__ = ("components", "source", "target")

    def __init__(self, components: list, source: Arena, target: Arena):
        self.components = tuple(components)
        self.source = tuple(source)
        self.target = tuple(target)
        if len(self.components) != len(self.source):
            raise DimensionMismatch("component count must equal source variable count")
        if len(self.source) != len(self.target):
            raise DimensionMismatch("map must be square (C^n -> C^n)")
        for comp in self.components:
            if comp.arena != self.source:
                raise ArenaMismatch("components must live in the source arena")

    @property
    def n(self) -> int:
        return len(self.source)

    def apply(self, point) -> tuple:
        return tuple(c.evaluate(point) for c in self.components)

    def apply_exact(self, point) -> tuple:
        return tuple(c.evaluate_exact(point) for c in self.components)

    def __repr__(self) -> str:
        body = "; ".join(str(c) for c in self.components)
        return f"PolynomialMap({', '.join(self.source)} -> {', '.join(self.target)}: {body})"


def evaluate(p: Polynomial, point) -> complex:
    return p.evaluate(point)


def jacobian_matrix(F: PolynomialMap) -> list:
    return [
        [F.components[i].derivative(j) for j in range(F.n)]
        for i in range(F.n)
    ]


def jacobian_determinant(F: PolynomialMap) -> Polynomial:
    """Exact symbolic determinant of the Jacobian, by cofactor expansion.

    Expands along the row or column with the most zero entries.
    """
    return _det(jacobian_matrix(F), F.source)


def _det(rows: list, arena: Arena) -> Polynomial:
    n = len(rows)
    if n == 0:
        return Polynomial.const(arena, 1)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    row_zeros = [sum(1 for e in row if e.is_zero()) for row in rows]
    col_zeros = [sum(1 for row in rows if row[j].is_zero()) for j in range(n)]
    br, bc = max(range(n), key=lambda i: row_zeros[i]), max(range(n), key=lambda j: col_zeros[j])
    total = Polynomial.zero(arena)
    if row_zeros[br] >= col_zeros[bc]:
        for j, entry in enumerate(rows[br]):
            if entry.is_zero():
                continue
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(rows) if k != br]
            piece = entry * _det(minor, arena)
            total = total + (piece if (br + j) % 2 == 0 else -piece)
    else:
        for i in range(n):
            entry = rows[i][bc]
            if entry.is_zero():
                continue
            minor = [row[:bc] + row[bc + 1:] for k, row in enumerate(rows) if k != i]
            piece = entry * _det(minor, arena)
            total = total + (piece if (i + bc) % 2 == 0 else -piece)
    return total
