"""Reduced Groebner bases over Q and the ideal-theoretic toolkit built on them.

Buchberger's algorithm with the normal pair-selection strategy and both
classical skip criteria (coprime leading terms, chain criterion).  The
engine enforces a configurable resource budget and fails hard rather
than truncating.  On top of it: elimination ideals via block orders,
radical membership (auxiliary-variable trick), variety containment,
and Krull dimension via independent variable sets of the leading-term
ideal.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .orders import Block, GrevLex, Lex, MonomialOrder
from .poly import ArenaMismatch, Polynomial, embed_via

ZERO = Fraction(0)


class ResourceLimitExceeded(RuntimeError):
    """Raised when a basis computation exceeds its pair/size budget."""


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 60000
    max_basis: int = 600

    @classmethod
    def from_env(cls) -> "Budget":
        raw = os.environ.get("FACONS_RESOURCE_BUDGET")
        if not raw:
            return cls()
        try:
            value = int(raw)
        except ValueError:
            raise ValueError("FACONS_RESOURCE_BUDGET must be an integer") from None
        if value < 1:
            raise ValueError("FACONS_RESOURCE_BUDGET must be positive")
        return cls(max_pairs=value, max_basis=max(50, value // 100))


@dataclass(frozen=True)
class Ideal:
    generators: tuple
    arena: tuple
    order: MonomialOrder

    def __init__(self, generators, arena=None, order=None):
        gens = []
        seen = set()
        for g in generators:
            if g.is_zero():
                continue
            k = g.key()
            if k not in seen:
                seen.add(k)
                gens.append(g)
        gens = tuple(gens)
        if arena is None:
            if not gens:
                raise ValueError("empty ideal needs an explicit arena")
            arena = gens[0].arena
        arena = tuple(arena)
        for g in gens:
            if g.arena != arena:
                raise ArenaMismatch("ideal generators must share the arena")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "arena", arena)
        object.__setattr__(self, "order", order or GrevLex())

    def key(self):
        return (self.arena, tuple(sorted(g.key() for g in self.generators)))


class GroebnerBasis:
    """Reduced basis: monic elements, no element's term divisible by another's lead."""

    __slots__ = ("basis", "arena", "order", "_leads")

    def __init__(self, basis, arena, order):
        self.basis = tuple(basis)
        self.arena = tuple(arena)
        self.order = order
        self._leads = tuple(order.leading(g.terms) for g in self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def leading_monomials(self) -> tuple:
        return self._leads

    def contains(self, p: Polynomial) -> bool:
        return normal_form(p, self).is_zero()


def _divides(m1: tuple, m2: tuple) -> bool:
    for a, b in zip(m1, m2):
        if a > b:
            return False
    return True


def _mono_lcm(m1: tuple, m2: tuple) -> tuple:
    return tuple(a if a > b else b for a, b in zip(m1, m2))


def _mono_div(m1: tuple, m2: tuple) -> tuple:
    return tuple(a - b for a, b in zip(m1, m2))


def _content_normalize(p: Polynomial) -> Polynomial:
    # keep coefficients small between reduction steps
    return p.primitive() if p.terms else p


def normal_form(p: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Remainder of multivariate division of p by G (fully reduced)."""
    if p.arena != G.arena:
        raise ArenaMismatch("polynomial and basis arenas differ")
    order = G.order
    leads = G._leads
    basis = G.basis
    remainder: dict = {}
    work = dict(p.terms)
    while work:
        m = order.leading(work)
        c = work[m]
        for g, lead in zip(basis, leads):
            if _divides(lead, m):
                # g is monic: subtract c * (m/lead) * g
                shift = _mono_div(m, lead)
                for gm, gc in g.terms.items():
                    tm = tuple(a + b for a, b in zip(gm, shift))
                    s = work.get(tm, ZERO) - c * gc
                    if s:
                        work[tm] = s
                    elif tm in work:
                        del work[tm]
                break
        else:
            remainder[m] = c
            del work[m]
    return Polynomial(p.arena, remainder, _clean=False)


def _reduce_against(p: Polynomial, polys: list, leads: list, order: MonomialOrder) -> Polynomial:
    """Top and tail reduction of p by a (not necessarily monic) working set."""
    remainder: dict = {}
    work = dict(p.terms)
    while work:
        m = order.leading(work)
        c = work[m]
        hit = False
        for g, lead in zip(polys, leads):
            if _divides(lead, m):
                shift = _mono_div(m, lead)
                factor = c / g.terms[lead]
                for gm, gc in g.terms.items():
                    tm = tuple(a + b for a, b in zip(gm, shift))
                    s = work.get(tm, ZERO) - factor * gc
                    if s:
                        work[tm] = s
                    elif tm in work:
                        del work[tm]
                hit = True
                break
        if not hit:
            remainder[m] = c
            del work[m]
    return Polynomial(p.arena, remainder, _clean=False)


def buchberger(I: Ideal, budget: Budget | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of I; deterministic for a fixed order and input."""
    budget = budget or Budget.from_env()
    order = I.order
    arena = I.arena
    gens = [_content_normalize(g) for g in I.generators]
    if not gens:
        raise ValueError("buchberger requires a nonempty generator set")
    gens.sort(key=lambda g: order.key(order.leading(g.terms)))

    G: list[Polynomial] = []
    leads: list[tuple] = []

    def add_poly(p: Polynomial):
        G.append(p)
        leads.append(order.leading(p.terms))

    for g in gens:
        r = _reduce_against(g, G, leads, order) if G else g
        if not r.is_zero():
            add_poly(_content_normalize(r))

    pairs = {(i, j) for i, j in combinations(range(len(G)), 2)}
    processed = 0

    def pair_key(ij):
        i, j = ij
        return (order.key(_mono_lcm(leads[i], leads[j])), i, j)

    while pairs:
        processed += 1
        if processed > budget.max_pairs:
            raise ResourceLimitExceeded(
                f"pair budget {budget.max_pairs} exceeded; raise FACONS_RESOURCE_BUDGET"
            )
        ij = min(pairs, key=pair_key)
        pairs.discard(ij)
        i, j = ij
        li, lj = leads[i], leads[j]
        lcm = _mono_lcm(li, lj)
        # criterion 1: coprime leading terms
        if all(a + b == c for a, b, c in zip(li, lj, lcm)):
            continue
        # criterion 2 (chain): a third element divides the lcm and both
        # linking pairs are already handled
        skip = False
        for k in range(len(G)):
            if k == i or k == j:
                continue
            if _divides(leads[k], lcm):
                p1 = (min(i, k), max(i, k))
                p2 = (min(j, k), max(j, k))
                if p1 not in pairs and p2 not in pairs:
                    skip = True
                    break
        if skip:
            continue
        gi, gj = G[i], G[j]
        ci, cj = gi.terms[li], gj.terms[lj]
        s = gi.mul_term(_mono_div(lcm, li), 1 / ci) - gj.mul_term(_mono_div(lcm, lj), 1 / cj)
        r = _reduce_against(s, G, leads, order)
        if r.is_zero():
            continue
        r = _content_normalize(r)
        if len(G) + 1 > budget.max_basis:
            raise ResourceLimitExceeded(
                f"basis budget {budget.max_basis} exceeded; raise FACONS_RESOURCE_BUDGET"
            )
        new_index = len(G)
        add_poly(r)
        for k in range(new_index):
            pairs.add((k, new_index))

    return _interreduce(G, arena, order)


def _interreduce(G: list, arena, order: MonomialOrder) -> GroebnerBasis:
    # discard elements whose lead is divisible by an earlier surviving lead
    polys = sorted(G, key=lambda g: order.key(order.leading(g.terms)))
    leads = [order.leading(g.terms) for g in polys]
    minimal = []
    minimal_leads = []
    for g, lead in zip(polys, leads):
        if any(_divides(l2, lead) for l2 in minimal_leads):
            continue
        minimal.append(g)
        minimal_leads.append(lead)
    # tail-reduce each element against the others until stable
    changed = True
    while changed:
        changed = False
        for i in range(len(minimal)):
            others = minimal[:i] + minimal[i + 1:]
            other_leads = minimal_leads[:i] + minimal_leads[i + 1:]
            r = _reduce_against(minimal[i], others, other_leads, order)
            r = _content_normalize(r)
            if r.terms != minimal[i].terms:
                minimal[i] = r
                minimal_leads[i] = order.leading(r.terms)
                changed = True
    monic = []
    for g, lead in zip(minimal, minimal_leads):
        lc = g.terms[lead]
        monic.append(g * (1 / lc) if lc != 1 else g)
    monic.sort(key=lambda g: order.key(order.leading(g.terms)))
    return GroebnerBasis(monic, arena, order)


# -- derived operations ------------------------------------------------

_GB_CACHE: dict = {}
_GB_CACHE_LIMIT = 4096


def groebner_cached(I: Ideal, budget: Budget | None = None) -> GroebnerBasis:
    key = (I.key(), I.order.name, budget)
    got = _GB_CACHE.get(key)
    if got is None:
        got = buchberger(I, budget)
        if len(_GB_CACHE) >= _GB_CACHE_LIMIT:
            _GB_CACHE.clear()
        _GB_CACHE[key] = got
    return got


def ideal_member(p: Polynomial, I: Ideal, budget: Budget | None = None) -> bool:
    return normal_form(p, groebner_cached(I, budget)).is_zero()


def is_unit_ideal(I: Ideal, budget: Budget | None = None) -> bool:
    return groebner_cached(I, budget).is_unit()


def eliminate(I: Ideal, drop_vars, budget: Budget | None = None,
              inner: MonomialOrder | None = None) -> Ideal:
    """Generators of I ∩ Q[arena \\ drop_vars], via a block order.

    The returned ideal lives in the original arena; its generators do not
    involve the dropped variables.  ``inner`` selects the order on the
    kept block (grevlex by default).
    """
    drop = [v for v in I.arena if v in set(drop_vars)]
    if set(drop_vars) - set(I.arena):
        raise ArenaMismatch(f"drop variables {set(drop_vars) - set(I.arena)} not in arena")
    if not drop or not I.generators:
        return I
    kept = [v for v in I.arena if v not in set(drop)]
    work_arena = tuple(drop) + tuple(kept)
    order = Block(len(drop), inner=inner)
    gens = [embed_via(g, work_arena) for g in I.generators]
    gb = buchberger(Ideal(gens, work_arena, order), budget)
    k = len(drop)
    kept_polys = []
    for g in gb:
        if all(all(e == 0 for e in m[:k]) for m in g.terms):
            kept_polys.append(embed_via(g, I.arena))
    if not kept_polys:
        return Ideal((), I.arena, I.order)
    return Ideal(tuple(kept_polys), I.arena, I.order)


def restrict_ideal(I: Ideal, arena, order: MonomialOrder | None = None) -> Ideal:
    """Re-express kept-only generators over a sub-arena."""
    arena = tuple(arena)
    gens = []
    for g in I.generators:
        if g.variables_used() - set(arena):
            raise ArenaMismatch("generator uses a variable outside the target arena")
        gens.append(embed_via(g, arena))
    return Ideal(tuple(gens), arena, order or I.order)


def radical_member(p: Polynomial, I: Ideal, budget: Budget | None = None) -> bool:
    """True iff p vanishes on V(I):  1 ∈ ⟨I, 1 - t*p⟩."""
    if p.arena != I.arena:
        raise ArenaMismatch("polynomial and ideal arenas differ")
    if p.is_zero():
        return True
    if not I.generators:
        return False
    if ideal_member(p, I, budget):
        return True
    t = "_rad_t"
    assert t not in I.arena
    arena = (t,) + I.arena
    gens = [embed_via(g, arena) for g in I.generators]
    tp = embed_via(p, arena) * Polynomial.var(arena, t)
    gens.append(Polynomial.const(arena, 1) - tp)
    return is_unit_ideal(Ideal(tuple(gens), arena, GrevLex()), budget)


def variety_containment(I: Ideal, J: Ideal, budget: Budget | None = None) -> bool:
    """True iff V(I) ⊆ V(J): every generator of J vanishes on V(I)."""
    if I.arena != J.arena:
        raise ArenaMismatch("ideals must share an arena")
    return all(radical_member(g, I, budget) for g in J.generators)


def ideals_equal_as_varieties(I: Ideal, J: Ideal, budget: Budget | None = None) -> bool:
    return variety_containment(I, J, budget) and variety_containment(J, I, budget)


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    if I.arena != J.arena:
        raise ArenaMismatch("ideals must share an arena")
    return Ideal(I.generators + J.generators, I.arena, I.order)


def ideal_intersection(I: Ideal, J: Ideal, budget: Budget | None = None) -> Ideal:
    """I ∩ J via the t-trick: eliminate t from t*I + (1-t)*J."""
    if I.arena != J.arena:
        raise ArenaMismatch("ideals must share an arena")
    if not I.generators or not J.generators:
        return Ideal((), I.arena, I.order)
    t = "_int_t"
    arena = (t,) + I.arena
    tv = Polynomial.var(arena, t)
    one = Polynomial.const(arena, 1)
    gens = [embed_via(g, arena) * tv for g in I.generators]
    gens += [embed_via(g, arena) * (one - tv) for g in J.generators]
    big = eliminate(Ideal(tuple(gens), arena, GrevLex()), {t}, budget)
    return restrict_ideal(big, I.arena, I.order)


def dimension(I: Ideal, budget: Budget | None = None) -> int:
    """Krull dimension of V(I); -1 for the unit ideal.

    Computed as the size of a largest variable subset S such that no
    leading monomial of the reduced basis is supported inside S.
    """
    if not I.generators:
        return len(I.arena)
    gb = groebner_cached(I, budget)
    if gb.is_unit():
        return -1
    n = len(I.arena)
    lead_supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.leading_monomials()]
    for size in range(n, 0, -1):
        for combo in combinations(range(n), size):
            s = set(combo)
            if not any(sup <= s for sup in lead_supports):
                return size
    return 0
