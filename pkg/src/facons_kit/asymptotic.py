"""The asymptotic set of a dominant polynomial map.

For each source coordinate x_i, the graph ideal <F_1(x)-a_1, ..., F_n(x)-a_n>
is intersected with Q[a, x_i]; for a dominant square map that elimination
ideal is principal, generated by the minimal equation of x_i over the
coordinate functions.  The leading coefficient of that eliminant with
respect to x_i cuts out coordinate i's contribution, and the asymptotic
set is the union over i of those loci.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groebner import (
    Budget,
    GrevLex,
    Ideal,
    dimension,
    groebner_cached,
    is_unit_ideal,
    radical_member,
    restrict_ideal,
)
from .poly import Polynomial, PolynomialMap, embed_via, jacobian_determinant


class NotDominantError(ValueError):
    """The map's Jacobian determinant vanishes identically."""


@dataclass(frozen=True)
class CoordinateEliminant:
    index: int                 # 1-based source coordinate
    eliminant: Polynomial      # in Q[a_1..a_n, x_i]
    phi0: Polynomial           # leading coefficient in x_i, in the a-arena
    degree: int                # degree of the eliminant in x_i


@dataclass(frozen=True)
class AsymptoticSet:
    components: tuple          # squarefree, content-free, pairwise non-associate, a-arena
    per_coordinate: tuple      # CoordinateEliminant per i
    arena: tuple               # target arena
    possibly_reducible: tuple = field(default=())  # components the factor splitter left merged


def check_dominant(F: PolynomialMap) -> bool:
    """Dominance test: nonzero Jacobian determinant."""
    return not jacobian_determinant(F).is_zero()


def graph_ideal(F: PolynomialMap):
    """<F_i(x) - a_i> over the joined arena (x..., a...)."""
    arena = F.source + F.target
    gens = []
    for comp, a_name in zip(F.components, F.target):
        gens.append(embed_via(comp, arena) - Polynomial.var(arena, a_name))
    return Ideal(tuple(gens), arena, GrevLex()), arena


def coordinate_eliminant(F: PolynomialMap, i: int, budget: Budget | None = None,
                         inner_order=None) -> CoordinateEliminant:
    """Minimal-degree relation of x_i over Q[a_1..a_n] on the graph of F.

    ``i`` is 1-based.  Among the elimination ideal's reduced basis the
    element with minimal positive degree in x_i is selected (ties by total
    degree, then by term order), made integer-primitive with a canonical
    sign.
    """
    if not 1 <= i <= F.n:
        raise IndexError(f"coordinate index {i} out of range 1..{F.n}")
    xi = F.source[i - 1]
    I, arena = graph_ideal(F)
    from .groebner import eliminate  # local import keeps module init cheap

    drop = {v for v in F.source if v != xi}
    elim = eliminate(I, drop, budget, inner_order)
    kept_arena = F.target + (xi,)
    candidates = []
    for g in elim.generators:
        h = embed_via(g, kept_arena)
        d = h.degree_in(len(F.target))
        if d >= 1:
            candidates.append((d, h.total_degree(), h.key(), h))
    if not candidates:
        raise NotDominantError(
            f"no relation for {xi}: elimination ideal trivial (map not dominant?)"
        )
    candidates.sort(key=lambda t: t[:3])
    d, _, _, best = candidates[0]
    best = best.primitive()
    phi0 = best.leading_coefficient_in(len(F.target))
    phi0 = restrict_to_target(phi0, F.target).primitive()
    return CoordinateEliminant(i, best, phi0, d)


def restrict_to_target(p: Polynomial, target) -> Polynomial:
    return embed_via(p, tuple(target))


def phi0(eliminant: Polynomial, i: int, n_target: int) -> Polynomial:
    """Leading coefficient of an eliminant with respect to its x_i slot.

    The eliminant arena is (a_1..a_n, x_i); a constant result means the
    coordinate contributes nothing to the asymptotic set.
    """
    if eliminant.is_zero() or eliminant.degree_in(n_target) < 1:
        raise ValueError("eliminant must be nonzero with positive degree in x_i")
    lead = eliminant.leading_coefficient_in(n_target)
    return restrict_to_target(lead, eliminant.arena[:n_target]).primitive()


def _monomial_factors(p: Polynomial) -> tuple:
    """Split variable factors out of p: returns (vars_with_multiplicity, cofactor)."""
    n = len(p.arena)
    common = [min(m[j] for m in p.terms) for j in range(n)]
    if not any(common):
        return (), p
    factors = tuple(
        (p.arena[j], e) for j, e in enumerate(common) if e
    )
    terms = {
        tuple(a - b for a, b in zip(m, common)): c for m, c in p.terms.items()
    }
    return factors, Polynomial(p.arena, terms, _clean=False)


def _univariate_rational_factors(p: Polynomial) -> list | None:
    """Split a one-variable polynomial along its rational roots.

    Returns the linear factors plus a root-free cofactor, or None when p
    is not univariate or has no rational root.  Components are squarefree
    here, so roots are simple.
    """
    used = p.variables_used()
    if len(used) != 1:
        return None
    name = used.pop()
    idx = p.arena.index(name)
    coeffs = [Fraction(0)] * (p.degree_in(idx) + 1)
    for m, c in p.terms.items():
        coeffs[m[idx]] = c
    from .roots import divide_out_root, rational_roots

    roots = rational_roots(list(coeffs))
    if not roots:
        return None
    var = Polynomial.var(p.arena, name)
    factors = []
    for r in roots:
        factors.append((var - r).primitive())
        coeffs = divide_out_root(coeffs, r)
    if len(coeffs) > 1:
        leftover = {}
        for e, c in enumerate(coeffs):
            if c:
                mono = [0] * len(p.arena)
                mono[idx] = e
                leftover[tuple(mono)] = c
        factors.append(Polynomial(p.arena, leftover).primitive())
    return factors


def _trial_factors(p: Polynomial) -> list:
    """Light factor detection: monomial factors, rational-root splitting of
    one-variable cofactors, and the primitive remainder.

    Full factorization over Q is out of scope; merged irreducible factors
    are reported as one polynomial (flagged possibly_reducible upstream
    when the squarefreeness certificate fails).
    """
    out = []
    mono, rest = _monomial_factors(p)
    for name, _mult in mono:
        out.append(Polynomial.var(p.arena, name))
    if not rest.is_constant():
        split = _univariate_rational_factors(rest)
        if split is not None:
            out.extend(f for f in split if not f.is_constant())
        else:
            out.append(rest.primitive())
    return out


def is_squarefree(p: Polynomial, budget: Budget | None = None) -> bool:
    """Certificate: V(p, grad p) has codimension >= 2 in the arena."""
    if p.is_constant():
        return False
    gens = [p] + [p.derivative(j) for j in range(len(p.arena))]
    gens = [g for g in gens if not g.is_zero()]
    J = Ideal(tuple(gens), p.arena, GrevLex())
    if is_unit_ideal(J, budget):
        return True
    return dimension(J, budget) <= len(p.arena) - 2


def asymptotic_set(F: PolynomialMap, budget: Budget | None = None,
                   inner_order=None) -> AsymptoticSet:
    """Components of the non-properness locus per the eliminant formula."""
    if not check_dominant(F):
        raise NotDominantError("asymptotic_set requires a dominant map")
    per = []
    raw_components = []
    for i in range(1, F.n + 1):
        ce = coordinate_eliminant(F, i, budget, inner_order)
        per.append(ce)
        if not ce.phi0.is_constant():
            raw_components.extend(_trial_factors(ce.phi0))
    components = []
    flagged = []
    seen = set()
    for comp in raw_components:
        comp = comp.primitive()
        k = comp.key()
        if k in seen:
            continue
        seen.add(k)
        components.append(comp)
        if not is_squarefree(comp, budget):
            flagged.append(comp)
    components.sort(key=lambda c: (c.total_degree(), c.key()))
    return AsymptoticSet(tuple(components), tuple(per), F.target, tuple(flagged))


def fiber_nonempty(F: PolynomialMap, a, budget: Budget | None = None) -> bool:
    """True iff F^{-1}(a) is nonempty: 1 not in <F_i(x) - a_i>."""
    if len(a) != F.n:
        raise ValueError("point dimension mismatch")
    gens = [comp - Polynomial.const(F.source, v) for comp, v in zip(F.components, a)]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return True
    return not is_unit_ideal(Ideal(tuple(gens), F.source, GrevLex()), budget)


def on_asymptotic_set(SF: AsymptoticSet, a) -> bool:
    """Exact membership of a rational point in V(S_F)."""
    return any(c.evaluate_exact(a) == 0 for c in SF.components)


def eliminant_identity_holds(F: PolynomialMap, ce: CoordinateEliminant) -> bool:
    """E_i(F(x), x_i) must vanish identically; the module's strongest check."""
    xi = Polynomial.var(F.source, F.source[ce.index - 1])
    images = [embed_via(c, F.source) for c in F.components] + [xi]
    return ce.eliminant.compose(images).is_zero()
