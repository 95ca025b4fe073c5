"""Classification of the ways curves escape to infinity (facons).

A weight vector w assigns each source coordinate a single-term curve
b_j + c_j u^{w_j}.  Expanding F along the curve splits into a constraint
ideal (coefficients of positive powers of u, which must vanish for the
image to converge) and a limit map (the u^0 coefficients).  Coordinates
fall into three categories: diverging (w_j > 0), converging to a limit
that is pinned independently of the target point (these enter the label),
and converging to a point-dependent value (excluded from the label).

On a cell of the component arrangement the constraint ideal is augmented
with pullbacks of the cell equations, so the limit is forced onto the
cell's closure; a weight class is a facon witness of the cell when its
limit image reaches generic points (full cell dimension), and the
remaining degenerate classes drive the star refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .groebner import (
    Budget,
    GrevLex,
    GroebnerBasis,
    Ideal,
    dimension,
    eliminate,
    groebner_cached,
    ideals_equal_as_varieties,
    normal_form,
    radical_member,
    restrict_ideal,
)
from .laurent import CurveAnsatz, simple_ansatz, substitute_curve_map
from .poly import Polynomial, PolynomialMap, embed_via


class NoCurveError(ValueError):
    """No curve with this weight vector reaches a finite limit."""


class LabelMismatch(ValueError):
    pass


class ChainError(RuntimeError):
    """A refinement's image dimensions failed to decrease strictly."""


@dataclass(frozen=True, order=True)
class Facon:
    """Escape label (I_p)[J_q] with a star level (0 = plain facon)."""

    diverging: tuple
    fixed_limit: tuple
    star_level: int = 0

    def __post_init__(self):
        if not self.diverging:
            raise ValueError("a facon needs at least one diverging coordinate")
        if set(self.diverging) & set(self.fixed_limit):
            raise ValueError("diverging and fixed-limit index sets must be disjoint")
        object.__setattr__(self, "diverging", tuple(sorted(self.diverging)))
        object.__setattr__(self, "fixed_limit", tuple(sorted(self.fixed_limit)))

    def label(self) -> str:
        i = ",".join(str(k) for k in self.diverging)
        j = ",".join(str(k) for k in self.fixed_limit)
        base = f"({i})[{j}]"
        if self.star_level:
            base += f"^{{{self.star_level}*}}"
        return base

    def plain(self) -> "Facon":
        return self if self.star_level == 0 else Facon(self.diverging, self.fixed_limit, 0)

    def starred(self, level: int) -> "Facon":
        return Facon(self.diverging, self.fixed_limit, level)

    def same_label(self, other: "Facon") -> bool:
        return self.diverging == other.diverging and self.fixed_limit == other.fixed_limit

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class PQUple:
    """Primitive positive degree vector over the labeled coordinates."""

    degrees: tuple  # sorted tuple of (index, degree)

    def __post_init__(self):
        entries = tuple(sorted((int(i), int(d)) for i, d in self.degrees))
        if not entries:
            raise ValueError("empty degree vector")
        if any(d < 1 for _, d in entries):
            raise ValueError("degrees must be >= 1")
        g = 0
        for _, d in entries:
            g = gcd(g, d)
        if g > 1:
            entries = tuple((i, d // g) for i, d in entries)
        object.__setattr__(self, "degrees", entries)

    @classmethod
    def from_weights(cls, facon: Facon, weights) -> "PQUple":
        labeled = set(facon.diverging) | set(facon.fixed_limit)
        degs = []
        for j in sorted(labeled):
            w = weights[j - 1]
            degs.append((j, abs(w) if w != 0 else 1))
        return cls(tuple(degs))

    def __str__(self) -> str:
        return "(" + ", ".join(f"{i}:{d}" for i, d in self.degrees) + ")"


def uple_equivalent(u1: PQUple, u2: PQUple, facon1: Facon | None = None,
                    facon2: Facon | None = None) -> bool:
    """Proportionality of degree vectors (canonical primitive forms equal)."""
    if facon1 is not None and facon2 is not None and not facon1.same_label(facon2):
        raise LabelMismatch(f"uples belong to different labels {facon1} vs {facon2}")
    if [i for i, _ in u1.degrees] != [i for i, _ in u2.degrees]:
        raise LabelMismatch("uples cover different coordinate sets")
    return u1.degrees == u2.degrees


@dataclass(frozen=True)
class Cell:
    """Locally closed subset: V(equations) minus the zero sets of non_equations."""

    equations: Ideal          # in the target arena
    non_equations: tuple      # polynomials required nonzero, target arena
    dim: int
    name: str = ""

    @property
    def arena(self):
        return self.equations.arena


@dataclass(frozen=True)
class LimitAnalysis:
    """Expansion bookkeeping for one curve ansatz."""

    ansatz: CurveAnsatz
    weights: tuple
    constraint_basis: GroebnerBasis      # saturated, symbols + _z arena
    limit_map: tuple                     # u^0 coefficients, normal forms mod constraints
    classification: tuple                # per coordinate: 'i' | 'ii' | 'iii'
    sat_arena: tuple

    def facon(self) -> Facon:
        div = tuple(j + 1 for j, c in enumerate(self.classification) if c == "i")
        fix = tuple(j + 1 for j, c in enumerate(self.classification) if c == "ii")
        return Facon(div, fix)


@dataclass(frozen=True)
class WeightClass:
    """One proportionality class of curves on a cell."""

    weights: tuple
    analysis: LimitAnalysis
    image: Ideal              # closure of the limit image, target arena
    image_dim: int
    generic: bool             # image reaches the cell's dimension


SAT_VAR = "_z"


def _saturated_ideal(gens, symbols, units, extra=()):
    """<gens, extra, z * prod(units) - 1> over symbols + (_z,)."""
    arena = tuple(symbols) + (SAT_VAR,)
    out = [embed_via(g, arena) for g in gens if not g.is_zero()]
    out += [embed_via(g, arena) for g in extra if not g.is_zero()]
    if units:
        prod = Polynomial.var(arena, SAT_VAR)
        for u in units:
            prod = prod * Polynomial.var(arena, u)
        out.append(prod - 1)
    if not out:
        out.append(Polynomial.zero(arena))
    return Ideal(tuple(p for p in out if not p.is_zero()), arena, GrevLex()), arena


def _positive_coefficients(expansions):
    out = []
    for le in expansions:
        for e, p in le.coeffs.items():
            if e > 0:
                out.append(p)
    return out


def _syntactic_no_curve(pos_coeffs, units) -> bool:
    unit_set = set(units)
    for p in pos_coeffs:
        if len(p.terms) == 1 and p.variables_used() <= unit_set:
            return True
    return False


def limit_constraints(F: PolynomialMap, ansatz: CurveAnsatz,
                      budget: Budget | None = None,
                      cell: Cell | None = None) -> LimitAnalysis:
    """Expand F along the ansatz; constraint ideal, limit map, categories.

    With ``cell`` given, pullbacks of the cell equations join the
    constraints so the limit is forced onto the cell's closure.  Raises
    NoCurveError when the saturated constraint ideal is the unit ideal.
    """
    expansions = substitute_curve_map(F, ansatz)
    pos = _positive_coefficients(expansions)
    units = ansatz.units
    if _syntactic_no_curve(pos, units):
        raise NoCurveError("a positive u-power carries an invertible coefficient")
    limits_raw = [le.constant_term() for le in expansions]
    extra = list(ansatz.relations)
    if cell is not None:
        for e in cell.equations.generators:
            extra.append(e.compose(list(limits_raw)))
    sat, arena = _saturated_ideal(pos, ansatz.symbols, units, extra)
    if not sat.generators:
        gb = GroebnerBasis((), arena, GrevLex())
    else:
        gb = groebner_cached(sat, budget)
        if gb.is_unit():
            raise NoCurveError("no curve with this weight vector reaches a finite limit")
    limit_nf = tuple(
        normal_form(embed_via(p, arena), gb) if gb.basis else embed_via(p, arena)
        for p in limits_raw
    )
    classification = _classify(ansatz, gb, limit_nf, arena, budget)
    return LimitAnalysis(ansatz, ansatz.weights, gb, limit_nf, classification, arena)


def _classify(ansatz: CurveAnsatz, gb: GroebnerBasis, limit_nf, arena, budget):
    limit_vars: set = set()
    for p in limit_nf:
        limit_vars |= p.variables_used()
    cats = []
    for j, coord in enumerate(ansatz.coordinates):
        if coord.weight > 0:
            cats.append("i")
            continue
        shift = coord.shift
        if shift.is_constant():
            cats.append("ii")          # template pinned the limit to a rational
            continue
        names = shift.variables_used()
        if len(names) != 1:
            cats.append("iii")         # composite shift: treated as point-dependent
            continue
        b = names.pop()
        nf = normal_form(embed_via(shift, arena), gb) if gb.basis else embed_via(shift, arena)
        if nf.is_constant():
            cats.append("ii")          # forced to a single value
            continue
        if b not in limit_vars:
            cats.append("ii")          # free but invisible to the limit: any constant works
            continue
        if not gb.basis:
            cats.append("iii")         # unconstrained and the limit sees it
            continue
        # finitely many values iff eliminating everything else leaves a
        # nonzero univariate relation in b
        drop = {v for v in arena if v != b}
        uni = eliminate(Ideal(gb.basis, arena, GrevLex()), drop, budget)
        cats.append("ii" if uni.generators else "iii")
    return tuple(cats)


def classify_coordinates(analysis: LimitAnalysis) -> Facon:
    """The facon label of an analyzed curve family."""
    return analysis.facon()


def _image_ideal(analysis: LimitAnalysis, target, budget) -> Ideal:
    """Closure of the limit image in the target space."""
    arena = analysis.sat_arena + tuple(target)
    if all(p.is_constant() for p in analysis.limit_map):
        gens = [
            Polynomial.var(tuple(target), name) - p.constant_value()
            for name, p in zip(target, analysis.limit_map)
        ]
        return Ideal(tuple(gens), tuple(target), GrevLex())
    gens = [embed_via(g, arena) for g in analysis.constraint_basis.basis]
    for name, p in zip(target, analysis.limit_map):
        gens.append(Polynomial.var(arena, name) - embed_via(p, arena))
    big = Ideal(tuple(gens), arena, GrevLex())
    img = eliminate(big, set(analysis.sat_arena), budget)
    return restrict_ideal(img, tuple(target), GrevLex())


def enumerate_weight_vectors(n: int, box: int):
    """Primitive integer vectors in [-box, box]^n with a positive entry, lex order."""
    if box < 1:
        raise ValueError("weight box must be >= 1")
    span = range(-box, box + 1)

    def rec(prefix):
        if len(prefix) == n:
            if any(w > 0 for w in prefix):
                g = 0
                for w in prefix:
                    g = gcd(g, abs(w))
                if g == 1:
                    yield tuple(prefix)
            return
        for w in span:
            yield from rec(prefix + [w])

    yield from rec([])


class CellAnalyzer:
    """Weight-class analysis over one map, shared across cells.

    The cell-independent part of each weight vector (expansion, base
    constraint ideal, raw limits) is cached; cells only contribute
    equation pullbacks.
    """

    def __init__(self, F: PolynomialMap, box: int = 3, budget: Budget | None = None):
        self.F = F
        self.box = box
        self.budget = budget
        self._base: dict = {}

    def _base_data(self, w):
        got = self._base.get(w)
        if got is None:
            ansatz = simple_ansatz(self.F.n, w)
            expansions = substitute_curve_map(self.F, ansatz)
            pos = _positive_coefficients(expansions)
            dead = _syntactic_no_curve(pos, ansatz.units)
            limits_raw = tuple(le.constant_term() for le in expansions)
            got = (ansatz, pos, limits_raw, dead)
            self._base[w] = got
        return got

    def analyze(self, w, cell: Cell) -> WeightClass | None:
        """Full analysis of one weight vector on one cell; None if no curve."""
        ansatz, pos, limits_raw, dead = self._base_data(w)
        if dead:
            return None
        extra = [e.compose(list(limits_raw)) for e in cell.equations.generators]
        sat, arena = _saturated_ideal(pos, ansatz.symbols, ansatz.units, extra)
        if sat.generators:
            gb = groebner_cached(sat, self.budget)
            if gb.is_unit():
                return None
        else:
            gb = GroebnerBasis((), arena, GrevLex())
        limit_nf = tuple(
            normal_form(embed_via(p, arena), gb) if gb.basis else embed_via(p, arena)
            for p in limits_raw
        )
        classification = _classify(ansatz, gb, limit_nf, arena, self.budget)
        analysis = LimitAnalysis(ansatz, w, gb, limit_nf, classification, arena)
        image = _image_ideal(analysis, self.F.target, self.budget)
        dim = dimension(image, self.budget) if image.generators else len(self.F.target)
        return WeightClass(w, analysis, image, dim, dim == cell.dim)

    def classes_on_cell(self, cell: Cell) -> list:
        """All weight classes whose limit meets the cell's closure."""
        out = []
        for w in enumerate_weight_vectors(self.F.n, self.box):
            wc = self.analyze(w, cell)
            if wc is not None:
                out.append(wc)
        return out


@dataclass(frozen=True)
class FaconWitness:
    facon: Facon
    uple: PQUple
    weights: tuple
    analysis: LimitAnalysis


def facons_of_component(F: PolynomialMap, cell: Cell, box: int = 3,
                        budget: Budget | None = None,
                        analyzer: CellAnalyzer | None = None):
    """Facon set of a cell with witnesses, plus all surviving weight classes.

    Returns (witnesses: dict[Facon, FaconWitness], classes: list[WeightClass],
    complete: bool).  ``complete`` is False when no facon was found inside
    the box (not a proof of absence).
    """
    analyzer = analyzer or CellAnalyzer(F, box, budget)
    classes = analyzer.classes_on_cell(cell)
    witnesses: dict = {}
    for wc in classes:
        if not wc.generic:
            continue
        facon = wc.analysis.facon()
        labeled = set(facon.diverging) | set(facon.fixed_limit)
        all_nonzero = all(wc.weights[j - 1] != 0 for j in labeled)
        candidate = (not all_nonzero, wc.weights)   # prefer nonzero-weight witnesses, then lex
        existing = witnesses.get(facon)
        if existing is None or candidate < existing[0]:
            witnesses[facon] = (candidate, wc)
    result = {
        facon: FaconWitness(facon, PQUple.from_weights(facon, wc.weights),
                            wc.weights, wc.analysis)
        for facon, (_, wc) in witnesses.items()
    }
    return result, classes, bool(result)


@dataclass(frozen=True)
class RefinementGroup:
    """One level of the partition a facon induces on a cell."""

    ideal: Ideal
    dim: int
    weight_classes: tuple     # weight vectors in this group
    star_level: int


def _meets_cell(image: Ideal, cell: Cell, budget) -> bool:
    # the image misses the open cell iff some open condition vanishes on it
    return not any(radical_member(g, image, budget) for g in cell.non_equations)


def star_refine(F: PolynomialMap, cell: Cell, facon: Facon, box: int = 3,
                budget: Budget | None = None,
                analyzer: CellAnalyzer | None = None,
                classes: list | None = None) -> list:
    """Ordered partition of the cell induced by one facon's weight classes.

    Classes with the facon's label are grouped by the closure of their
    limit image; groups are ordered by strictly decreasing dimension.
    Each group beyond the first refines the cell (star levels).
    """
    analyzer = analyzer or CellAnalyzer(F, box, budget)
    if classes is None:
        classes = analyzer.classes_on_cell(cell)
    mine = [
        wc for wc in classes
        if wc.analysis.facon().same_label(facon) and _meets_cell(wc.image, cell, budget)
    ]
    # group by variety equality (constraint ideals need not be radical, so
    # ideal identity would split groups sharing a zero set)
    groups: list[list] = []
    for wc in mine:
        for members in groups:
            if wc.image_dim == members[0].image_dim and ideals_equal_as_varieties(
                wc.image, members[0].image, budget
            ):
                members.append(wc)
                break
        else:
            groups.append([wc])
    ordered = sorted(
        ((max(g.image_dim for g in members), members) for members in groups),
        key=lambda t: (-t[0], members_key(t[1])),
    )
    out = []
    for level, (dim, members) in enumerate(ordered):
        ideal = _simplest_ideal([m.image for m in members], budget)
        out.append(
            RefinementGroup(
                ideal,
                dim,
                tuple(sorted(m.weights for m in members)),
                level,
            )
        )
    # chain validation: strictly decreasing dims, later inside earlier closure
    for a, b in zip(out, out[1:]):
        if b.dim >= a.dim:
            raise ChainError(
                f"star refinement of {facon} on {cell.name or 'cell'}: "
                f"dimensions not strictly decreasing ({a.dim} then {b.dim})"
            )
    return out


def members_key(members) -> tuple:
    return tuple(sorted(m.weights for m in members))


def _simplest_ideal(ideals, budget) -> Ideal:
    """Deterministic representative: lowest-degree reduced basis first.

    Preferring small bases tends to pick radical representatives (for
    example <a1, a2> over <a1, a2^2>) for the stratum equations.
    """

    def complexity(I: Ideal):
        gb = groebner_cached(I, budget)
        return (sum(g.total_degree() for g in gb.basis), tuple(g.key() for g in gb.basis))

    return min(ideals, key=complexity)
