"""Stratification of the asymptotic set by star facons.

The arrangement of asymptotic-set components is cut into cells (points
lying on exactly a given subset of components); each cell gets its facon
set; cells with equal facon sets form the coarse partition.  Star
refinement then peels each cell: where every facon's weight classes
degenerate simultaneously, the degenerate locus splits off with a raised
star level.  The frontier order compares facon sets and must agree with
closure containment on every stratum pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .asymptotic import AsymptoticSet
from .facons import (
    Cell,
    CellAnalyzer,
    ChainError,
    Facon,
    FaconWitness,
    facons_of_component,
    star_refine,
)
from .groebner import (
    Budget,
    GrevLex,
    Ideal,
    dimension,
    groebner_cached,
    ideal_sum,
    is_unit_ideal,
    radical_member,
    variety_containment,
)
from .poly import Polynomial, PolynomialMap


@dataclass(frozen=True)
class Stratum:
    equations: Ideal
    non_equations: tuple
    dimension: int
    facon_set: frozenset          # Facon values with star levels (Xi*)
    label: str
    witnesses: tuple = field(default=(), compare=False)   # (Facon, FaconWitness)
    flags: tuple = field(default=())
    # a stratum is a union of locally closed pieces when several cells
    # share one facon set; ``equations`` is then the intersection ideal
    # (the union's closure) and each piece keeps its own open conditions
    pieces: tuple = field(default=(), compare=False)       # (Ideal, non_eqs tuple)

    def piece_list(self) -> tuple:
        return self.pieces if self.pieces else ((self.equations, self.non_equations),)

    def facon_labels(self) -> list:
        return sorted(f.label() for f in self.facon_set)

    def describe(self) -> str:
        eqs = ", ".join(str(g) for g in self.equations.generators) or "0"
        return f"{self.label}: dim {self.dimension}, V({eqs}), facons {self.facon_labels()}"


@dataclass(frozen=True)
class Stratification:
    strata: tuple
    frontier_edges: tuple         # (lower label, upper label), covering relations
    incomplete: tuple = field(default=())

    def by_label(self, label: str) -> Stratum:
        for s in self.strata:
            if s.label == label:
                return s
        raise KeyError(label)


@dataclass(frozen=True)
class PartitionElement:
    """One class of the facon partition: arrangement cells sharing a facon set."""

    pieces: tuple            # of (Cell, witnesses dict) pairs
    facons: frozenset
    complete: bool

    @property
    def cell(self) -> Cell:
        return self.pieces[0][0]

    @property
    def witnesses(self) -> dict:
        return self.pieces[0][1]


def build_arrangement(SF: AsymptoticSet, budget: Budget | None = None) -> list:
    """Cells of the component arrangement, one per realized component subset."""
    comps = list(SF.components)
    arena = SF.arena
    cells = []
    m = len(comps)
    for size in range(1, m + 1):
        for subset in combinations(range(m), size):
            chosen = [comps[i] for i in subset]
            eqs = Ideal(tuple(chosen), arena, GrevLex())
            if is_unit_ideal(eqs, budget):
                continue
            others = [comps[i] for i in range(m) if i not in subset]
            # points on a further component belong to a larger subset's cell
            if any(radical_member(c, eqs, budget) for c in others):
                continue
            dim = dimension(eqs, budget)
            name = "cell_" + "_".join(str(i + 1) for i in subset)
            cells.append(Cell(eqs, tuple(others), dim, name))
    cells.sort(key=lambda c: (-c.dim, c.name))
    return cells


def partition_by_facons(F: PolynomialMap, SF: AsymptoticSet, box: int = 3,
                        budget: Budget | None = None,
                        analyzer: CellAnalyzer | None = None) -> list:
    """The coarse partition: arrangement cells merged when facon sets agree."""
    analyzer = analyzer or CellAnalyzer(F, box, budget)
    groups: dict = {}
    order = []
    for k, cell in enumerate(build_arrangement(SF, budget)):
        witnesses, _classes, complete = facons_of_component(
            F, cell, box, budget, analyzer)
        facons = frozenset(witnesses)
        key = facons if facons else ("incomplete", k)   # never merge unknowns
        if key not in groups:
            groups[key] = [facons, [], True]
            order.append(key)
        groups[key][1].append((cell, witnesses))
        groups[key][2] = groups[key][2] and complete
    return [
        PartitionElement(tuple(groups[k][1]), groups[k][0], groups[k][2])
        for k in order
    ]


def _single_open_condition(cell_eqs: Ideal, removed: Ideal, budget) -> Polynomial | None:
    """A polynomial g with V(cell_eqs, g) = V(removed) inside the cell closure.

    Tried among the removed ideal's generators; None when no single
    generator cuts exactly (the stratum is then flagged approximate).
    """
    for g in removed.generators:
        if radical_member(g, cell_eqs, budget):
            continue
        cut = ideal_sum(cell_eqs, Ideal((g,), cell_eqs.arena, GrevLex()))
        if variety_containment(cut, removed, budget):
            return g
    return None


def star_stratify(F: PolynomialMap, SF: AsymptoticSet, box: int = 3,
                  budget: Budget | None = None,
                  analyzer: CellAnalyzer | None = None) -> Stratification:
    """Refine the facon partition into the star-facon stratification.

    Cells are peeled piece by piece; locally closed pieces whose star
    facon sets coincide form one stratum (the stratification is the
    level-set partition of the Xi* map), with the union's closure as the
    intersection ideal.
    """
    analyzer = analyzer or CellAnalyzer(F, box, budget)
    partition = partition_by_facons(F, SF, box, budget, analyzer)
    raw = []
    incomplete = []
    sentinel = 0
    for element in partition:
        for cell, witnesses in element.pieces:
            if not element.facons:
                incomplete.append(
                    f"{cell.name}: no facon found within weight box {box}")
                sentinel += 1
                raw.append((cell, frozenset(), {}, ("no_facon_in_box", sentinel)))
                continue
            raw.extend(
                _peel_cell(F, cell, element.facons, witnesses,
                           box, budget, analyzer, incomplete))

    grouped: dict = {}
    order = []
    for cell, facons, witnesses, flags in raw:
        key = frozenset(facons) if facons else ("incomplete", flags[-1])
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append((cell, facons, witnesses, flags))

    merged = []
    for key in order:
        members = grouped[key]
        cell0, facons, witnesses, flags = members[0]
        flags = tuple(f for f in flags if isinstance(f, str))
        if len(members) == 1:
            merged.append((cell0.equations, cell0.non_equations, cell0.dim,
                           facons, witnesses, flags, ()))
            continue
        equations = members[0][0].equations
        for cell, _f, _w, _fl in members[1:]:
            equations = ideal_intersection(equations, cell.equations, budget)
        pieces = tuple((cell.equations, cell.non_equations)
                       for cell, _f, _w, _fl in members)
        wits: dict = {}
        flag_set = {"merged_pieces"}
        dim = members[0][0].dim
        for cell, _f, w, fl in members:
            dim = max(dim, cell.dim)
            flag_set.update(f for f in fl if isinstance(f, str))
            for facon, witness in w.items():
                wits.setdefault(facon, witness)
        merged.append((equations, (), dim, facons, wits,
                       tuple(sorted(flag_set)), pieces))

    merged.sort(key=lambda t: (-t[2], _ideal_key(t[0])))
    named = []
    for k, (equations, opens, dim, facons, witnesses, flags, pieces) in enumerate(merged):
        named.append(Stratum(
            equations,
            opens,
            dim,
            frozenset(facons),
            f"S{k}",
            tuple(sorted(witnesses.items(), key=lambda kv: kv[0])),
            flags,
            pieces,
        ))
    edges = _frontier_edges(named, budget)
    return Stratification(tuple(named), tuple(edges), tuple(sorted(incomplete)))


def _peel_cell(F, start_cell: Cell, start_facons, start_witnesses,
               box, budget, analyzer, incomplete):
    """Definition-2.6 peeling of one partition piece.

    The first level is the cell minus the locus where every facon's
    weight classes degenerate jointly; deeper levels recurse into that
    locus with raised star levels.  Returns (cell, facon set, witnesses,
    flags) tuples.
    """
    out = []
    cell = start_cell
    depth = 0
    facons = {f.plain() for f in start_facons}
    witnesses = {f.plain(): w for f, w in start_witnesses.items()}

    def leveled(fs):
        return {f.starred(depth) for f in fs}

    def leveled_wits(ws):
        return {f.starred(depth): w for f, w in ws.items()}

    while True:
        classes = analyzer.classes_on_cell(cell)
        chains = {}
        broken = False
        for facon in sorted(facons):
            try:
                chains[facon] = star_refine(
                    F, cell, facon, box, budget, analyzer, classes)
            except ChainError as exc:
                incomplete.append(str(exc))
                broken = True
        if broken:
            out.append((cell, leveled(facons), leveled_wits(witnesses),
                        ("refinement_chain_violation",)))
            return out
        if not chains or any(len(ch) <= 1 for ch in chains.values()):
            # some facon stays generic on the whole cell: nothing to peel
            out.append((cell, leveled(facons), leveled_wits(witnesses), ()))
            return out
        # the next level's closure: the locus where every facon degenerates
        next_ideal = cell.equations
        for ch in chains.values():
            next_ideal = ideal_sum(next_ideal, ch[1].ideal)
        if is_unit_ideal(next_ideal, budget):
            out.append((cell, leveled(facons), leveled_wits(witnesses), ()))
            return out
        open_poly = _single_open_condition(cell.equations, next_ideal, budget)
        flags = ()
        if open_poly is None:
            # AND semantics cannot cut the removed locus with one generator;
            # keep them all and flag the stratum as approximate
            extra = tuple(g for g in next_ideal.generators
                          if not radical_member(g, cell.equations, budget))
            flags = ("open_conditions_approximate",)
        else:
            extra = (open_poly,)
        level_cell = Cell(cell.equations, cell.non_equations + extra,
                          cell.dim, f"{cell.name}@{depth}")
        out.append((level_cell, leveled(facons), leveled_wits(witnesses), flags))
        # descend into the degenerate locus
        next_dim = dimension(next_ideal, budget)
        next_cell = Cell(next_ideal, cell.non_equations, next_dim,
                         f"{cell.name}@{depth + 1}")
        wit, _classes2, complete = facons_of_component(
            F, next_cell, box, budget, analyzer)
        if not complete:
            incomplete.append(
                f"{next_cell.name}: no facon found within weight box {box}")
            out.append((next_cell, frozenset(), {}, ("no_facon_in_box",)))
            return out
        depth += 1
        facons = {f.plain() for f in wit}
        witnesses = {f.plain(): w for f, w in wit.items()}
        cell = next_cell


def _ideal_key(I: Ideal):
    return tuple(sorted(g.key() for g in I.generators))


def facon_less(k1: Facon, k2: Facon) -> bool:
    """The partial order on facons (strictly less).

    Cases 1 and 2 compare the index sets; across different labels a
    facon on a deeper star level cannot sit below a shallower one, so
    those cases additionally require star_level(k1) >= star_level(k2).
    Case 3 raises the star level within one label.
    """
    i1, j1 = set(k1.diverging), set(k1.fixed_limit)
    i2, j2 = set(k2.diverging), set(k2.fixed_limit)
    if k1.star_level >= k2.star_level:
        if i1 > i2 and j1 >= j2:
            return True
        if i1 == i2 and j1 > j2:
            return True
    if k1.same_label(k2) and k1.star_level > k2.star_level:
        return True
    return False


def point_less(s1: Stratum, s2: Stratum) -> bool:
    """s1 precedes s2: every facon of s2 is matched or dominated in s1."""
    if not s2.facon_set:
        return False
    for k2 in s2.facon_set:
        if not any(k1 == k2 or facon_less(k1, k2) for k1 in s1.facon_set):
            return False
    return True


def order_of(s: Stratum) -> int:
    return len(s.facon_set)


def closure_contains(lower: Stratum, upper: Stratum, budget: Budget | None = None) -> bool:
    """lower ⊆ closure(upper), ideal-theoretically."""
    if lower is upper or lower.label == upper.label:
        return True
    return variety_containment(lower.equations, upper.equations, budget)


def _frontier_edges(strata, budget) -> list:
    n = len(strata)
    contained = [[False] * n for _ in range(n)]
    for i, si in enumerate(strata):
        for j, sj in enumerate(strata):
            if i == j or si.dimension >= sj.dimension:
                continue
            contained[i][j] = variety_containment(si.equations, sj.equations, budget)
    edges = []
    for i in range(n):
        for j in range(n):
            if not contained[i][j]:
                continue
            if any(contained[i][k] and contained[k][j] for k in range(n)):
                continue
            edges.append((strata[i].label, strata[j].label))
    edges.sort()
    return edges


@dataclass(frozen=True)
class FrontierReport:
    pairs_checked: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def check_frontier(S: Stratification, budget: Budget | None = None) -> FrontierReport:
    """Exhaustive pairwise test of the order/closure equivalence.

    For every ordered stratum pair: point_less must coincide with closure
    containment; or-monotonicity must hold along the order; and a stratum
    meeting another's closure must lie inside it entirely.
    """
    violations = []
    strata = S.strata
    checked = 0
    for s1 in strata:
        for s2 in strata:
            checked += 1
            pl = point_less(s1, s2)
            cc = closure_contains(s1, s2, budget)
            if pl != cc:
                violations.append(
                    f"{s1.label} vs {s2.label}: point_less={pl} but containment={cc}")
            if pl and order_of(s1) < order_of(s2):
                violations.append(
                    f"{s1.label} < {s2.label} but or({s1.label})={order_of(s1)} "
                    f"< or({s2.label})={order_of(s2)}")
            if s1.label != s2.label and not cc:
                # frontier property: closure(s2) must miss s1 entirely
                meet = ideal_sum(s1.equations, s2.equations)
                if not is_unit_ideal(meet, budget):
                    separated = any(
                        radical_member(g, meet, budget) for g in s1.non_equations)
                    if not separated:
                        violations.append(
                            f"closure of {s2.label} meets {s1.label} partially")
    return FrontierReport(checked, tuple(sorted(violations)))
