"""Report assembly: canonical JSON, DOT and text renderings.

All output is deterministic: every set becomes a sorted list, JSON is
dumped with sorted keys, and nothing in a report depends on wall time
or interpreter hash seeds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .asymptotic import AsymptoticSet, NotDominantError, asymptotic_set, check_dominant
from .facons import CellAnalyzer
from .groebner import Budget
from .parser import MapDocument, parse_map
from .poly import PolynomialMap
from .strata import (
    Stratification,
    check_frontier,
    order_of,
    partition_by_facons,
    star_stratify,
)
from .tubes import (
    NoCurveError,
    PreconditionError,
    RaySolveError,
    TubeReport,
    coverage_check,
    verify_thom_mather,
)

SCHEMA = "facons-kit/1"


@dataclass(frozen=True)
class RunConfig:
    input_path: str = "-"
    subcommand: str = "analyze"
    weight_box: int = 3
    order: str = "grevlex"
    tolerance: float = 1e-9
    samples: int = 25
    seed: int = 0
    output_format: str = "json"

    def __post_init__(self):
        if self.weight_box < 1:
            raise ValueError("weight box must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.output_format not in ("json", "dot", "text"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.order not in ("lex", "grevlex"):
            raise ValueError(f"unknown monomial order {self.order!r}")

    def as_dict(self) -> dict:
        return {
            "weight_box": self.weight_box,
            "order": self.order,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "seed": self.seed,
            "format": self.output_format,
        }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _poly_strings(polys) -> list:
    return sorted(str(p) for p in polys)


def map_section(doc: MapDocument, F: PolynomialMap) -> dict:
    return {
        "source_vars": list(doc.source_vars),
        "target_vars": list(doc.target_vars),
        "components": [str(c) for c in F.components],
    }


def asymptotic_section(SF: AsymptoticSet) -> dict:
    return {
        "components": [str(c) for c in SF.components],
        "possibly_reducible": _poly_strings(SF.possibly_reducible),
        "per_coordinate": [
            {
                "i": ce.index,
                "eliminant": str(ce.eliminant),
                "phi0": str(ce.phi0),
                "degree": ce.degree,
                "contributes": not ce.phi0.is_constant(),
            }
            for ce in SF.per_coordinate
        ],
    }


def partition_section(partition) -> list:
    out = []
    for element in partition:
        out.append({
            "cell": element.cell.name,
            "dim": element.cell.dim,
            "equations": _poly_strings(element.cell.equations.generators),
            "non_equations": _poly_strings(element.cell.non_equations),
            "facons": sorted(f.label() for f in element.facons),
            "complete": element.complete,
        })
    out.sort(key=lambda d: (-d["dim"], d["cell"]))
    return out


def strata_section(S: Stratification) -> list:
    out = []
    for s in S.strata:
        witnesses = []
        for facon, w in s.witnesses:
            witnesses.append({
                "facon": facon.label(),
                "weights": list(w.weights),
                "uple": [list(pair) for pair in w.uple.degrees],
            })
        out.append({
            "label": s.label,
            "dim": s.dimension,
            "equations": _poly_strings(s.equations.generators),
            "non_equations": _poly_strings(s.non_equations),
            "facons": s.facon_labels(),
            "order": order_of(s),
            "flags": sorted(s.flags),
            "witnesses": witnesses,
        })
    return out


def filtration_section(S: Stratification) -> list:
    dims = sorted({s.dimension for s in S.strata}, reverse=True)
    return [
        {"dim": d, "strata": sorted(s.label for s in S.strata if s.dimension == d)}
        for d in dims
    ]


@dataclass
class AnalysisResult:
    doc: MapDocument
    F: PolynomialMap
    SF: AsymptoticSet
    partition: list
    stratification: Stratification
    frontier: object
    analyzer: CellAnalyzer
    report: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.frontier.violations and not self.stratification.incomplete


def run_analysis(text: str, config: RunConfig, budget: Budget | None = None) -> AnalysisResult:
    """parse -> dominance -> asymptotic set -> partition -> stratify -> frontier."""
    from .orders import by_name

    doc, F = parse_map(text)
    if not check_dominant(F):
        raise NotDominantError("the map is not dominant (Jacobian determinant vanishes)")
    SF = asymptotic_set(F, budget, by_name(config.order))
    analyzer = CellAnalyzer(F, config.weight_box, budget)
    partition = partition_by_facons(F, SF, config.weight_box, budget, analyzer)
    S = star_stratify(F, SF, config.weight_box, budget, analyzer)
    frontier = check_frontier(S, budget)
    report = {
        "schema": SCHEMA,
        "command": "analyze",
        "config": config.as_dict(),
        "map": map_section(doc, F),
        "dominant": True,
        "asymptotic_set": asymptotic_section(SF),
        "partition": partition_section(partition),
        "strata": strata_section(S),
        "frontier_edges": [list(e) for e in S.frontier_edges],
        "frontier_check": {
            "pairs_checked": frontier.pairs_checked,
            "violations": list(frontier.violations),
        },
        "incomplete": list(S.incomplete),
    }
    report["filtration"] = filtration_section(S)
    return AnalysisResult(doc, F, SF, partition, S, frontier, analyzer, report)


def run_tube_verify(text: str, config: RunConfig, budget: Budget | None = None) -> dict:
    """Pairwise two-strata verification over every frontier edge."""
    analysis = run_analysis(text, config, budget)
    S = analysis.stratification
    pairs = []
    skipped = []
    for low_label, up_label in S.frontier_edges:
        lower = S.by_label(low_label)
        upper = S.by_label(up_label)
        try:
            rep = verify_thom_mather(
                analysis.F, lower, upper, analysis.SF.components,
                samples=config.samples, budget=budget)
        except (PreconditionError, RaySolveError, NoCurveError) as exc:
            skipped.append({"lower": low_label, "upper": up_label, "reason": str(exc)})
            continue
        pairs.append({
            "lower": rep.lower,
            "upper": rep.upper,
            "max_pi_residual": rep.max_pi_residual,
            "max_rho_residual": rep.max_rho_residual,
            "rank_ok": rep.rank_ok,
            "samples": rep.samples,
            "rho_monotone": rep.rho_monotone,
            "rho_zero_on_stratum": rep.rho_zero_on_stratum,
            "min_epsilon": rep.min_epsilon,
            "violations": rep.violations(config.tolerance),
        })
    covered, details = coverage_check(
        analysis.F, analysis.SF.components, trials=20, seed=config.seed, budget=budget)
    report = {
        "schema": SCHEMA,
        "command": "tube-verify",
        "config": config.as_dict(),
        "map": map_section(analysis.doc, analysis.F),
        "pairs": pairs,
        "coverage": {"trials": 20, "covered": covered},
        "skipped": skipped,
        "violations": sorted(
            v for p in pairs for v in p["violations"]
        ),
    }
    return report


def render_dot(S: Stratification) -> str:
    """Frontier poset as a DOT digraph; deterministic node order."""
    lines = ["digraph stratification {"]
    for s in S.strata:
        facons = ", ".join(s.facon_labels())
        label = f"{s.label} | dim {s.dimension} | {facons}"
        lines.append(f'  "{s.label}" [label="{label}"];')
    for low, up in S.frontier_edges:
        lines.append(f'  "{low}" -> "{up}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_text(report: dict) -> str:
    lines = [f"map: {'; '.join(report['map']['components'])}"]
    lines.append(f"dominant: {report['dominant']}")
    lines.append("asymptotic set components: "
                 + (", ".join(report["asymptotic_set"]["components"]) or "(empty)"))
    lines.append("strata:")
    for s in report["strata"]:
        eqs = ", ".join(s["equations"]) or "0"
        opens = ", ".join(s["non_equations"])
        opens = f" minus {{{opens} = 0}}" if opens else ""
        lines.append(f"  {s['label']}: dim {s['dim']}, V({eqs}){opens}, "
                     f"facons {', '.join(s['facons'])}")
    lines.append("frontier edges: " + (", ".join(
        f"{a}->{b}" for a, b in report["frontier_edges"]) or "(none)"))
    v = report["frontier_check"]["violations"]
    lines.append(f"frontier check: {report['frontier_check']['pairs_checked']} pairs, "
                 f"{len(v)} violation(s)")
    for item in v:
        lines.append(f"  violation: {item}")
    if report["incomplete"]:
        lines.append("incomplete: " + "; ".join(report["incomplete"]))
    return "\n".join(lines) + "\n"
