"""Command-line front end.

Thin client over the analysis pipeline: subcommands parse arguments,
call the same functions the HTTP service exposes (or POST to a running
service with --server), print the report, and map outcomes to exit
codes: 0 clean, 1 violations or incomplete results, 2 input errors,
3 resource limits.
"""

from __future__ import annotations

import argparse
import sys

from .asymptotic import NotDominantError
from .groebner import ResourceLimitExceeded
from .parser import ParseError
from .report import (
    SCHEMA,
    RunConfig,
    asymptotic_section,
    canonical_json,
    map_section,
    partition_section,
    render_dot,
    render_text,
    run_analysis,
    run_tube_verify,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facons-kit",
        description="Asymptotic sets of dominant polynomial maps: facon "
                    "classification, stratification, Thom-Mather tube checks.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, tube=False):
        p.add_argument("file", help="map file (see README for the format)")
        p.add_argument("--weight-box", type=int, default=3, metavar="W",
                       help="half-width of the weight-vector search box (default 3)")
        p.add_argument("--order", choices=("lex", "grevlex"), default="grevlex",
                       help="monomial order for eliminations (default grevlex)")
        p.add_argument("--format", choices=("json", "dot", "text"), default="json",
                       dest="output_format", help="output format (default json)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for coverage sampling (default 0)")
        p.add_argument("--server", metavar="URL", default=None,
                       help="POST to a running facons-kit service instead of "
                            "computing locally")
        if tube:
            p.add_argument("--tol", type=float, default=1e-9,
                           help="commutation residual tolerance (default 1e-9)")
            p.add_argument("--samples", type=int, default=25,
                           help="sample points per stratum pair (default 25)")

    common(sub.add_parser("analyze", help="full pipeline: asymptotic set, facons, "
                                          "stratification, frontier check"))
    common(sub.add_parser("asymptotic-set", help="eliminants and components only"))
    common(sub.add_parser("facons", help="facon classification per arrangement cell"))
    common(sub.add_parser("tube-verify", help="two-strata Thom-Mather checks "
                                              "on every frontier edge"), tube=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", 1, 1) from exc


def _config_from(args) -> RunConfig:
    return RunConfig(
        input_path=args.file,
        subcommand=args.subcommand,
        weight_box=args.weight_box,
        order=args.order,
        tolerance=getattr(args, "tol", 1e-9),
        samples=getattr(args, "samples", 25),
        seed=args.seed,
        output_format=args.output_format,
    )


def _remote(args, config: RunConfig, text: str):
    import httpx

    endpoint = {"analyze": "/analyze", "asymptotic-set": "/asymptotic-set",
                "facons": "/facons", "tube-verify": "/tube-verify"}[args.subcommand]
    payload = {"map_text": text}
    if args.subcommand != "asymptotic-set":
        payload.update({"weight_box": config.weight_box, "order": config.order,
                        "seed": config.seed})
    if args.subcommand == "tube-verify":
        payload.update({"tolerance": config.tolerance, "samples": config.samples})
    resp = httpx.post(args.server.rstrip("/") + endpoint, json=payload, timeout=600.0)
    if resp.status_code == 422:
        print(f"error: {resp.json().get('detail', 'invalid input')}", file=sys.stderr)
        return None, EXIT_INPUT
    if resp.status_code == 503:
        print(f"error: {resp.json().get('detail', 'resource limit')}", file=sys.stderr)
        return None, EXIT_RESOURCE
    resp.raise_for_status()
    import json
    return json.loads(resp.text), None


def cmd_analyze(args) -> int:
    config = _config_from(args)
    text = _read_file(args.file)
    if args.server:
        report, err = _remote(args, config, text)
        if err is not None:
            return err
        exit_code = EXIT_OK if not report["frontier_check"]["violations"] \
            and not report["incomplete"] else EXIT_VIOLATIONS
        print(canonical_json(report), end="")
        return exit_code
    analysis = run_analysis(text, config)
    if config.output_format == "dot":
        sys.stdout.write(render_dot(analysis.stratification))
    elif config.output_format == "text":
        sys.stdout.write(render_text(analysis.report))
    else:
        sys.stdout.write(canonical_json(analysis.report))
    return EXIT_OK if analysis.ok else EXIT_VIOLATIONS


def cmd_asymptotic_set(args) -> int:
    config = _config_from(args)
    text = _read_file(args.file)
    if args.server:
        report, err = _remote(args, config, text)
        if err is not None:
            return err
        print(canonical_json(report), end="")
        return EXIT_OK
    from .asymptotic import asymptotic_set, check_dominant
    from .parser import parse_map

    doc, F = parse_map(text)
    if not check_dominant(F):
        raise NotDominantError("the map is not dominant (Jacobian determinant vanishes)")
    SF = asymptotic_set(F)
    report = {
        "schema": SCHEMA,
        "command": "asymptotic-set",
        "config": config.as_dict(),
        "map": map_section(doc, F),
        "dominant": True,
        "asymptotic_set": asymptotic_section(SF),
    }
    if config.output_format == "text":
        comps = ", ".join(report["asymptotic_set"]["components"]) or "(empty)"
        sys.stdout.write(f"asymptotic set components: {comps}\n")
    else:
        sys.stdout.write(canonical_json(report))
    return EXIT_OK


def cmd_facons(args) -> int:
    config = _config_from(args)
    text = _read_file(args.file)
    if args.server:
        report, err = _remote(args, config, text)
        if err is not None:
            return err
        print(canonical_json(report), end="")
        return EXIT_OK
    analysis = run_analysis(text, config)
    report = {
        "schema": SCHEMA,
        "command": "facons",
        "config": config.as_dict(),
        "map": map_section(analysis.doc, analysis.F),
        "asymptotic_set": asymptotic_section(analysis.SF),
        "partition": partition_section(analysis.partition),
    }
    if config.output_format == "text":
        for cell in report["partition"]:
            sys.stdout.write(
                f"{cell['cell']}: dim {cell['dim']}, "
                f"facons {', '.join(cell['facons']) or '(none found in box)'}\n")
    else:
        sys.stdout.write(canonical_json(report))
    incomplete = any(not c["complete"] for c in report["partition"])
    return EXIT_VIOLATIONS if incomplete else EXIT_OK


def cmd_tube_verify(args) -> int:
    config = _config_from(args)
    text = _read_file(args.file)
    if args.server:
        report, err = _remote(args, config, text)
        if err is not None:
            return err
        print(canonical_json(report), end="")
        return EXIT_VIOLATIONS if report["violations"] else EXIT_OK
    report = run_tube_verify(text, config)
    if config.output_format == "text":
        for p in report["pairs"]:
            sys.stdout.write(
                f"{p['lower']} -> {p['upper']}: pi {p['max_pi_residual']:.2e}, "
                f"rho {p['max_rho_residual']:.2e}, rank_ok {p['rank_ok']}, "
                f"{p['samples']} samples\n")
        for s in report["skipped"]:
            sys.stdout.write(
                f"skipped {s['lower']} -> {s['upper']}: {s['reason']}\n")
        cov = report["coverage"]
        sys.stdout.write(f"coverage: {cov['covered']}/{cov['trials']}\n")
    else:
        sys.stdout.write(canonical_json(report))
    for s in report["skipped"]:
        print(f"warning: skipped {s['lower']} -> {s['upper']}: {s['reason']}",
              file=sys.stderr)
    return EXIT_VIOLATIONS if report["violations"] else EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": cmd_analyze,
        "asymptotic-set": cmd_asymptotic_set,
        "facons": cmd_facons,
        "tube-verify": cmd_tube_verify,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.subcommand](args)
    except (ParseError, NotDominantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
