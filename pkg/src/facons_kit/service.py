"""HTTP service wrapping the analysis pipeline.

Stateless compute endpoints: each request carries the map text plus
options and returns the same canonical JSON the CLI emits.  Responses
are serialized once (sorted keys) so identical requests produce
byte-identical bodies.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response
from pydantic import BaseModel, Field

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
    run_analysis,
    run_tube_verify,
)

app = FastAPI(title="facons-kit", version="0.1.0")


class AnalyzeRequest(BaseModel):
    map_text: str
    weight_box: int = Field(default=3, ge=1)
    order: str = "grevlex"
    seed: int = 0


class TubeVerifyRequest(BaseModel):
    map_text: str
    weight_box: int = Field(default=3, ge=1)
    order: str = "grevlex"
    tolerance: float = Field(default=1e-9, gt=0)
    samples: int = Field(default=25, ge=1)
    seed: int = 0


class MapRequest(BaseModel):
    map_text: str


def _json_response(report: dict) -> Response:
    return Response(content=canonical_json(report), media_type="application/json")


def _guard(fn):
    try:
        return fn()
    except (ParseError, NotDominantError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except ResourceLimitExceeded as exc:
        raise HTTPException(status_code=503, detail=str(exc)) from exc


@app.get("/health")
def health():
    return {"status": "ok", "schema": SCHEMA}


@app.post("/analyze")
def analyze(req: AnalyzeRequest) -> Response:
    def work():
        config = RunConfig(subcommand="analyze", weight_box=req.weight_box,
                           order=req.order, seed=req.seed)
        return _json_response(run_analysis(req.map_text, config).report)
    return _guard(work)


@app.post("/asymptotic-set")
def asymptotic(req: MapRequest) -> Response:
    def work():
        from .asymptotic import asymptotic_set, check_dominant
        from .parser import parse_map

        doc, F = parse_map(req.map_text)
        if not check_dominant(F):
            raise NotDominantError("the map is not dominant")
        SF = asymptotic_set(F)
        report = {
            "schema": SCHEMA,
            "command": "asymptotic-set",
            "map": map_section(doc, F),
            "dominant": True,
            "asymptotic_set": asymptotic_section(SF),
        }
        return _json_response(report)
    return _guard(work)


@app.post("/facons")
def facons(req: AnalyzeRequest) -> Response:
    def work():
        config = RunConfig(subcommand="facons", weight_box=req.weight_box,
                           order=req.order, seed=req.seed)
        analysis = run_analysis(req.map_text, config)
        report = {
            "schema": SCHEMA,
            "command": "facons",
            "config": config.as_dict(),
            "map": map_section(analysis.doc, analysis.F),
            "asymptotic_set": asymptotic_section(analysis.SF),
            "partition": partition_section(analysis.partition),
        }
        return _json_response(report)
    return _guard(work)


@app.post("/tube-verify")
def tube_verify(req: TubeVerifyRequest) -> Response:
    def work():
        config = RunConfig(subcommand="tube-verify", weight_box=req.weight_box,
                           order=req.order, tolerance=req.tolerance,
                           samples=req.samples, seed=req.seed)
        return _json_response(run_tube_verify(req.map_text, config))
    return _guard(work)
