"""
Floquet Invariants — REST Server
Serves the orchestrator over HTTP for notebooks and other tools.

Usage:
    python server.py                  # REST API on port 8080
    python server.py --port 9000 --cap 10
"""

import argparse
import logging
import os
import sys
from typing import List, Optional, Union

# ─── Add this dir to path for flat imports ───────────────────────────────
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from models import DEFAULT_SEED, GRID_POINTS, LENGTH_CAP, LOG_LEVEL, RANDOM_SAMPLES, TOLERANCE
from orchestrator import SpectralOrchestrator

logger = logging.getLogger(__name__)

# A potential is inline potential-file text, a file path, or a list of "p/q" / "re,im" strings
PotentialField = Optional[Union[List[str], str]]


# ══════════════════════════════════════════════════════════════════════════════
# REQUEST MODELS
# ══════════════════════════════════════════════════════════════════════════════

class GraphRequest(BaseModel):
    graph: str


class InvariantsRequest(BaseModel):
    graph: str
    max_n: Optional[int] = None
    potential: PotentialField = None
    indices: Optional[List[List[int]]] = None


class CyclesRequest(BaseModel):
    graph: str
    max_len: int = Field(4, ge=1)
    index: Optional[List[int]] = None
    base: bool = False


class IsospectralRequest(BaseModel):
    graph: str
    q1: PotentialField
    q2: PotentialField
    mode: str = "floquet"


class PendantPartnerRequest(BaseModel):
    potential: PotentialField


class VerifyTraceRequest(BaseModel):
    graph: str
    potential: PotentialField = None
    max_n: Optional[int] = None
    grid: Optional[int] = Field(None, ge=1)
    samples: Optional[int] = Field(None, ge=0)
    seed: Optional[int] = None
    tol: Optional[float] = Field(None, ge=0)


class ZdFourierRequest(BaseModel):
    periods: List[int]
    potential: PotentialField


# ══════════════════════════════════════════════════════════════════════════════
# APP
# ══════════════════════════════════════════════════════════════════════════════

def _checked(result: dict) -> dict:
    if not result.get("success"):
        raise HTTPException(status_code=400, detail=result.get("error"))
    return result


def create_app(orchestrator: Optional[SpectralOrchestrator] = None) -> FastAPI:
    """Create the FastAPI app around one orchestrator."""
    orch = orchestrator or SpectralOrchestrator()
    app = FastAPI(title="Floquet Invariants", version="1.0.0")

    @app.get("/api/health")
    async def api_health():
        return orch.status()

    @app.get("/api/builtins")
    async def api_builtins():
        return orch.list_builtins()

    @app.post("/api/inspect")
    def api_inspect(req: GraphRequest):
        return _checked(orch.inspect_graph(req.graph))

    @app.post("/api/invariants")
    def api_invariants(req: InvariantsRequest):
        return _checked(orch.compute_invariants(req.graph, req.max_n, potential=req.potential,
                                                indices=req.indices))

    @app.post("/api/cycles")
    def api_cycles(req: CyclesRequest):
        return _checked(orch.list_cycles(req.graph, req.max_len, index=req.index, base=req.base))

    @app.post("/api/isospectral")
    def api_isospectral(req: IsospectralRequest):
        return _checked(orch.check_isospectral(req.graph, req.q1, req.q2, req.mode))

    @app.post("/api/pendant-partner")
    def api_pendant_partner(req: PendantPartnerRequest):
        return _checked(orch.pendant_partner(req.potential))

    @app.post("/api/verify-trace")
    def api_verify_trace(req: VerifyTraceRequest):
        result = _checked(orch.verify_trace(req.graph, req.potential, max_n=req.max_n, grid=req.grid,
                                            samples=req.samples, seed=req.seed, tol=req.tol))
        return {k: v for k, v in result.items() if k != "report"}

    @app.post("/api/zd-fourier")
    def api_zd_fourier(req: ZdFourierRequest):
        return _checked(orch.zd_fourier(req.periods, req.potential))

    return app


# ══════════════════════════════════════════════════════════════════════════════
# MAIN
# ══════════════════════════════════════════════════════════════════════════════

def main():
    parser = argparse.ArgumentParser(description="Floquet Invariants Server")
    parser.add_argument("--port", type=int, default=8080, help="Port for the REST server")
    parser.add_argument("--host", type=str, default="0.0.0.0", help="Host to bind to")
    parser.add_argument("--cap", type=int, default=LENGTH_CAP, help="Cycle length / order cap")
    parser.add_argument("--tol", type=float, default=TOLERANCE, help="Trace-formula tolerance")
    parser.add_argument("--grid", type=int, default=GRID_POINTS)
    parser.add_argument("--samples", type=int, default=RANDOM_SAMPLES)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args()

    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    import uvicorn
    orch = SpectralOrchestrator(cap=args.cap, tolerance=args.tol, grid=args.grid,
                                samples=args.samples, seed=args.seed)
    app = create_app(orch)
    print(f"Starting Floquet Invariants server on http://{args.host}:{args.port}", file=sys.stderr)
    print(f"  REST API:  http://localhost:{args.port}/api/", file=sys.stderr)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
