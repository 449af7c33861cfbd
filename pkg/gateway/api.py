"""FastAPI gateway exposing sparsification, the distributed protocol and benchmark runs.

Sparsify and cluster requests are answered inline; benchmark grids run as
background tasks and are polled through ``/status/{run_id}``. Run state lives
in an in-memory registry guarded by a lock.
"""

from __future__ import annotations

import logging
import threading
import uuid
from datetime import datetime, timezone
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from fastapi import BackgroundTasks, FastAPI, HTTPException, status
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, PositiveFloat

from common import settings
from common.errors import DomainError, SparseClusterError
from common.logging_setup import configure_logging
from distsim.config import SimConfig
from distsim.protocol import run_protocol
from graphcore.partition import Partition
from graphcore.weighted_graph import WeightedGraph
from orchestrator.orchestrator import BenchSpec, rows_frame, run_benchmark, summarize_runs
from sparsifier.sampling import SparsifyConfig, sparsify
from sparsifier.tau_search import tau_doubling_search

configure_logging()
LOGGER = logging.getLogger("sparsecluster.gateway")

RunKind = Literal["sparsify", "cluster", "bench"]
RunState = Dict[str, Any]


class GraphPayload(BaseModel):
    """A weighted graph as ``n`` and a list of ``(u, v, w)`` edges."""

    n: int = Field(..., ge=0)
    edges: List[Tuple[int, int, float]] = Field(default_factory=list)

    def to_graph(self) -> WeightedGraph:
        return WeightedGraph.from_edges(self.n, self.edges)


class SparsifyRequest(BaseModel):
    graph: GraphPayload
    tau: Union[PositiveFloat, Literal["auto"]] = Field(..., description="Oversampling parameter or 'auto'.")
    k: Optional[int] = Field(None, ge=1, description="Clusters, required when tau is 'auto'.")
    seed: int = 0


class ClusterRequest(BaseModel):
    graph: GraphPayload
    config: SimConfig
    truth: Optional[List[int]] = Field(None, description="Ground-truth part per node, -1 for unassigned.")
    check_invariants: bool = False


app = FastAPI(
    title="sparsecluster gateway",
    version="1.0.0",
    description="REST interface for cluster-preserving sparsification and distributed clustering.",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.GATEWAY_CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

_LOCK = threading.Lock()
_RUNS: Dict[str, RunState] = {}


def _utc_now() -> str:
    return datetime.now(tz=timezone.utc).isoformat()


def _register_run(kind: RunKind, request: Dict[str, Any]) -> str:
    run_id = str(uuid.uuid4())
    run: RunState = {
        "run_id": run_id,
        "kind": kind,
        "status": "pending",
        "message": f"{kind} request accepted.",
        "created_at": _utc_now(),
        "updated_at": _utc_now(),
        "request": request,
        "results": None,
        "error": None,
    }
    with _LOCK:
        _RUNS[run_id] = run
    return run_id


def _update_run(run_id: str, **updates: Any) -> None:
    with _LOCK:
        if run_id not in _RUNS:
            raise KeyError(f"Unknown run_id: {run_id}")
        _RUNS[run_id].update(updates)
        _RUNS[run_id]["updated_at"] = _utc_now()


def _get_run(run_id: str) -> RunState:
    with _LOCK:
        run = _RUNS.get(run_id)
        snapshot = dict(run) if run is not None else None
    if snapshot is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Unknown run_id.")
    return snapshot


def _reject(run_id: str, exc: SparseClusterError) -> HTTPException:
    """Mark the run failed and turn the error into a response."""
    LOGGER.warning("Run %s rejected: %s", run_id, exc)
    _update_run(run_id, status="failed", message="Request rejected.", error=str(exc))
    code = status.HTTP_400_BAD_REQUEST if isinstance(exc, DomainError) else status.HTTP_422_UNPROCESSABLE_ENTITY
    return HTTPException(status_code=code, detail=str(exc))


@app.get("/health")
async def health_check() -> Dict[str, str]:
    return {"status": "ok"}


@app.post("/sparsify")
def sparsify_graph(request: SparsifyRequest) -> Dict[str, Any]:
    """Sample the sparsifier of the posted graph; ``tau='auto'`` runs the doubling search."""
    if request.tau == "auto" and request.k is None:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail="tau='auto' needs k.")
    run_id = _register_run("sparsify", request.model_dump(exclude={"graph"}))
    _update_run(run_id, status="running")
    try:
        g = request.graph.to_graph()
        trajectory = None
        if request.tau == "auto":
            search = tau_doubling_search(g, request.k, seed=request.seed)
            cfg = SparsifyConfig(tau=search.tau, seed=request.seed)
            output = search.output
            trajectory = [step.model_dump() for step in search.trajectory]
        else:
            cfg = SparsifyConfig(tau=request.tau, seed=request.seed)
            output = sparsify(g, cfg)
    except SparseClusterError as exc:
        raise _reject(run_id, exc) from exc
    results = {
        "stats": output.stats(cfg, g).model_dump(),
        "edges": [list(edge) for edge in output.h.edges()],
        "trajectory": trajectory,
    }
    _update_run(run_id, status="completed", message="Sparsifier sampled.", results=results)
    LOGGER.info("Run %s: kept %d of %d edges", run_id, output.kept_edges, g.m)
    return {"run_id": run_id, "status": "completed", **results}


@app.post("/cluster")
def cluster_graph(request: ClusterRequest) -> Dict[str, Any]:
    """Run seeding, averaging and the query on the posted graph."""
    run_id = _register_run("cluster", request.model_dump(exclude={"graph"}))
    _update_run(run_id, status="running")
    try:
        g = request.graph.to_graph()
        truth = Partition(request.truth) if request.truth is not None else None
        transcript = run_protocol(g, request.config, ground_truth=truth, check_invariants=request.check_invariants)
    except SparseClusterError as exc:
        raise _reject(run_id, exc) from exc
    results = transcript.model_dump()
    _update_run(run_id, status="completed", message="Protocol finished.", results=results)
    return {"run_id": run_id, "status": "completed", "transcript": results}


def _run_bench_async(run_id: str, spec: BenchSpec) -> None:
    LOGGER.info("Starting benchmark run %s with %d cells", run_id, len(spec.cells))
    _update_run(run_id, status="running", message="Benchmark in progress.")
    try:
        rows = run_benchmark(spec)
        summary = summarize_runs(rows)
        failed = int((rows_frame(rows)["status"] != "ok").sum())
        _update_run(
            run_id,
            status="completed",
            message=f"Benchmark finished, {failed} of {len(rows)} runs failed.",
            results={
                "rows": [row.model_dump() for row in rows],
                "summary": summary.astype(object).where(summary.notna(), None).to_dict(orient="records"),
                "failed_runs": failed,
            },
        )
    except Exception as exc:
        LOGGER.exception("Benchmark run %s failed: %s", run_id, exc)
        _update_run(run_id, status="failed", message="Benchmark failed.", error=str(exc))


@app.post("/bench", status_code=status.HTTP_202_ACCEPTED)
async def start_bench(spec: BenchSpec, background_tasks: BackgroundTasks) -> Dict[str, Any]:
    """Queue a benchmark grid and return its run identifier."""
    run_id = _register_run("bench", spec.model_dump())
    background_tasks.add_task(_run_bench_async, run_id, spec)
    return {
        "run_id": run_id,
        "status": "pending",
        "message": "Benchmark queued. Poll /status/{run_id} for updates.",
    }


@app.get("/status/{run_id}")
async def get_status(run_id: str) -> Dict[str, Any]:
    run = _get_run(run_id)
    return {key: run[key] for key in ("run_id", "kind", "status", "message", "created_at", "updated_at", "error")}


@app.get("/results/{run_id}")
async def get_results(run_id: str) -> Dict[str, Any]:
    run = _get_run(run_id)
    if run["status"] == "failed":
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=run.get("error") or "Run failed.")
    if run["status"] != "completed":
        raise HTTPException(
            status_code=status.HTTP_202_ACCEPTED,
            detail="Results not ready yet. Please poll /status until completed.",
        )
    return {"run_id": run_id, "kind": run["kind"], "status": run["status"], "results": run["results"]}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("gateway.api:app", host="0.0.0.0", port=settings.PORT)
