"""Benchmark orchestration: spectral clustering on G versus on its sparsifier H.

Each benchmark cell names a dataset, a size and a tau. For every repetition the
orchestrator runs four stages in sequence (dataset, spectral on G, sparsify,
spectral on H), times each one and folds the results into a ``BenchRow``.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, List, Literal, Optional, Tuple, Union

import pandas as pd
from pydantic import BaseModel, Field, PositiveFloat

from common import settings
from common.errors import DomainError
from common.rng import derive_seed
from data_io.graphs import block_partition, disjoint_cliques
from data_io.images import encode_ppm, gen_segmented_image, image_to_points
from data_io.points import PointCloud, gen_gaussians, gen_twomoons
from data_io.similarity import SimilarityConfig, build_similarity_graph
from graphcore.partition import Partition
from graphcore.weighted_graph import WeightedGraph
from metrics.quality import misclassification_ratio, ncut
from sparsifier.sampling import SparsifyConfig, sparsify
from sparsifier.tau_search import tau_doubling_search
from spectral.clustering import spectral_cluster
from spectral.eigensolver import EigenMethod

LOGGER = logging.getLogger("sparsecluster.orchestrator")

DatasetKind = Literal["twomoons", "gaussians", "image", "cliques"]

DEFAULT_SIGMA: Dict[str, float] = {"twomoons": 0.1, "gaussians": 1.0, "image": 20.0}
DEFAULT_K: Dict[str, int] = {"twomoons": 2, "gaussians": 3, "image": 3, "cliques": 3}

BENCH_COLUMNS = [
    "dataset",
    "n",
    "tau",
    "edge_fraction_percent",
    "err1",
    "err2",
    "ncut1",
    "ncut2",
    "words_exchanged",
    "runtime_ms",
    "seed",
    "status",
    "error",
    "cell",
]
MEDIAN_COLUMNS = ["tau", "edge_fraction_percent", "err1", "err2", "ncut1", "ncut2", "words_exchanged", "runtime_ms"]
SUMMARY_COLUMNS = ["dataset", "n", *MEDIAN_COLUMNS, "runs", "failed", "cell"]


class BenchCell(BaseModel):
    dataset: DatasetKind
    n: int = Field(..., ge=2, description="Points (twomoons, gaussians), pixels (image) or nodes (cliques).")
    tau: Union[PositiveFloat, Literal["auto"]] = Field(..., description="Sparsifier tau, or 'auto' for the doubling search.")
    k: Optional[int] = Field(None, ge=2)
    sigma: Optional[float] = Field(None, gt=0)

    @property
    def clusters(self) -> int:
        return self.k if self.k is not None else DEFAULT_K[self.dataset]

    @property
    def bandwidth(self) -> Optional[float]:
        return self.sigma if self.sigma is not None else DEFAULT_SIGMA.get(self.dataset)


class BenchSpec(BaseModel):
    cells: List[BenchCell] = Field(..., min_length=1)
    runs: int = Field(5, ge=1, description="Repetitions per cell; the summary reports medians.")
    master_seed: int = 0
    threads: int = Field(default_factory=lambda: settings.THREADS, ge=1)
    eigen_method: EigenMethod = "auto"


class BenchRow(BaseModel):
    dataset: str
    n: int
    tau: Optional[float] = None
    edge_fraction_percent: Optional[float] = None
    err1: Optional[float] = None
    err2: Optional[float] = None
    ncut1: Optional[float] = None
    ncut2: Optional[float] = None
    words_exchanged: Optional[int] = None
    runtime_ms: float = 0.0
    seed: int = 0
    status: Literal["ok", "failed"] = "ok"
    error: Optional[str] = None
    cell: int = 0


def build_point_cloud(cell: BenchCell, seed: int) -> PointCloud:
    """The labelled point cloud behind a twomoons, gaussians or image cell.

    Image cells go through a binary PPM encoding and back, as a photograph would.
    """
    if cell.dataset == "twomoons":
        return gen_twomoons(cell.n, seed=seed)
    if cell.dataset == "gaussians":
        return gen_gaussians(cell.n, seed=seed)
    if cell.dataset == "image":
        side = max(cell.clusters, math.isqrt(cell.n))
        pixels, truth = gen_segmented_image(side, side, k=cell.clusters, seed=seed)
        return PointCloud(image_to_points(encode_ppm(pixels)).points, truth)
    raise DomainError(f"dataset {cell.dataset!r} has no point cloud")


def build_dataset(cell: BenchCell, seed: int) -> Tuple[WeightedGraph, Partition]:
    """The graph of a benchmark cell and its ground-truth partition."""
    if cell.dataset == "cliques":
        k = cell.clusters
        size = max(2, cell.n // k)
        return disjoint_cliques(k, size), block_partition([size] * k)
    pc = build_point_cloud(cell, seed)
    return build_similarity_graph(pc, SimilarityConfig(sigma=cell.bandwidth)), pc.truth


class BenchOrchestrator:
    """Runs one benchmark cell at a time, recording how long every stage takes."""

    def __init__(self, eigen_method: EigenMethod = "auto") -> None:
        self.eigen_method = eigen_method
        self._performance: Dict[str, Dict[str, Any]] = {}

    @property
    def performance(self) -> Dict[str, Dict[str, Any]]:
        return dict(self._performance)

    def run_cell(self, cell: BenchCell, seed: int, cell_index: int = 0) -> BenchRow:
        """One repetition of a cell; failures become a ``status="failed"`` row."""
        self._performance = {}
        started = time.perf_counter()
        row = BenchRow(dataset=cell.dataset, n=cell.n, seed=seed, cell=cell_index)
        k = cell.clusters
        try:
            with self._stage("dataset"):
                g, truth = build_dataset(cell, seed)
            row.n = g.n

            with self._stage("spectral_g"):
                on_g = spectral_cluster(g, k, seed=seed, method=self.eigen_method)
            row.err1 = misclassification_ratio(on_g, truth).err
            row.ncut1 = ncut(g, on_g)

            with self._stage("sparsify"):
                if cell.tau == "auto":
                    search = tau_doubling_search(g, k, seed=seed, method=self.eigen_method)
                    tau, output = search.tau, search.output
                else:
                    tau = float(cell.tau)
                    output = sparsify(g, SparsifyConfig(tau=tau, seed=seed))
            row.tau = tau
            row.edge_fraction_percent = 100.0 * output.kept_edges / g.m if g.m else 100.0
            row.words_exchanged = output.words_exchanged

            with self._stage("spectral_h"):
                on_h = spectral_cluster(output.h, k, seed=seed, method=self.eigen_method, isolated="kernel")
            row.err2 = misclassification_ratio(on_h, truth).err
            # Both cuts are measured in G.
            row.ncut2 = ncut(g, on_h)
        except Exception as exc:
            LOGGER.exception("Benchmark cell %d (%s, n=%d, seed=%d) failed", cell_index, cell.dataset, cell.n, seed)
            row.status = "failed"
            row.error = f"{type(exc).__name__}: {exc}"
        row.runtime_ms = (time.perf_counter() - started) * 1000.0
        LOGGER.info(
            "Cell %d %s n=%d tau=%s: edges %.2f%% err %s -> %s (%s)",
            cell_index,
            cell.dataset,
            row.n,
            row.tau,
            row.edge_fraction_percent or 0.0,
            row.err1,
            row.err2,
            row.status,
        )
        LOGGER.debug("Stage timings: %s", self._performance)
        return row

    @contextmanager
    def _stage(self, stage: str) -> Iterator[None]:
        start_time = time.perf_counter()
        try:
            yield
        finally:
            self._record_performance(stage, time.perf_counter() - start_time)

    def _record_performance(self, stage: str, duration_seconds: float) -> None:
        duration_ms = int(duration_seconds * 1000)
        if duration_ms > settings.STAGE_WARN_MS:
            LOGGER.warning("Stage %s exceeded %dms (duration_ms=%d).", stage, settings.STAGE_WARN_MS, duration_ms)
        self._performance[stage] = {
            "duration_ms": duration_ms,
            "completed_at": datetime.now(tz=timezone.utc).isoformat(),
        }


def _run_job(job: Tuple[BenchCell, int, int, EigenMethod]) -> BenchRow:
    cell, cell_index, seed, method = job
    return BenchOrchestrator(method).run_cell(cell, seed, cell_index)


def plan_jobs(spec: BenchSpec) -> List[Tuple[BenchCell, int, int, EigenMethod]]:
    """Every (cell, repetition) with its own seed derived from the master seed."""
    return [
        (cell, index, derive_seed(spec.master_seed, index, repetition), spec.eigen_method)
        for index, cell in enumerate(spec.cells)
        for repetition in range(spec.runs)
    ]


def run_benchmark(spec: BenchSpec, output_dir: Optional[Path] = None) -> List[BenchRow]:
    """Run all cells (in ``spec.threads`` processes) and optionally write the CSV outputs."""
    jobs = plan_jobs(spec)
    LOGGER.info("Running %d benchmark jobs over %d cells with %d worker(s)", len(jobs), len(spec.cells), spec.threads)
    if spec.threads > 1:
        with ProcessPoolExecutor(max_workers=spec.threads) as pool:
            rows = list(pool.map(_run_job, jobs))
    else:
        rows = [_run_job(job) for job in jobs]
    if output_dir is not None:
        write_bench_outputs(rows, output_dir)
    failed = sum(row.status == "failed" for row in rows)
    if failed:
        LOGGER.warning("%d of %d benchmark runs failed", failed, len(rows))
    return rows


def rows_frame(rows: List[BenchRow]) -> pd.DataFrame:
    return pd.DataFrame.from_records([row.model_dump() for row in rows], columns=BENCH_COLUMNS)


def summarize_runs(rows: List[BenchRow]) -> pd.DataFrame:
    """Median of every metric per cell over its successful runs."""
    frame = rows_frame(rows)
    records = []
    for cell, group in frame.groupby("cell", sort=True):
        ok = group[group["status"] == "ok"]
        record: Dict[str, Any] = {"dataset": group["dataset"].iloc[0], "n": int(group["n"].iloc[0])}
        for column in MEDIAN_COLUMNS:
            record[column] = pd.to_numeric(ok[column], errors="coerce").median() if len(ok) else float("nan")
        record["runs"] = len(group)
        record["failed"] = int((group["status"] != "ok").sum())
        record["cell"] = int(cell)
        records.append(record)
    return pd.DataFrame.from_records(records, columns=SUMMARY_COLUMNS)


PLOT_SCRIPT = '''"""Plot bench.csv: clustering error on G and on the sparsifier against edge fraction."""

from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

HERE = Path(__file__).resolve().parent
summary = pd.read_csv(HERE / "bench.csv")

for dataset, group in summary.groupby("dataset"):
    group = group.sort_values("edge_fraction_percent")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    metric = "err" if group["err1"].notna().any() else "ncut"
    ax.plot(group["edge_fraction_percent"], group[f"{metric}1"], "o--", label=f"{metric} on G")
    ax.plot(group["edge_fraction_percent"], group[f"{metric}2"], "s-", label=f"{metric} on H")
    ax.set_xlabel("edges kept (%)")
    ax.set_ylabel(metric)
    ax.set_title(f"{dataset}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(HERE / f"bench_{dataset}.png", dpi=150)
    plt.close(fig)
'''


def write_bench_outputs(rows: List[BenchRow], output_dir: Path) -> Dict[str, Path]:
    """``bench_runs.csv`` (every run), ``bench.csv`` (medians) and ``plot_bench.py``."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "runs": output_dir / "bench_runs.csv",
        "summary": output_dir / "bench.csv",
        "plot": output_dir / "plot_bench.py",
    }
    rows_frame(rows).to_csv(paths["runs"], index=False)
    summarize_runs(rows).to_csv(paths["summary"], index=False)
    paths["plot"].write_text(PLOT_SCRIPT, encoding="utf-8")
    LOGGER.info("Benchmark outputs written to %s", output_dir)
    return paths
