"""``sparsecluster`` command line: datasets, sparsification, the protocol, spectral clustering and benchmarks."""

from __future__ import annotations

import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple

import click
from pydantic import ValidationError

from common import settings
from common.errors import SparseClusterError
from common.logging_setup import configure_logging
from data_io.images import image_to_points
from data_io.points import write_points_csv
from data_io.similarity import SimilarityConfig, build_similarity_graph
from distsim.config import SimConfig
from distsim.protocol import run_protocol_detailed
from graphcore.edge_list import read_edge_list, write_edge_list
from graphcore.partition import Partition, read_labels, write_labels
from metrics.quality import misclassification_ratio, ncut
from orchestrator.orchestrator import (
    BenchCell,
    BenchSpec,
    build_dataset,
    build_point_cloud,
    run_benchmark,
    summarize_runs,
)
from sparsifier.sampling import SparsifyConfig, sparsify
from sparsifier.tau_search import tau_doubling_search
from spectral.clustering import spectral_cluster_detailed
from spectral.eigensolver import write_embedding_csv, write_spectrum_csv

LOGGER = logging.getLogger("sparsecluster.cli")

DATASETS = click.Choice(["twomoons", "gaussians", "image", "cliques"])
EIGEN_METHODS = click.Choice(["auto", "dense", "subspace", "arpack"])


@contextmanager
def _reported_errors() -> Iterator[None]:
    """Log library errors and exit with status 1 instead of a traceback."""
    try:
        yield
    except (SparseClusterError, ValidationError) as exc:
        LOGGER.error("%s: %s", type(exc).__name__, exc)
        sys.exit(1)


def _seed(ctx: click.Context, seed: Optional[int]) -> int:
    return seed if seed is not None else ctx.obj["seed"]


def _write_json(payload: Dict[str, Any], path: Optional[Path]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        click.echo(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")


def _parse_tau(value: str) -> float | str:
    if value == "auto":
        return value
    try:
        return float(value)
    except ValueError as exc:
        raise click.BadParameter(f"expected a number or 'auto', got {value!r}") from exc


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed; subcommand --seed overrides it.")
@click.option("--threads", type=int, default=settings.THREADS, show_default=True, help="Worker processes for bench.")
@click.option(
    "--output-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=settings.OUTPUT_DIR,
    show_default=True,
    help="Where bench writes its CSV files.",
)
@click.option("--log-level", type=str, default=None, help="Overrides LOG_LEVEL.")
@click.pass_context
def main(ctx: click.Context, seed: int, threads: int, output_dir: Path, log_level: Optional[str]) -> None:
    """Cluster-preserving sparsification and distributed clustering."""
    configure_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, threads=threads, output_dir=output_dir)


@main.command()
@click.option("--dataset", type=DATASETS, required=True)
@click.option("--n", "size", type=int, required=True, help="Points, pixels or nodes.")
@click.option("--k", type=int, default=None, help="Clusters (dataset default when omitted).")
@click.option("--sigma", type=float, default=None, help="Kernel bandwidth (dataset default when omitted).")
@click.option("--seed", type=int, default=None)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Edge-list file.")
@click.option("--truth", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Ground-truth labels file.")
@click.option("--points", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Points CSV.")
@click.pass_context
def gen(
    ctx: click.Context,
    dataset: str,
    size: int,
    k: Optional[int],
    sigma: Optional[float],
    seed: Optional[int],
    output: Optional[Path],
    truth: Optional[Path],
    points: Optional[Path],
) -> None:
    """Generate a dataset: its graph, points and ground truth, whichever are asked for."""
    if output is None and truth is None and points is None:
        raise click.UsageError("give at least one of --output, --truth and --points")
    with _reported_errors():
        cell = BenchCell(dataset=dataset, n=size, tau=1.0, k=k, sigma=sigma)
        run_seed = _seed(ctx, seed)
        if output is not None or dataset == "cliques":
            g, partition = build_dataset(cell, run_seed)
            if output is not None:
                write_edge_list(g, output)
                LOGGER.info("Wrote %s graph with n=%d m=%d to %s", dataset, g.n, g.m, output)
        else:
            partition = build_point_cloud(cell, run_seed).truth
        if truth is not None:
            write_labels(partition, truth)
        if points is not None:
            write_points_csv(build_point_cloud(cell, run_seed), points)


@main.command("from-image")
@click.option("--image", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--sigma", type=float, default=20.0, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
def from_image(image: Path, sigma: float, output: Path) -> None:
    """Similarity graph of a PPM/PGM image, one node per pixel."""
    with _reported_errors():
        g = build_similarity_graph(image_to_points(image), SimilarityConfig(sigma=sigma))
        write_edge_list(g, output)
        LOGGER.info("Wrote image graph with n=%d m=%d to %s", g.n, g.m, output)


@main.command("sparsify")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--tau", type=str, required=True, help="Oversampling parameter or 'auto'.")
@click.option("--k", type=int, default=None, help="Clusters, required for --tau auto.")
@click.option("--seed", type=int, default=None)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--stats", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Stats JSON.")
@click.pass_context
def sparsify_command(
    ctx: click.Context,
    input_path: Path,
    tau: str,
    k: Optional[int],
    seed: Optional[int],
    output: Path,
    stats: Optional[Path],
) -> None:
    """Sample the cluster-preserving sparsifier H of a graph."""
    parsed = _parse_tau(tau)
    if parsed == "auto" and k is None:
        raise click.UsageError("--tau auto needs --k")
    with _reported_errors():
        g = read_edge_list(input_path)
        run_seed = _seed(ctx, seed)
        trajectory = None
        if parsed == "auto":
            search = tau_doubling_search(g, k, seed=run_seed)
            cfg = SparsifyConfig(tau=search.tau, seed=run_seed)
            result = search.output
            trajectory = [step.model_dump() for step in search.trajectory]
        else:
            cfg = SparsifyConfig(tau=parsed, seed=run_seed)
            result = sparsify(g, cfg)
        write_edge_list(result.h, output)
        if stats is not None:
            payload = result.stats(cfg, g).model_dump()
            if trajectory is not None:
                payload["trajectory"] = trajectory
            _write_json(payload, stats)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--beta", type=float, required=True, help="Lower bound on the cluster volume ratio.")
@click.option("--rounds", type=str, default="auto", show_default=True, help="Averaging rounds T or 'auto'.")
@click.option("--k", type=int, default=None, help="Clusters; sets T from lambda_{k+1} when rounds is auto.")
@click.option("--seed-multiplier", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--truth", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="node,label CSV.")
@click.option("--transcript", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--check-invariants/--no-check-invariants", default=False)
@click.option("--report-gap/--no-report-gap", default=False)
@click.pass_context
def cluster(
    ctx: click.Context,
    input_path: Path,
    beta: float,
    rounds: str,
    k: Optional[int],
    seed_multiplier: float,
    seed: Optional[int],
    truth: Optional[Path],
    out: Optional[Path],
    transcript: Optional[Path],
    check_invariants: bool,
    report_gap: bool,
) -> None:
    """Run the distributed protocol: seeding, averaging rounds and the query."""
    if rounds != "auto" and not rounds.isdigit():
        raise click.BadParameter(f"expected a positive integer or 'auto', got {rounds!r}", param_hint="--rounds")
    with _reported_errors():
        g = read_edge_list(input_path)
        cfg = SimConfig(
            beta=beta,
            k_hint=k,
            rounds=None if rounds == "auto" else int(rounds),
            seed_multiplier=seed_multiplier,
            seed=_seed(ctx, seed),
            report_gap=report_gap,
        )
        ground_truth = read_labels(truth) if truth is not None else None
        run = run_protocol_detailed(g, cfg, ground_truth=ground_truth, check_invariants=check_invariants)
        if out is not None:
            write_labels(run.labels.to_partition(), out, header="node,label")
        payload = run.transcript.model_dump()
        if out is not None:
            payload.pop("labels")
        _write_json(payload, transcript)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--k", type=int, required=True)
@click.option("--seed", type=int, default=None)
@click.option("--method", type=EIGEN_METHODS, default="auto", show_default=True)
@click.option("--allow-isolated/--no-allow-isolated", default=False, help="Give isolated nodes a kernel direction.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True, help="node,part CSV.")
@click.option("--spectrum", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--embedding", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_context
def spectral(
    ctx: click.Context,
    input_path: Path,
    k: int,
    seed: Optional[int],
    method: str,
    allow_isolated: bool,
    out: Path,
    spectrum: Optional[Path],
    embedding: Optional[Path],
) -> None:
    """Classical spectral clustering of a graph."""
    with _reported_errors():
        g = read_edge_list(input_path)
        result = spectral_cluster_detailed(
            g, k, seed=_seed(ctx, seed), method=method, isolated="kernel" if allow_isolated else "error"
        )
        write_labels(result.partition, out)
        if spectrum is not None:
            write_spectrum_csv(result.spectrum, spectrum)
        if embedding is not None:
            write_embedding_csv(result.embedding, embedding)


@main.command()
@click.option("--labels", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--truth", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
def metrics(labels: Path, truth: Optional[Path], input_path: Optional[Path]) -> None:
    """err against a ground truth and, given the graph, ncut and the volume error."""
    if truth is None and input_path is None:
        raise click.UsageError("give --truth, --input or both")
    with _reported_errors():
        output: Partition = read_labels(labels)
        g = read_edge_list(input_path) if input_path is not None else None
        payload: Dict[str, Any] = {}
        if truth is not None:
            payload.update(misclassification_ratio(output, read_labels(truth), g).model_dump())
        if g is not None:
            payload["ncut"] = ncut(g, output)
        _write_json(payload, None)


def _cells_from_options(
    datasets: Tuple[str, ...], sizes: Tuple[int, ...], taus: Tuple[str, ...]
) -> list[BenchCell]:
    return [
        BenchCell(dataset=dataset, n=size, tau=_parse_tau(tau))
        for dataset in datasets
        for size in sizes
        for tau in taus
    ]


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="BenchSpec JSON.")
@click.option("--dataset", "datasets", type=DATASETS, multiple=True)
@click.option("--n", "sizes", type=int, multiple=True)
@click.option("--tau", "taus", type=str, multiple=True)
@click.option("--runs", type=int, default=5, show_default=True, help="Seeds per cell.")
@click.option("--method", type=EIGEN_METHODS, default="auto", show_default=True)
@click.pass_context
def bench(
    ctx: click.Context,
    config: Optional[Path],
    datasets: Tuple[str, ...],
    sizes: Tuple[int, ...],
    taus: Tuple[str, ...],
    runs: int,
    method: str,
) -> None:
    """Spectral clustering on G versus on H over a dataset/size/tau grid."""
    with _reported_errors():
        if config is not None:
            spec = BenchSpec.model_validate_json(config.read_text(encoding="utf-8"))
        else:
            if not (datasets and sizes and taus):
                raise click.UsageError("give --config or all of --dataset, --n and --tau")
            spec = BenchSpec(
                cells=_cells_from_options(datasets, sizes, taus),
                runs=runs,
                master_seed=ctx.obj["seed"],
                threads=ctx.obj["threads"],
                eigen_method=method,
            )
        rows = run_benchmark(spec, output_dir=ctx.obj["output_dir"])
        click.echo(summarize_runs(rows).to_string(index=False))
        if any(row.status == "failed" for row in rows):
            LOGGER.error("Some benchmark runs failed; see %s", ctx.obj["output_dir"] / "bench_runs.csv")
            sys.exit(1)


if __name__ == "__main__":
    main()
