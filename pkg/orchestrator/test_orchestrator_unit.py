"""Unit tests for the benchmark orchestrator and the sparsecluster CLI."""

from __future__ import annotations

import json
import logging

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner
from pydantic import ValidationError

from common import settings
from common.errors import ClusteringError
from data_io import images as images_module
from data_io.points import read_points_csv
from graphcore.edge_list import read_edge_list
from graphcore.partition import read_labels
from orchestrator import orchestrator as bench_module
from orchestrator.cli import main
from orchestrator.orchestrator import (
    BENCH_COLUMNS,
    BenchCell,
    BenchOrchestrator,
    BenchRow,
    BenchSpec,
    build_dataset,
    plan_jobs,
    run_benchmark,
    summarize_runs,
)


@pytest.fixture
def broken_clustering(monkeypatch: pytest.MonkeyPatch) -> None:
    """Make every spectral clustering call fail so the failure path is exercised."""

    def _fail(*_args, **_kwargs):
        raise ClusteringError("k-means produced an empty cluster")

    monkeypatch.setattr(bench_module, "spectral_cluster", _fail)


# configuration


def test_bench_cell_defaults() -> None:
    assert BenchCell(dataset="twomoons", n=100, tau=0.8).bandwidth == 0.1
    assert BenchCell(dataset="twomoons", n=100, tau=0.8).clusters == 2
    assert BenchCell(dataset="gaussians", n=100, tau=1.6).clusters == 3
    assert BenchCell(dataset="image", n=100, tau="auto").bandwidth == 20.0
    assert BenchCell(dataset="cliques", n=30, tau=1.0, k=5).clusters == 5


@pytest.mark.parametrize(
    "payload",
    [
        {"dataset": "twomoons", "n": 1, "tau": 0.8},
        {"dataset": "moons", "n": 100, "tau": 0.8},
        {"dataset": "twomoons", "n": 100, "tau": "often"},
        {"dataset": "twomoons", "n": 100, "tau": 0.0},
        {"dataset": "twomoons", "n": 100, "tau": 0.8, "sigma": 0.0},
    ],
)
def test_bench_cell_validation(payload) -> None:
    with pytest.raises(ValidationError):
        BenchCell(**payload)


def test_bench_spec_needs_cells() -> None:
    with pytest.raises(ValidationError):
        BenchSpec(cells=[])
    assert BenchSpec(cells=[BenchCell(dataset="cliques", n=30, tau=1.0)]).runs == 5


def test_job_seeds_are_reproducible_and_distinct() -> None:
    spec = BenchSpec(cells=[BenchCell(dataset="cliques", n=30, tau=1.0)] * 2, runs=3, master_seed=11)
    seeds = [job[2] for job in plan_jobs(spec)]
    assert seeds == [job[2] for job in plan_jobs(spec)]
    assert len(set(seeds)) == 6
    other = BenchSpec(cells=spec.cells, runs=3, master_seed=12)
    assert seeds != [job[2] for job in plan_jobs(other)]


# datasets


def test_clique_dataset() -> None:
    g, truth = build_dataset(BenchCell(dataset="cliques", n=31, tau=1.0), seed=0)
    assert g.n == 30 and g.m == 3 * 45
    np.testing.assert_array_equal(truth.sizes(), [10, 10, 10])


def test_image_dataset_is_decoded_from_ppm(monkeypatch: pytest.MonkeyPatch) -> None:
    decoded = []
    decode = images_module.decode_netpbm

    def _recording_decode(data: bytes):
        decoded.append(data[:2])
        return decode(data)

    monkeypatch.setattr(images_module, "decode_netpbm", _recording_decode)
    g, truth = build_dataset(BenchCell(dataset="image", n=100, tau=1.0), seed=0)
    assert decoded == [b"P6"]
    assert g.n == truth.n == 100
    assert truth.k == 3


# orchestrator


def test_clique_cell_is_recovered_exactly() -> None:
    orchestrator = BenchOrchestrator()
    row = orchestrator.run_cell(BenchCell(dataset="cliques", n=60, tau=2.0), seed=3)
    assert row.status == "ok" and row.error is None
    assert row.err1 == 0.0 and row.err2 == 0.0
    assert row.ncut1 == pytest.approx(0.0) and row.ncut2 == pytest.approx(0.0)
    assert 0.0 < row.edge_fraction_percent <= 100.0
    assert row.words_exchanged > 0
    assert set(orchestrator.performance) == {"dataset", "spectral_g", "sparsify", "spectral_h"}


def test_auto_tau_cell_records_the_searched_tau() -> None:
    row = BenchOrchestrator().run_cell(BenchCell(dataset="cliques", n=90, tau="auto"), seed=1)
    assert row.status == "ok"
    assert row.tau is not None and row.tau >= 0.1
    assert row.err2 == 0.0


@pytest.mark.usefixtures("broken_clustering")
def test_failed_cell_is_recorded(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.ERROR, logger="sparsecluster.orchestrator"):
        row = BenchOrchestrator().run_cell(BenchCell(dataset="cliques", n=30, tau=1.0), seed=0, cell_index=4)
    assert row.status == "failed"
    assert row.error.startswith("ClusteringError")
    assert row.cell == 4 and row.err1 is None
    assert "failed" in caplog.text


def test_slow_stage_warns(monkeypatch: pytest.MonkeyPatch, caplog: pytest.LogCaptureFixture) -> None:
    monkeypatch.setattr(settings, "STAGE_WARN_MS", -1)
    with caplog.at_level(logging.WARNING, logger="sparsecluster.orchestrator"):
        BenchOrchestrator().run_cell(BenchCell(dataset="cliques", n=30, tau=1.0), seed=0)
    assert "Stage dataset exceeded" in caplog.text


def test_benchmark_writes_runs_summary_and_plot_script(tmp_path) -> None:
    spec = BenchSpec(
        cells=[BenchCell(dataset="cliques", n=30, tau=2.0), BenchCell(dataset="cliques", n=40, tau=2.0, k=2)],
        runs=2,
        threads=1,
    )
    rows = run_benchmark(spec, output_dir=tmp_path)
    assert len(rows) == 4 and all(row.status == "ok" for row in rows)

    runs = pd.read_csv(tmp_path / "bench_runs.csv")
    assert list(runs.columns) == BENCH_COLUMNS
    assert len(runs) == 4

    summary = pd.read_csv(tmp_path / "bench.csv")
    assert list(summary["cell"]) == [0, 1]
    assert list(summary["runs"]) == [2, 2] and list(summary["failed"]) == [0, 0]
    assert (summary["err2"] == 0.0).all()
    assert "bench.csv" in (tmp_path / "plot_bench.py").read_text(encoding="utf-8")


def test_summary_takes_medians_over_successful_runs() -> None:
    rows = [
        BenchRow(dataset="twomoons", n=10, tau=0.8, err1=0.1, err2=0.2, runtime_ms=5.0, seed=1),
        BenchRow(dataset="twomoons", n=10, tau=0.8, err1=0.3, err2=0.4, runtime_ms=7.0, seed=2),
        BenchRow(dataset="twomoons", n=10, tau=0.8, err1=0.5, err2=0.6, runtime_ms=9.0, seed=3),
        BenchRow(dataset="twomoons", n=10, status="failed", error="ConvergenceError: no", seed=4),
    ]
    summary = summarize_runs(rows)
    assert len(summary) == 1
    record = summary.iloc[0]
    assert record["err1"] == pytest.approx(0.3)
    assert record["err2"] == pytest.approx(0.4)
    assert record["runtime_ms"] == pytest.approx(7.0)
    assert record["runs"] == 4 and record["failed"] == 1


@pytest.mark.slow
def test_parallel_benchmark_matches_serial() -> None:
    cells = [BenchCell(dataset="cliques", n=60, tau=1.0), BenchCell(dataset="gaussians", n=150, tau=1.6)]
    serial = run_benchmark(BenchSpec(cells=cells, runs=2, threads=1))
    parallel = run_benchmark(BenchSpec(cells=cells, runs=2, threads=2))
    for one, other in zip(serial, parallel):
        assert (one.cell, one.seed, one.tau, one.edge_fraction_percent) == (
            other.cell,
            other.seed,
            other.tau,
            other.edge_fraction_percent,
        )
        assert one.err2 == other.err2


# benchmark quality at desk scale


def _median_rows(cell: BenchCell, runs: int = 5) -> pd.Series:
    rows = run_benchmark(BenchSpec(cells=[cell], runs=runs, threads=1))
    assert all(row.status == "ok" for row in rows)
    return summarize_runs(rows).iloc[0]


@pytest.mark.slow
@pytest.mark.parametrize("n", [1000, 2000])
def test_twomoons_quality_is_preserved(n: int) -> None:
    assert _median_rows(BenchCell(dataset="twomoons", n=n, tau=0.8))["err2"] <= 0.03


@pytest.mark.slow
def test_gaussians_quality_is_preserved() -> None:
    summary = _median_rows(BenchCell(dataset="gaussians", n=1000, tau=1.6))
    assert summary["err2"] <= 0.05


@pytest.mark.slow
def test_image_ncut_is_preserved() -> None:
    summary = _median_rows(BenchCell(dataset="image", n=1600, tau=1.6))
    assert summary["ncut2"] <= 1.25 * summary["ncut1"] + 1e-12


# command line


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def test_cli_pipeline_on_cliques(runner: CliRunner, tmp_path) -> None:
    graph, truth = tmp_path / "g.edges", tmp_path / "truth.csv"
    result = runner.invoke(main, ["--seed", "5", "gen", "--dataset", "cliques", "--n", "60", "--output", str(graph), "--truth", str(truth)])
    assert result.exit_code == 0, result.output
    g = read_edge_list(graph)
    assert (g.n, g.m) == (60, 3 * 190)

    sparse, stats = tmp_path / "h.edges", tmp_path / "stats.json"
    result = runner.invoke(main, ["sparsify", "--input", str(graph), "--tau", "2.0", "--seed", "1", "--output", str(sparse), "--stats", str(stats)])
    assert result.exit_code == 0, result.output
    record = json.loads(stats.read_text(encoding="utf-8"))
    assert record["n"] == 60 and record["m"] == 570 and record["seed"] == 1
    assert record["kept_edges"] == read_edge_list(sparse).m
    assert record["words_exchanged"] > 0

    labels = tmp_path / "labels.csv"
    result = runner.invoke(main, ["spectral", "--input", str(sparse), "--k", "3", "--allow-isolated", "--out", str(labels)])
    assert result.exit_code == 0, result.output
    assert read_labels(labels).n == 60

    result = runner.invoke(main, ["metrics", "--labels", str(labels), "--truth", str(truth), "--input", str(graph)])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["err"] == 0.0
    assert report["ncut"] == pytest.approx(0.0)


def test_cli_gen_writes_points_without_edge_list(runner: CliRunner, tmp_path) -> None:
    points, truth = tmp_path / "moons.csv", tmp_path / "moons.labels"
    result = runner.invoke(main, ["gen", "--dataset", "twomoons", "--n", "50", "--points", str(points), "--truth", str(truth)])
    assert result.exit_code == 0, result.output
    assert read_points_csv(points).points.shape == (50, 2)
    assert read_labels(truth).n == 50
    assert sorted(p.name for p in tmp_path.iterdir()) == ["moons.csv", "moons.labels"]


def test_cli_gen_needs_some_output(runner: CliRunner) -> None:
    result = runner.invoke(main, ["gen", "--dataset", "twomoons", "--n", "50"])
    assert result.exit_code == 2


def test_cli_sparsify_auto_records_trajectory(runner: CliRunner, tmp_path) -> None:
    graph, sparse, stats = tmp_path / "g.edges", tmp_path / "h.edges", tmp_path / "stats.json"
    runner.invoke(main, ["gen", "--dataset", "cliques", "--n", "60", "--k", "2", "--output", str(graph)])
    result = runner.invoke(main, ["sparsify", "--input", str(graph), "--tau", "auto", "--k", "2", "--output", str(sparse), "--stats", str(stats)])
    assert result.exit_code == 0, result.output
    record = json.loads(stats.read_text(encoding="utf-8"))
    assert record["trajectory"][0]["tau"] == pytest.approx(0.1)
    assert record["tau"] == record["trajectory"][-2]["tau"]


def test_cli_cluster_writes_labels_and_transcript(runner: CliRunner, tmp_path) -> None:
    graph, truth = tmp_path / "g.edges", tmp_path / "truth.csv"
    runner.invoke(main, ["gen", "--dataset", "cliques", "--n", "40", "--k", "2", "--output", str(graph), "--truth", str(truth)])
    labels, transcript = tmp_path / "labels.csv", tmp_path / "t.json"
    result = runner.invoke(
        main,
        [
            "cluster",
            "--input", str(graph),
            "--beta", "0.4",
            "--rounds", "6",
            "--seed-multiplier", "8",
            "--truth", str(truth),
            "--out", str(labels),
            "--transcript", str(transcript),
            "--check-invariants",
        ],
    )
    assert result.exit_code == 0, result.output
    assert labels.read_text(encoding="utf-8").startswith("node,label\n")
    record = json.loads(transcript.read_text(encoding="utf-8"))
    assert record["rounds"] == 6
    assert record["total_words"] == 6 * 2 * record["m"] * record["s"]
    assert record["words_per_round"] == [2 * record["m"] * record["s"]] * 6
    assert record["invariants"]["negative_entries"] == 0
    assert record["misclassified_volume"] is not None


def test_cli_bench_grid(runner: CliRunner, tmp_path) -> None:
    result = runner.invoke(
        main,
        ["--output-dir", str(tmp_path), "bench", "--dataset", "cliques", "--n", "30", "--tau", "1.0", "--tau", "auto", "--runs", "2"],
    )
    assert result.exit_code == 0, result.output
    summary = pd.read_csv(tmp_path / "bench.csv")
    assert len(summary) == 2


@pytest.mark.usefixtures("broken_clustering")
def test_cli_bench_fails_when_a_run_fails(runner: CliRunner, tmp_path) -> None:
    result = runner.invoke(main, ["--output-dir", str(tmp_path), "bench", "--dataset", "cliques", "--n", "30", "--tau", "1.0", "--runs", "1"])
    assert result.exit_code == 1
    assert (tmp_path / "bench_runs.csv").exists()


def test_cli_reports_domain_errors(runner: CliRunner, tmp_path) -> None:
    graph = tmp_path / "bad.edges"
    graph.write_text("3 1\n0 0 1.0\n", encoding="utf-8")
    result = runner.invoke(main, ["sparsify", "--input", str(graph), "--tau", "1.0", "--output", str(tmp_path / "h.edges")])
    assert result.exit_code == 1

    good = tmp_path / "g.edges"
    runner.invoke(main, ["gen", "--dataset", "cliques", "--n", "30", "--output", str(good)])
    result = runner.invoke(main, ["cluster", "--input", str(good), "--beta", "0.5", "--k", "3"])
    assert result.exit_code == 1


def test_cli_usage_errors(runner: CliRunner, tmp_path) -> None:
    graph = tmp_path / "g.edges"
    runner.invoke(main, ["gen", "--dataset", "cliques", "--n", "30", "--output", str(graph)])
    assert runner.invoke(main, ["sparsify", "--input", str(graph), "--tau", "auto", "--output", str(tmp_path / "h")]).exit_code == 2
    assert runner.invoke(main, ["sparsify", "--input", str(graph), "--tau", "lots", "--output", str(tmp_path / "h")]).exit_code == 2
    assert runner.invoke(main, ["cluster", "--input", str(graph), "--beta", "0.3", "--rounds", "few"]).exit_code == 2
    assert runner.invoke(main, ["bench", "--dataset", "cliques"]).exit_code == 2
