"""Benchmark orchestration and the command line."""

from orchestrator.orchestrator import (
    BenchCell,
    BenchOrchestrator,
    BenchRow,
    BenchSpec,
    build_dataset,
    run_benchmark,
    summarize_runs,
    write_bench_outputs,
)

__all__ = [
    "BenchCell",
    "BenchOrchestrator",
    "BenchRow",
    "BenchSpec",
    "build_dataset",
    "run_benchmark",
    "summarize_runs",
    "write_bench_outputs",
]
