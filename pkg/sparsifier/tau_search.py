"""Choose tau by doubling until the spectral gap of the sparsifier settles."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List

from pydantic import BaseModel

from common.errors import TauSearchError
from graphcore.weighted_graph import WeightedGraph
from sparsifier.sampling import SparsifierOutput, SparsifyConfig, sparsify
from spectral.eigensolver import EigenMethod, estimate_gap

LOGGER = logging.getLogger("sparsecluster.sparsifier.tau")

START_TAU = 0.1
STABILITY_THRESHOLD = 0.1
MIN_GAP = 1e-8


class TauStep(BaseModel):
    tau: float
    gap: float
    kept_edges: int
    components: int


@dataclass
class TauSearchResult:
    tau: float
    gap: float
    h: WeightedGraph
    output: SparsifierOutput
    trajectory: List[TauStep] = field(default_factory=list)


def _gap_of(h: WeightedGraph, k: int, seed: int, method: EigenMethod) -> tuple[float, int]:
    components, _ = h.connected_components()
    if components > k:
        # lambda_{k+1} is 0 once H splits into more than k pieces.
        return 0.0, components
    return estimate_gap(h, k, seed=seed, method=method, isolated="kernel").gap, components


def relative_change(previous: float, current: float) -> float:
    if previous <= MIN_GAP:
        return float("inf")
    return abs(current - previous) / previous


def tau_doubling_search(
    g: WeightedGraph,
    k: int,
    seed: int = 0,
    start: float = START_TAU,
    threshold: float = STABILITY_THRESHOLD,
    method: EigenMethod = "auto",
) -> TauSearchResult:
    """Double tau from ``start``; return the first tau whose gap the next doubling keeps.

    The gap ``lambda_{k+1} - lambda_k`` is measured on one sparsifier per tau, all
    drawn with ``seed``. Raises ``TauSearchError`` once tau exceeds ``n``.
    """
    if k + 1 > g.n:
        raise TauSearchError(f"need k + 1 <= n, got k={k}, n={g.n}")
    trajectory: List[TauStep] = []
    tau = start
    output = sparsify(g, SparsifyConfig(tau=tau, seed=seed))
    gap, components = _gap_of(output.h, k, seed, method)
    trajectory.append(TauStep(tau=tau, gap=gap, kept_edges=output.kept_edges, components=components))
    while True:
        next_tau = 2.0 * tau
        if next_tau > g.n:
            raise TauSearchError(f"gap did not stabilise before tau exceeded n={g.n} (last gap {gap:.4g})")
        next_output = sparsify(g, SparsifyConfig(tau=next_tau, seed=seed))
        next_gap, next_components = _gap_of(next_output.h, k, seed, method)
        trajectory.append(
            TauStep(tau=next_tau, gap=next_gap, kept_edges=next_output.kept_edges, components=next_components)
        )
        change = relative_change(gap, next_gap)
        LOGGER.debug("tau %.4g -> %.4g: gap %.6g -> %.6g (change %.3g)", tau, next_tau, gap, next_gap, change)
        if change < threshold:
            LOGGER.info("Doubling search settled at tau=%.4g (gap %.6g, %d edges)", tau, gap, output.kept_edges)
            return TauSearchResult(tau=tau, gap=gap, h=output.h, output=output, trajectory=trajectory)
        tau, output, gap = next_tau, next_output, next_gap
