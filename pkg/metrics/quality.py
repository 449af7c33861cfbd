"""Clustering-quality metrics: misclassification ratio and normalized cut."""

from __future__ import annotations

import itertools
import logging
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.optimize import linear_sum_assignment

from common.errors import DomainError
from graphcore.cuts import part_cuts_and_volumes
from graphcore.partition import UNASSIGNED, Partition
from graphcore.weighted_graph import WeightedGraph

LOGGER = logging.getLogger("sparsecluster.metrics")

EXHAUSTIVE_LIMIT = 8


class ErrReport(BaseModel):
    """Error under the best output-part to truth-part correspondence."""

    err: float = Field(..., ge=0.0, le=1.0)
    matching: Dict[int, int] = Field(default_factory=dict, description="output part -> truth part")
    misclassified_points: int
    misclassified_volume: Optional[float] = None
    volume_err: Optional[float] = None


def contingency_table(output: Partition, truth: Partition, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """``table[i, j]`` = (weighted) count of assigned nodes in output part i and truth part j."""
    both = (output.assignment != UNASSIGNED) & (truth.assignment != UNASSIGNED)
    flat = output.assignment[both] * truth.k + truth.assignment[both]
    w = None if weights is None else weights[both]
    counts = np.bincount(flat, weights=w, minlength=output.k * truth.k)
    return counts.reshape(output.k, truth.k).astype(np.float64)


def _square(table: np.ndarray) -> np.ndarray:
    size = max(table.shape)
    padded = np.zeros((size, size))
    padded[: table.shape[0], : table.shape[1]] = table
    return padded


def best_matching(table: np.ndarray) -> Tuple[Dict[int, int], float]:
    """Injective output->truth map maximising agreement.

    Exhaustive over permutations when both sides have at most ``EXHAUSTIVE_LIMIT``
    parts, maximum-weight bipartite matching otherwise.
    """
    rows, cols = table.shape
    padded = _square(table)
    size = padded.shape[0]
    if size <= EXHAUSTIVE_LIMIT:
        perms = np.array(list(itertools.permutations(range(size))), dtype=np.int64)
        scores = padded[np.arange(size)[None, :], perms].sum(axis=1)
        best = perms[int(np.argmax(scores))]
    else:
        _, best = linear_sum_assignment(padded, maximize=True)
    matching = {int(i): int(best[i]) for i in range(rows) if best[i] < cols}
    agreement = float(sum(table[i, j] for i, j in matching.items()))
    return matching, agreement


def misclassification_ratio(
    output: Partition,
    truth: Partition,
    g: Optional[WeightedGraph] = None,
) -> ErrReport:
    """Fraction of nodes outside their matched truth part; unassigned output nodes count as errors.

    With a graph the volume-weighted error under the same matching is reported too.
    """
    if output.n != truth.n:
        raise DomainError(f"output covers {output.n} nodes, truth covers {truth.n}")
    if g is not None and g.n != truth.n:
        raise DomainError(f"graph has {g.n} nodes, truth covers {truth.n}")
    n = truth.n
    if n == 0:
        return ErrReport(err=0.0, misclassified_points=0)

    matching, agreement = best_matching(contingency_table(output, truth))
    correct = int(round(agreement))
    report = ErrReport(
        err=min(max((n - correct) / n, 0.0), 1.0),
        matching=matching,
        misclassified_points=n - correct,
    )
    if g is not None:
        volume_table = contingency_table(output, truth, weights=g.degree)
        agreeing = sum(volume_table[i, j] for i, j in matching.items())
        total = g.volume()
        report.misclassified_volume = max(total - agreeing, 0.0)
        report.volume_err = report.misclassified_volume / total if total > 0 else 0.0
    return report


def ncut(g: WeightedGraph, p: Partition) -> float:
    """``sum_i w(A_i, V\\A_i) / vol(A_i)``."""
    cuts, volumes = part_cuts_and_volumes(g, p)
    if np.any(p.sizes() == 0):
        raise DomainError("every part must be nonempty")
    empty = np.flatnonzero(volumes <= 0.0)
    if empty.size:
        raise DomainError(f"part {int(empty[0])} has zero volume")
    return float((cuts / volumes).sum())
