"""Degree-local edge sampling that keeps the cluster structure of a graph.

Every node ``u`` samples each incident edge with probability
``p_u(v) = min(w(u, v) * tau * log(n) / d_u, 1)``; an edge survives when either
endpoint samples it, and survivors are reweighted by ``1 / p_e`` so every edge
weight is preserved in expectation.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, computed_field

from common.errors import DomainError
from common.rng import keyed_uniforms
from graphcore.weighted_graph import WeightedGraph

LOGGER = logging.getLogger("sparsecluster.sparsifier")

# Endpoint ids of the two independent draws of an edge.
LOW_ENDPOINT = 0
HIGH_ENDPOINT = 1


class SparsifyConfig(BaseModel):
    tau: float = Field(..., gt=0, description="Oversampling parameter; log n is the natural logarithm.")
    seed: int = Field(0, description="Master seed of the per-edge random streams.")
    record_probabilities: bool = Field(False, description="Keep p_e of every edge for audit.")


class SparsifyStats(BaseModel):
    n: int
    m: int
    kept_edges: int
    prob_sum: float
    prob_variance: float
    words_exchanged: int
    runtime_ms: float
    tau: float
    seed: int

    @computed_field
    @property
    def expected_edge_budget(self) -> float:
        return self.prob_sum

    @computed_field
    @property
    def edge_fraction_percent(self) -> float:
        return 100.0 * self.kept_edges / self.m if self.m else 100.0


@dataclass(frozen=True)
class SparsifierOutput:
    """The sparsifier ``H`` plus sampling and communication counters."""

    h: WeightedGraph
    kept_edges: int
    words_exchanged: int
    prob_sum: float
    prob_variance: float
    runtime_ms: float
    kept_mask: np.ndarray
    per_edge_prob: Optional[np.ndarray] = None

    def stats(self, cfg: SparsifyConfig, original: WeightedGraph) -> SparsifyStats:
        return SparsifyStats(
            n=original.n,
            m=original.m,
            kept_edges=self.kept_edges,
            prob_sum=self.prob_sum,
            prob_variance=self.prob_variance,
            words_exchanged=self.words_exchanged,
            runtime_ms=self.runtime_ms,
            tau=cfg.tau,
            seed=cfg.seed,
        )


def log_factor(g: WeightedGraph, tau: float) -> float:
    """``tau * ln(n)``."""
    return tau * math.log(g.n) if g.n > 1 else 0.0


def sample_probability(g: WeightedGraph, u: int, v: int, cfg: SparsifyConfig) -> float:
    """``p_u(v)``: the probability that ``u`` samples its edge to ``v``."""
    w = g.weight(u, v)
    if w <= 0.0:
        raise DomainError(f"({u}, {v}) is not an edge")
    return min(w * log_factor(g, cfg.tau) / g.degree[u], 1.0)


def union_probability(p_uv: float, p_vu: float) -> float:
    """Probability that at least one of two independent endpoint draws succeeds."""
    for p in (p_uv, p_vu):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p} outside [0, 1]")
    return p_uv + p_vu - p_uv * p_vu


def endpoint_probabilities(g: WeightedGraph, cfg: SparsifyConfig | float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``p_u(v)``, ``p_v(u)`` and ``p_e`` for every canonical edge ``u < v``."""
    tau = cfg.tau if isinstance(cfg, SparsifyConfig) else float(cfg)
    factor = log_factor(g, tau)
    p_low = np.minimum(g.edge_w * factor / g.degree[g.edge_u], 1.0)
    p_high = np.minimum(g.edge_w * factor / g.degree[g.edge_v], 1.0)
    return p_low, p_high, p_low + p_high - p_low * p_high


def endpoint_draws(g: WeightedGraph, seed: int | np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Uniforms of the low and high endpoint of every edge, keyed by ``(seed, u, v, endpoint)``."""
    low = keyed_uniforms(seed, g.edge_u, g.edge_v, LOW_ENDPOINT)
    high = keyed_uniforms(seed, g.edge_u, g.edge_v, HIGH_ENDPOINT)
    return low, high


def kept_mask(g: WeightedGraph, tau: float, seed: int | np.ndarray) -> np.ndarray:
    """Which edges survive; ``seed`` may be an array column to draw many sparsifiers at once."""
    p_low, p_high, _ = endpoint_probabilities(g, tau)
    low, high = endpoint_draws(g, seed)
    # p == 1 always samples since uniforms lie in [0, 1).
    return (low < p_low) | (high < p_high)


def sparsify(g: WeightedGraph, cfg: SparsifyConfig) -> SparsifierOutput:
    """Sample and reweight; deterministic given ``cfg.seed``."""
    started = time.perf_counter()
    p_low, p_high, p_edge = endpoint_probabilities(g, cfg)
    low, high = endpoint_draws(g, cfg.seed)
    keep = (low < p_low) | (high < p_high)

    h = WeightedGraph(g.n, g.edge_u[keep], g.edge_v[keep], g.edge_w[keep] / p_edge[keep])
    kept = int(keep.sum())
    runtime_ms = (time.perf_counter() - started) * 1000.0
    keep.setflags(write=False)
    output = SparsifierOutput(
        h=h,
        kept_edges=kept,
        words_exchanged=kept,
        prob_sum=float(p_edge.sum()),
        prob_variance=float((p_edge * (1.0 - p_edge)).sum()),
        runtime_ms=runtime_ms,
        kept_mask=keep,
        per_edge_prob=p_edge if cfg.record_probabilities else None,
    )
    LOGGER.info(
        "Sparsified n=%d m=%d tau=%g: kept %d edges (%.2f%%), expected %.1f",
        g.n,
        g.m,
        cfg.tau,
        kept,
        100.0 * kept / g.m if g.m else 100.0,
        output.prob_sum,
    )
    return output
