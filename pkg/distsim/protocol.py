"""Round-synchronous simulation of seeding, averaging and query.

Every node keeps one coordinate per active seed. In each round it sends those
coordinates to all neighbours and replaces its state by ``P x`` with
``P = I - L/2``, so a round over the whole graph is one application of the lazy
walk to the ``(n, s)`` state matrix.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from common.errors import DomainError, NoSeedsError
from common.rng import keyed_uniforms
from distsim.config import SimConfig, expected_seed_count
from graphcore.cuts import partition_max_conductance
from graphcore.partition import UNASSIGNED, Partition
from graphcore.weighted_graph import WeightedGraph
from spectral.eigensolver import bottom_eigenpairs
from spectral.laplacian import LaplacianOperator

LOGGER = logging.getLogger("sparsecluster.distsim")

SEEDING_KEY = 0x5EED
UNLABELED = UNASSIGNED
CONSERVATION_RTOL = 1e-10
NORM_SLACK = 1e-12


@dataclass(frozen=True)
class DiffusionState:
    """``vectors[:, i]`` is ``x^{(t, i)}``; column ``i`` belongs to ``seed_nodes[i]``."""

    vectors: np.ndarray
    seed_nodes: np.ndarray
    round: int
    rounds: int
    words: int = 0

    @property
    def s(self) -> int:
        return int(self.seed_nodes.size)


@dataclass(frozen=True)
class LabelAssignment:
    """Per-node seed index, ``UNLABELED`` where no vector passed the threshold."""

    labels: np.ndarray
    s: int

    @property
    def unlabeled_count(self) -> int:
        return int((self.labels == UNLABELED).sum())

    def to_partition(self) -> Partition:
        return Partition(self.labels, k=max(self.s, 1))


class InvariantReport(BaseModel):
    negative_entries: int = 0
    conservation_violations: int = 0
    norm_increases: int = 0

    @property
    def clean(self) -> bool:
        return self.negative_entries == 0 and self.conservation_violations == 0 and self.norm_increases == 0


class SimTranscript(BaseModel):
    config: Dict[str, object]
    n: int
    m: int
    rounds: int
    s: int
    seed_nodes: List[int]
    words_per_round: List[int]
    total_words: int
    labels: List[int]
    unlabeled_count: int
    misclassified_volume: Optional[float] = None
    misclassified_fraction: Optional[float] = None
    lambda_k_plus_1: Optional[float] = None
    upsilon_proxy: Optional[float] = None
    invariants: Optional[InvariantReport] = None
    runtime_ms: float = 0.0


@dataclass(frozen=True)
class ProtocolRun:
    transcript: SimTranscript
    state: DiffusionState
    labels: LabelAssignment


def _volume(g: WeightedGraph, cfg: SimConfig) -> float:
    return cfg.vol_estimate if cfg.vol_estimate is not None else g.volume()


def _lambda_next(g: WeightedGraph, k: int, seed: int) -> float:
    spectrum = bottom_eigenpairs(g, k + 1, seed=seed, isolated="kernel")
    return max(float(spectrum.eigenvalues[k]), 0.0)


def _resolve(g: WeightedGraph, cfg: SimConfig) -> Tuple[int, Optional[float]]:
    if cfg.rounds is not None:
        return cfg.rounds, None
    log_n = math.log(g.n) if g.n > 1 else 1.0
    if cfg.k_hint is not None and cfg.k_hint + 1 <= g.n:
        lam = _lambda_next(g, cfg.k_hint, cfg.seed)
        if lam > 0.0:
            return max(1, math.ceil(cfg.round_multiplier * log_n / lam)), lam
        LOGGER.warning("lambda_%d is 0; falling back to T = ceil(ln n)", cfg.k_hint + 1)
    return max(1, math.ceil(cfg.round_multiplier * log_n)), None


def resolve_rounds(g: WeightedGraph, cfg: SimConfig) -> int:
    """``cfg.rounds``, else ``ceil(c ln n / lambda_{k+1})`` with ``k_hint``, else ``ceil(c ln n)``."""
    return _resolve(g, cfg)[0]


def activation_probabilities(g: WeightedGraph, cfg: SimConfig) -> np.ndarray:
    """``min(s * d_v / vol(V), 1)`` per node."""
    return np.minimum(expected_seed_count(cfg) * g.degree / _volume(g, cfg), 1.0)


def activation_mask(g: WeightedGraph, cfg: SimConfig, seed: int | np.ndarray | None = None) -> np.ndarray:
    """Which nodes turn active; ``seed`` may be an array column to draw many rounds of seeding at once."""
    draws = keyed_uniforms(cfg.seed if seed is None else seed, np.arange(g.n), SEEDING_KEY)
    return draws < activation_probabilities(g, cfg)


def seeding(g: WeightedGraph, cfg: SimConfig, rounds: Optional[int] = None) -> DiffusionState:
    """Activate nodes and start one state vector ``chi_v`` (``1/sqrt(d_v)`` at ``v``) per active node."""
    active = np.flatnonzero(activation_mask(g, cfg))
    if active.size == 0:
        raise NoSeedsError(f"no node became active (seed={cfg.seed}); retry with another seed")
    vectors = np.zeros((g.n, active.size))
    vectors[active, np.arange(active.size)] = 1.0 / np.sqrt(g.degree[active])
    target = rounds if rounds is not None else resolve_rounds(g, cfg)
    LOGGER.info("Seeding activated %d nodes (expected %d), %d rounds planned", active.size, expected_seed_count(cfg), target)
    return DiffusionState(vectors=vectors, seed_nodes=active, round=0, rounds=target)


def averaging_round(
    g: WeightedGraph,
    st: DiffusionState,
    op: Optional[LaplacianOperator] = None,
) -> DiffusionState:
    """One synchronous round: every node averages with its neighbours' previous-round values."""
    if st.round >= st.rounds:
        raise DomainError(f"all {st.rounds} rounds already done")
    op = op if op is not None else LaplacianOperator(g, isolated="kernel")
    return replace(
        st,
        vectors=op.lazy_walk(st.vectors),
        round=st.round + 1,
        words=st.words + words_per_round(g, st.s),
    )


def words_per_round(g: WeightedGraph, s: int) -> int:
    """Every node sends its ``s`` coordinates over each incident edge, both directions."""
    return 2 * g.m * s


def query_labels(g: WeightedGraph, st: DiffusionState, cfg: SimConfig) -> LabelAssignment:
    """Smallest ``i`` with ``x_i(v) >= sqrt(d_v) / (2 beta vol(V))``; unlabeled when none qualifies."""
    if st.round != st.rounds:
        raise DomainError(f"query after round {st.round} of {st.rounds}")
    threshold = np.sqrt(g.degree) / (2.0 * cfg.beta * _volume(g, cfg))
    qualifies = (st.vectors >= threshold[:, None]) & (g.degree > 0)[:, None]
    labels = np.where(qualifies.any(axis=1), qualifies.argmax(axis=1), UNLABELED)
    return LabelAssignment(labels=labels.astype(np.int64), s=st.s)


def misclassified_volume(g: WeightedGraph, labels: LabelAssignment, truth: Partition) -> float:
    """Volume of nodes whose label does not belong to their cluster.

    Each label belongs to the one cluster holding most of its volume (ties go to
    the lower cluster index), so several seeds may share a cluster but no label
    serves two clusters. Unlabeled nodes always count.
    """
    if truth.n != g.n or labels.labels.size != g.n:
        raise DomainError("labels, truth and graph must cover the same nodes")
    parts = truth.assignment
    assigned = parts != UNASSIGNED
    labeled = assigned & (labels.labels != UNLABELED)
    volume = np.zeros((max(labels.s, 1), truth.k))
    np.add.at(volume, (labels.labels[labeled], parts[labeled]), g.degree[labeled])
    owner = volume.argmax(axis=1)
    correct = np.zeros(g.n, dtype=bool)
    correct[labeled] = owner[labels.labels[labeled]] == parts[labeled]
    return float(g.degree[assigned & ~correct].sum())


def _conserved(g: WeightedGraph, vectors: np.ndarray) -> np.ndarray:
    return np.sqrt(g.degree) @ vectors


def run_protocol_detailed(
    g: WeightedGraph,
    cfg: SimConfig,
    ground_truth: Optional[Partition] = None,
    check_invariants: bool = False,
) -> ProtocolRun:
    started = time.perf_counter()
    rounds, lam = _resolve(g, cfg)
    op = LaplacianOperator(g, isolated="kernel")
    st = seeding(g, cfg, rounds=rounds)

    report = InvariantReport() if check_invariants else None
    mass = _conserved(g, st.vectors)
    norms = np.linalg.norm(st.vectors, axis=0)
    per_round: List[int] = []
    while st.round < st.rounds:
        st = averaging_round(g, st, op)
        per_round.append(words_per_round(g, st.s))
        if report is not None:
            report.negative_entries += int((st.vectors < 0.0).sum())
            drift = np.abs(_conserved(g, st.vectors) - mass)
            report.conservation_violations += int((drift > CONSERVATION_RTOL * np.abs(mass)).sum())
            current = np.linalg.norm(st.vectors, axis=0)
            report.norm_increases += int((current > norms * (1.0 + NORM_SLACK)).sum())
            norms = current
    labels = query_labels(g, st, cfg)

    misvol = fraction = upsilon = None
    if ground_truth is not None:
        misvol = misclassified_volume(g, labels, ground_truth)
        fraction = misvol / g.volume()
        if cfg.report_gap and ground_truth.k + 1 <= g.n:
            lam = lam if lam is not None and cfg.k_hint == ground_truth.k else _lambda_next(g, ground_truth.k, cfg.seed)
            rho = partition_max_conductance(g, ground_truth)
            upsilon = lam / rho if rho > 0 else float("inf")
    if report is not None and not report.clean:
        LOGGER.warning("Invariant monitor flagged %s", report.model_dump())

    transcript = SimTranscript(
        config=cfg.model_dump(),
        n=g.n,
        m=g.m,
        rounds=st.rounds,
        s=st.s,
        seed_nodes=st.seed_nodes.tolist(),
        words_per_round=per_round,
        total_words=st.words,
        labels=labels.labels.tolist(),
        unlabeled_count=labels.unlabeled_count,
        misclassified_volume=misvol,
        misclassified_fraction=fraction,
        lambda_k_plus_1=lam if cfg.report_gap else None,
        upsilon_proxy=upsilon,
        invariants=report,
        runtime_ms=(time.perf_counter() - started) * 1000.0,
    )
    LOGGER.info(
        "Protocol finished: s=%d T=%d words=%d unlabeled=%d misclassified=%s",
        st.s,
        st.rounds,
        st.words,
        labels.unlabeled_count,
        "n/a" if fraction is None else f"{fraction:.4%}",
    )
    return ProtocolRun(transcript=transcript, state=st, labels=labels)


def run_protocol(
    g: WeightedGraph,
    cfg: SimConfig,
    ground_truth: Optional[Partition] = None,
    check_invariants: bool = False,
) -> SimTranscript:
    """Seeding, ``T`` averaging rounds and the query step, with word accounting."""
    return run_protocol_detailed(g, cfg, ground_truth, check_invariants).transcript
