"""Synthetic graph families with a known cluster structure."""

from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple

import numpy as np

from common.errors import DomainError
from common.rng import stream
from graphcore.partition import Partition
from graphcore.weighted_graph import WeightedGraph


def _clique_arrays(k: int, size: int) -> Tuple[np.ndarray, np.ndarray]:
    a, b = np.triu_indices(size, k=1)
    offsets = np.repeat(np.arange(k) * size, a.size)
    return np.tile(a, k) + offsets, np.tile(b, k) + offsets


def disjoint_cliques(k: int, size: int, weight: float = 1.0) -> WeightedGraph:
    """``k`` disjoint copies of ``K_size``."""
    if k < 1 or size < 2:
        raise DomainError("need k >= 1 cliques of size >= 2")
    u, v = _clique_arrays(k, size)
    return WeightedGraph.from_arrays(k * size, u, v, np.full(u.size, weight))


def cliques_with_bridges(k: int, size: int, bridges: int = 1, weight: float = 1.0) -> WeightedGraph:
    """``k`` cliques in a chain; consecutive cliques share ``bridges`` unit edges.

    Bridge ``b`` between clique ``i`` and ``i+1`` joins their ``b``-th nodes, so the
    two-clique, one-bridge case is the classic dumbbell.
    """
    if bridges > size:
        raise DomainError("at most `size` bridges between two cliques")
    u, v = _clique_arrays(k, size)
    bridge_u: List[int] = []
    bridge_v: List[int] = []
    for i, b in itertools.product(range(k - 1), range(bridges)):
        bridge_u.append(i * size + b)
        bridge_v.append((i + 1) * size + b)
    return WeightedGraph.from_arrays(
        k * size,
        np.concatenate([u, bridge_u]),
        np.concatenate([v, bridge_v]),
        np.concatenate([np.full(u.size, weight), np.ones(len(bridge_u))]),
    )


def block_partition(sizes: Sequence[int]) -> Partition:
    return Partition(np.repeat(np.arange(len(sizes)), sizes), k=len(sizes))


def planted_partition(
    sizes: Sequence[int],
    p_in: float,
    p_out: float,
    seed: int = 0,
    weight_range: Tuple[float, float] = (1.0, 1.0),
) -> Tuple[WeightedGraph, Partition]:
    """Stochastic block model: pairs inside a block link w.p. ``p_in``, across w.p. ``p_out``."""
    if not (0.0 <= p_out <= 1.0 and 0.0 <= p_in <= 1.0):
        raise DomainError("edge probabilities must lie in [0, 1]")
    truth = block_partition(sizes)
    n = truth.n
    rng = stream(seed, 0x5B)
    a, b = np.triu_indices(n, k=1)
    same = truth.assignment[a] == truth.assignment[b]
    keep = rng.random(a.size) < np.where(same, p_in, p_out)
    low, high = weight_range
    weights = rng.uniform(low, high, size=int(keep.sum())) if high > low else np.full(int(keep.sum()), low)
    return WeightedGraph.from_arrays(n, a[keep], b[keep], weights), truth
