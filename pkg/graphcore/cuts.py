"""Cut weight, conductance and per-part cut statistics."""

from __future__ import annotations

from typing import Iterable, Tuple

import numpy as np

from common.errors import DomainError
from graphcore.partition import UNASSIGNED, Partition
from graphcore.weighted_graph import WeightedGraph, node_mask


def cut_weight(g: WeightedGraph, s: Iterable[int] | np.ndarray) -> float:
    """Total weight of edges with exactly one endpoint in ``s``."""
    mask = node_mask(g, s)
    crossing = mask[g.edge_u] != mask[g.edge_v]
    return float(g.edge_w[crossing].sum())


def conductance(g: WeightedGraph, s: Iterable[int] | np.ndarray) -> float:
    """``w(S, V\\S) / vol(S)``."""
    mask = node_mask(g, s)
    if not mask.any():
        raise DomainError("conductance of the empty set is undefined")
    vol = float(g.degree[mask].sum())
    if vol <= 0.0:
        raise DomainError("conductance of a zero-volume set is undefined")
    return cut_weight(g, mask) / vol


def part_cuts_and_volumes(g: WeightedGraph, p: Partition) -> Tuple[np.ndarray, np.ndarray]:
    """Cut weight and volume of every part of a fully assigned partition."""
    if p.n != g.n:
        raise DomainError(f"partition covers {p.n} nodes, graph has {g.n}")
    if not p.is_complete():
        raise DomainError("partition must assign every node")
    labels = p.assignment
    lu, lv = labels[g.edge_u], labels[g.edge_v]
    crossing = lu != lv
    cuts = np.bincount(lu[crossing], weights=g.edge_w[crossing], minlength=p.k)
    cuts += np.bincount(lv[crossing], weights=g.edge_w[crossing], minlength=p.k)
    volumes = np.bincount(labels, weights=g.degree, minlength=p.k)
    return cuts, volumes


def part_conductances(g: WeightedGraph, p: Partition) -> np.ndarray:
    cuts, volumes = part_cuts_and_volumes(g, p)
    empty = np.flatnonzero(volumes <= 0.0)
    if empty.size:
        raise DomainError(f"part {int(empty[0])} has zero volume")
    return cuts / volumes


def partition_max_conductance(g: WeightedGraph, p: Partition) -> float:
    """``max_i phi(A_i)`` for the given partition (not the k-way expansion minimum)."""
    return float(part_conductances(g, p).max())


__all__ = [
    "UNASSIGNED",
    "cut_weight",
    "conductance",
    "part_cuts_and_volumes",
    "part_conductances",
    "partition_max_conductance",
]
