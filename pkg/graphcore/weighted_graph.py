"""Immutable weighted undirected graph on dense node ids ``0..n-1``."""

from __future__ import annotations

import logging
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from common.errors import DomainError, GraphError

LOGGER = logging.getLogger("sparsecluster.graphcore")

Edge = Tuple[int, int, float]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class WeightedGraph:
    """Simple undirected graph with strictly positive edge weights.

    Edges are stored once, canonically (``u < v``, sorted), and mirrored into a
    symmetric CSR adjacency so neighbourhoods can be read from either endpoint.
    Instances are never mutated after construction.
    """

    __slots__ = ("_n", "_u", "_v", "_w", "_adjacency", "_degree")

    def __init__(self, n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> None:
        # Trusted constructor: arrays must already be canonical, sorted and valid.
        self._n = int(n)
        self._u = _readonly(np.ascontiguousarray(u, dtype=np.int64))
        self._v = _readonly(np.ascontiguousarray(v, dtype=np.int64))
        self._w = _readonly(np.ascontiguousarray(w, dtype=np.float64))
        rows = np.concatenate([self._u, self._v])
        cols = np.concatenate([self._v, self._u])
        vals = np.concatenate([self._w, self._w])
        self._adjacency = sp.csr_matrix((vals, (rows, cols)), shape=(self._n, self._n))
        self._adjacency.sort_indices()
        degree = np.bincount(self._u, weights=self._w, minlength=self._n)
        degree += np.bincount(self._v, weights=self._w, minlength=self._n)
        self._degree = _readonly(degree)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_arrays(cls, n: int, u: Sequence[int], v: Sequence[int], w: Sequence[float]) -> "WeightedGraph":
        """Validate, canonicalise and build. Zero-weight edges are dropped."""
        if n < 0:
            raise GraphError(f"node count must be non-negative, got {n}")
        u_arr = np.asarray(u, dtype=np.int64).ravel()
        v_arr = np.asarray(v, dtype=np.int64).ravel()
        w_arr = np.asarray(w, dtype=np.float64).ravel()
        if not (u_arr.shape == v_arr.shape == w_arr.shape):
            raise GraphError("edge arrays must have equal length")
        if u_arr.size:
            if u_arr.min() < 0 or v_arr.min() < 0 or u_arr.max() >= n or v_arr.max() >= n:
                raise GraphError(f"node id out of range [0, {n})")
            loops = np.flatnonzero(u_arr == v_arr)
            if loops.size:
                raise GraphError(f"self-loop at node {int(u_arr[loops[0]])}")
            if not np.all(np.isfinite(w_arr)):
                raise GraphError("edge weights must be finite")
            negative = np.flatnonzero(w_arr < 0)
            if negative.size:
                i = int(negative[0])
                raise GraphError(f"negative weight {w_arr[i]} on edge ({int(u_arr[i])}, {int(v_arr[i])})")

        keep = w_arr > 0
        if not keep.all():
            LOGGER.debug("Dropping %d zero-weight edges", int((~keep).sum()))
        lo = np.minimum(u_arr[keep], v_arr[keep])
        hi = np.maximum(u_arr[keep], v_arr[keep])
        w_arr = w_arr[keep]

        keys = lo * max(n, 1) + hi
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        duplicate = np.flatnonzero(keys[1:] == keys[:-1])
        if duplicate.size:
            i = order[duplicate[0]]
            raise GraphError(f"duplicate edge ({int(lo[i])}, {int(hi[i])})")
        return cls(n, lo[order], hi[order], w_arr[order])

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "WeightedGraph":
        edge_list = list(edges)
        if not edge_list:
            return cls.from_arrays(n, [], [], [])
        u, v, w = zip(*edge_list)
        return cls.from_arrays(n, u, v, w)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return int(self._w.size)

    @property
    def edge_u(self) -> np.ndarray:
        return self._u

    @property
    def edge_v(self) -> np.ndarray:
        return self._v

    @property
    def edge_w(self) -> np.ndarray:
        return self._w

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._adjacency

    @property
    def degree(self) -> np.ndarray:
        return self._degree

    def edges(self) -> Iterator[Edge]:
        for a, b, weight in zip(self._u.tolist(), self._v.tolist(), self._w.tolist()):
            yield a, b, weight

    def neighbors(self, u: int) -> Tuple[np.ndarray, np.ndarray]:
        """Neighbour ids and the matching weights of node ``u``."""
        start, stop = self._adjacency.indptr[u], self._adjacency.indptr[u + 1]
        return self._adjacency.indices[start:stop], self._adjacency.data[start:stop]

    def weight(self, u: int, v: int) -> float:
        """Weight of ``{u, v}``; 0.0 when the pair is not an edge."""
        if not (0 <= u < self._n and 0 <= v < self._n):
            raise DomainError(f"node id out of range [0, {self._n})")
        return float(self._adjacency[u, v])

    def has_edge(self, u: int, v: int) -> bool:
        return self.weight(u, v) > 0.0

    def volume(self, nodes: Optional[Iterable[int] | np.ndarray] = None) -> float:
        if nodes is None:
            return float(self._degree.sum())
        return float(self._degree[node_mask(self, nodes)].sum())

    def total_weight(self) -> float:
        return float(self._w.sum())

    def connected_components(self) -> Tuple[int, np.ndarray]:
        """Number of components and the component id of every node."""
        count, labels = connected_components(self._adjacency, directed=False)
        return int(count), labels

    def isolated_nodes(self) -> np.ndarray:
        return np.flatnonzero(self._degree == 0)

    def permuted(self, perm: Sequence[int]) -> "WeightedGraph":
        """Relabel node ``i`` as ``perm[i]``."""
        perm_arr = np.asarray(perm, dtype=np.int64)
        if sorted(perm_arr.tolist()) != list(range(self._n)):
            raise DomainError("perm must be a permutation of 0..n-1")
        return WeightedGraph.from_arrays(self._n, perm_arr[self._u], perm_arr[self._v], self._w)

    def to_networkx(self):
        import networkx as nx

        graph = nx.Graph()
        graph.add_nodes_from(range(self._n))
        graph.add_weighted_edges_from(self.edges())
        return graph

    # ------------------------------------------------------------------
    # Dunder helpers
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._u, other._u)
            and np.array_equal(self._v, other._v)
            and np.array_equal(self._w, other._w)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self._n}, m={self.m}, vol={self.volume():.6g})"


def node_mask(g: WeightedGraph, nodes: Iterable[int] | np.ndarray) -> np.ndarray:
    """Boolean membership mask of length ``g.n`` for a node set or mask."""
    arr = np.asarray(nodes if isinstance(nodes, np.ndarray) else list(nodes))
    if arr.dtype == bool:
        if arr.shape != (g.n,):
            raise DomainError(f"mask must have length {g.n}")
        return arr
    mask = np.zeros(g.n, dtype=bool)
    if arr.size:
        arr = arr.astype(np.int64)
        if arr.min() < 0 or arr.max() >= g.n:
            raise DomainError(f"node id out of range [0, {g.n})")
        mask[arr] = True
    return mask
