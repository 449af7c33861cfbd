"""Matrix-free normalized Laplacian ``I - D^{-1/2} A D^{-1/2}``."""

from __future__ import annotations

from typing import Literal

import numpy as np

from common.errors import DomainError
from graphcore.weighted_graph import WeightedGraph

IsolatedPolicy = Literal["error", "kernel"]


class LaplacianOperator:
    """Applies the normalized Laplacian of ``graph`` to vectors or ``(n, j)`` blocks.

    With ``isolated="kernel"`` an isolated vertex gets an all-zero row, so each one
    contributes a kernel dimension, the same as any other connected component.
    """

    def __init__(self, graph: WeightedGraph, isolated: IsolatedPolicy = "error") -> None:
        isolated_nodes = graph.isolated_nodes()
        if isolated_nodes.size and isolated == "error":
            raise DomainError(f"normalized Laplacian undefined: node {int(isolated_nodes[0])} is isolated")
        self.graph = graph
        inv_sqrt = np.zeros(graph.n)
        connected = graph.degree > 0
        inv_sqrt[connected] = 1.0 / np.sqrt(graph.degree[connected])
        inv_sqrt.setflags(write=False)
        self.inv_sqrt_degree = inv_sqrt
        self._connected = connected

    @property
    def n(self) -> int:
        return self.graph.n

    def _scaled_adjacency(self, x: np.ndarray) -> np.ndarray:
        scale = self.inv_sqrt_degree if x.ndim == 1 else self.inv_sqrt_degree[:, None]
        return scale * (self.graph.adjacency @ (scale * x))

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.n:
            raise DomainError(f"vector length {x.shape[0]} does not match n={self.n}")
        out = x - self._scaled_adjacency(x)
        if not self._connected.all():
            out[~self._connected] = 0.0
        return out

    __matmul__ = apply

    def lazy_walk(self, x: np.ndarray) -> np.ndarray:
        """``P x`` with ``P = I - L/2``: half of ``x`` plus half of its scaled neighbour sum."""
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * x + 0.5 * self._scaled_adjacency(x)

    def kernel_vector(self) -> np.ndarray:
        """``D^{1/2} 1``."""
        return np.sqrt(self.graph.degree)


def apply_normalized_laplacian(op: LaplacianOperator, x: np.ndarray) -> np.ndarray:
    return op.apply(x)


def dense_normalized_laplacian(g: WeightedGraph, isolated: IsolatedPolicy = "error") -> np.ndarray:
    """Explicit ``n x n`` matrix; the oracle for small graphs."""
    if isolated == "error" and g.isolated_nodes().size:
        raise DomainError("normalized Laplacian undefined on a graph with isolated vertices")
    inv_sqrt = np.zeros(g.n)
    connected = g.degree > 0
    inv_sqrt[connected] = 1.0 / np.sqrt(g.degree[connected])
    matrix = np.diag(connected.astype(np.float64)) - inv_sqrt[:, None] * g.adjacency.toarray() * inv_sqrt[None, :]
    return matrix


def dense_lazy_walk(g: WeightedGraph) -> np.ndarray:
    """``I - L/2`` as a dense matrix."""
    return np.eye(g.n) - 0.5 * dense_normalized_laplacian(g)
