"""Gaussian-kernel similarity graphs over point clouds."""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, Field
from scipy.spatial.distance import pdist

from common.errors import DomainError
from data_io.points import PointCloud
from graphcore.weighted_graph import WeightedGraph

LOGGER = logging.getLogger("sparsecluster.data_io.similarity")


class SimilarityConfig(BaseModel):
    """Kernel bandwidth and the weight below which a pair is left out."""

    sigma: float = Field(..., gt=0, description="Kernel bandwidth.")
    weight_floor: float = Field(0.0, ge=0, description="Pairs with weight <= floor are dropped when floor > 0.")


def kernel_weights(squared_distances: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(-squared_distances / (2.0 * sigma * sigma))


def build_similarity_graph(pc: PointCloud, cfg: SimilarityConfig) -> WeightedGraph:
    """Complete graph with ``w(u, v) = exp(-|u - v|^2 / 2 sigma^2)``.

    Weights that underflow to 0.0 are dropped along with those under the floor.
    """
    if pc.n < 2:
        raise DomainError("a similarity graph needs at least 2 points")
    u, v = np.triu_indices(pc.n, k=1)
    weights = kernel_weights(pdist(pc.points, metric="sqeuclidean"), cfg.sigma)
    keep = weights > cfg.weight_floor if cfg.weight_floor > 0 else weights > 0
    dropped = int(weights.size - keep.sum())
    if dropped:
        LOGGER.info("Dropped %d of %d pairs below the weight floor", dropped, weights.size)
    graph = WeightedGraph(pc.n, u[keep], v[keep], weights[keep])
    LOGGER.info("Built similarity graph %s with sigma=%g", graph, cfg.sigma)
    return graph
