"""Classical spectral clustering: bottom-k embedding, row normalisation, k-means."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from common.errors import DomainError
from graphcore.partition import Partition
from graphcore.weighted_graph import WeightedGraph
from spectral.eigensolver import DEFAULT_TOL, EigenMethod, Spectrum, bottom_eigenpairs
from spectral.kmeans import kmeans
from spectral.laplacian import IsolatedPolicy

LOGGER = logging.getLogger("sparsecluster.spectral.clustering")


@dataclass(frozen=True)
class SpectralClustering:
    partition: Partition
    embedding: np.ndarray
    spectrum: Spectrum


def spectral_embedding(spectrum: Spectrum) -> np.ndarray:
    """Rows of the bottom eigenvectors scaled to unit length; zero rows stay at the origin."""
    vectors = spectrum.eigenvectors
    norms = np.linalg.norm(vectors, axis=1)
    embedding = vectors.copy()
    nonzero = norms > 0
    embedding[nonzero] /= norms[nonzero, None]
    return embedding


def spectral_cluster_detailed(
    g: WeightedGraph,
    k: int,
    seed: int = 0,
    method: EigenMethod = "auto",
    tol: float = DEFAULT_TOL,
    isolated: IsolatedPolicy = "error",
) -> SpectralClustering:
    if k < 2:
        raise DomainError(f"spectral clustering needs k >= 2, got {k}")
    spectrum = bottom_eigenpairs(g, k, tol=tol, seed=seed, method=method, isolated=isolated)
    embedding = spectral_embedding(spectrum)
    result = kmeans(embedding, k, seed=seed)
    LOGGER.info("Spectral clustering of %s into k=%d (eigen method %s)", g, k, spectrum.method)
    return SpectralClustering(Partition(result.labels, k=k), embedding, spectrum)


def spectral_cluster(
    g: WeightedGraph,
    k: int,
    seed: int = 0,
    method: EigenMethod = "auto",
    tol: float = DEFAULT_TOL,
    isolated: IsolatedPolicy = "error",
) -> Partition:
    return spectral_cluster_detailed(g, k, seed=seed, method=method, tol=tol, isolated=isolated).partition
