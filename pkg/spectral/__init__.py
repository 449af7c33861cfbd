"""Normalized Laplacian, eigensolvers, k-means and the spectral clustering baseline."""

from spectral.clustering import SpectralClustering, spectral_cluster, spectral_cluster_detailed, spectral_embedding
from spectral.eigensolver import (
    GapEstimate,
    Spectrum,
    bottom_eigenpairs,
    estimate_gap,
    write_embedding_csv,
    write_spectrum_csv,
)
from spectral.kmeans import KMeansResult, kmeans
from spectral.laplacian import (
    LaplacianOperator,
    apply_normalized_laplacian,
    dense_lazy_walk,
    dense_normalized_laplacian,
)

__all__ = [
    "GapEstimate",
    "KMeansResult",
    "LaplacianOperator",
    "SpectralClustering",
    "Spectrum",
    "apply_normalized_laplacian",
    "bottom_eigenpairs",
    "dense_lazy_walk",
    "dense_normalized_laplacian",
    "estimate_gap",
    "kmeans",
    "spectral_cluster",
    "spectral_cluster_detailed",
    "spectral_embedding",
    "write_embedding_csv",
    "write_spectrum_csv",
]
