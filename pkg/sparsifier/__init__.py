"""Cluster-preserving sparsification by degree-local edge sampling."""

from sparsifier.sampling import (
    SparsifierOutput,
    SparsifyConfig,
    SparsifyStats,
    endpoint_probabilities,
    kept_mask,
    sample_probability,
    sparsify,
    union_probability,
)
from sparsifier.tau_search import TauSearchResult, TauStep, tau_doubling_search

__all__ = [
    "SparsifierOutput",
    "SparsifyConfig",
    "SparsifyStats",
    "TauSearchResult",
    "TauStep",
    "endpoint_probabilities",
    "kept_mask",
    "sample_probability",
    "sparsify",
    "tau_doubling_search",
    "union_probability",
]
