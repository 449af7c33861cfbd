"""k-means with k-means++ seeding (scikit-learn), used on spectral embeddings."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from common.errors import ClusteringError, DomainError

LOGGER = logging.getLogger("sparsecluster.spectral.kmeans")

N_RESTARTS = 10
MAX_ITER = 100
RESEED_RETRIES = 3


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    n_init: int = N_RESTARTS,
    max_iter: int = MAX_ITER,
) -> KMeansResult:
    """Best of ``n_init`` Lloyd runs on the squared-Euclidean objective.

    A run that leaves a cluster empty is retried with a fresh seed; after
    ``RESEED_RETRIES`` attempts the failure is raised.
    """
    data = np.asarray(points, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    distinct = np.unique(data, axis=0).shape[0]
    if k > distinct:
        raise DomainError(f"k={k} exceeds the number of distinct points ({distinct})")

    for attempt in range(RESEED_RETRIES + 1):
        model = KMeans(
            n_clusters=k,
            init="k-means++",
            n_init=n_init,
            max_iter=max_iter,
            algorithm="lloyd",
            random_state=seed + attempt,
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            labels = model.fit_predict(data)
        if np.bincount(labels, minlength=k).min() > 0:
            return KMeansResult(labels.astype(np.int64), model.cluster_centers_, float(model.inertia_))
        LOGGER.warning("k-means left an empty cluster (attempt %d); re-seeding", attempt + 1)
    raise ClusteringError(f"k-means could not fill {k} clusters after {RESEED_RETRIES} re-seeds")
