"""Bottom eigenpairs of the normalized Laplacian and spectral-gap estimates."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import scipy.linalg
from pydantic import BaseModel
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from common import settings
from common.errors import ConvergenceError, DomainError
from common.rng import stream
from graphcore.cuts import partition_max_conductance
from graphcore.partition import Partition
from graphcore.weighted_graph import WeightedGraph
from spectral.laplacian import IsolatedPolicy, LaplacianOperator, dense_normalized_laplacian

LOGGER = logging.getLogger("sparsecluster.spectral")

EigenMethod = Literal["auto", "dense", "subspace", "arpack"]

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues, orthonormal eigenvectors (columns) and residual norms."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    method: str
    iterations: int = 0

    def __len__(self) -> int:
        return int(self.eigenvalues.size)


class GapEstimate(BaseModel):
    k: int
    lambda_k: float
    lambda_k_plus_1: float
    gap: float
    upsilon_proxy: Optional[float] = None


def _residuals(op: LaplacianOperator, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.linalg.norm(op.apply(vectors) - vectors * values[None, :], axis=0)


def _dense(op: LaplacianOperator, j: int) -> Spectrum:
    matrix = dense_normalized_laplacian(op.graph, isolated="kernel")
    values, vectors = scipy.linalg.eigh(matrix, subset_by_index=[0, j - 1])
    return Spectrum(values, vectors, _residuals(op, values, vectors), method="dense")


def _subspace(op: LaplacianOperator, j: int, tol: float, seed: int, max_iter: int) -> Spectrum:
    """Orthogonal iteration on ``P = I - L/2`` with Rayleigh-Ritz extraction.

    The largest eigenvalues of ``P`` are the smallest of ``L``; the block carries a
    few extra vectors so the wanted ones converge at the rate set by the first
    unwanted eigenvalue outside the block.
    """
    n = op.n
    block = min(n, max(2 * j, j + 8))
    rng = stream(seed, 0xE1)
    basis, _ = np.linalg.qr(rng.standard_normal((n, block)))
    image = op.apply(basis)
    best = np.inf
    for iteration in range(1, max_iter + 1):
        basis, _ = np.linalg.qr(basis - 0.5 * image)
        image = op.apply(basis)
        projected = basis.T @ image
        theta, rotation = np.linalg.eigh(0.5 * (projected + projected.T))
        basis = basis @ rotation
        image = image @ rotation
        residuals = np.linalg.norm(image[:, :j] - basis[:, :j] * theta[None, :j], axis=0)
        worst = float(residuals.max())
        best = min(best, worst)
        if worst <= tol:
            LOGGER.debug("Subspace iteration converged in %d iterations (residual %.2e)", iteration, worst)
            return Spectrum(theta[:j], basis[:, :j], residuals, method="subspace", iterations=iteration)
    raise ConvergenceError(f"subspace iteration did not reach tol={tol:g} for j={j}", best, max_iter)


def _arpack(op: LaplacianOperator, j: int, tol: float, seed: int, max_iter: int) -> Spectrum:
    """Lanczos on ``P`` through a LinearOperator; ``P``'s top eigenvalues are ``L``'s bottom."""
    n = op.n
    if j >= n - 1:
        return _dense(op, j)
    lazy = LinearOperator((n, n), matvec=lambda x: x - 0.5 * op.apply(x), dtype=np.float64)
    start = stream(seed, 0xA7).standard_normal(n)
    try:
        values, vectors = eigsh(lazy, k=j, which="LA", tol=tol * 1e-2, v0=start, maxiter=max_iter)
    except ArpackNoConvergence as exc:
        raise ConvergenceError(f"ARPACK did not converge for j={j}", float("inf"), max_iter) from exc
    order = np.argsort(-values)
    laplacian_values = 2.0 * (1.0 - values[order])
    vectors = vectors[:, order]
    residuals = _residuals(op, laplacian_values, vectors)
    if residuals.max() > tol:
        raise ConvergenceError(f"ARPACK residual above tol={tol:g}", float(residuals.max()), max_iter)
    return Spectrum(laplacian_values, vectors, residuals, method="arpack")


def bottom_eigenpairs(
    g: WeightedGraph,
    j: int,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    method: EigenMethod = "auto",
    max_iter: Optional[int] = None,
    isolated: IsolatedPolicy = "error",
) -> Spectrum:
    """The ``j`` smallest eigenpairs of the normalized Laplacian of ``g``."""
    if not 1 <= j <= g.n:
        raise DomainError(f"need 1 <= j <= n, got j={j}, n={g.n}")
    op = LaplacianOperator(g, isolated=isolated)
    chosen = method
    if method == "auto":
        chosen = "dense" if g.n <= settings.DENSE_CUTOFF else "subspace"
    cap = max_iter if max_iter is not None else 10 * g.n
    LOGGER.debug("bottom_eigenpairs n=%d j=%d method=%s", g.n, j, chosen)
    if chosen == "dense":
        return _dense(op, j)
    if chosen == "subspace":
        return _subspace(op, j, tol, seed, cap)
    if chosen == "arpack":
        return _arpack(op, j, tol, seed, cap)
    raise DomainError(f"unknown eigensolver method {method!r}")


def estimate_gap(
    g: WeightedGraph,
    k: int,
    reference: Optional[Partition] = None,
    seed: int = 0,
    method: EigenMethod = "auto",
    tol: float = DEFAULT_TOL,
    isolated: IsolatedPolicy = "error",
) -> GapEstimate:
    """``lambda_k``, ``lambda_{k+1}`` and, given a reference partition, the gap proxy."""
    if k < 1 or k + 1 > g.n:
        raise DomainError(f"need 1 <= k < n, got k={k}, n={g.n}")
    spectrum = bottom_eigenpairs(g, k + 1, tol=tol, seed=seed, method=method, isolated=isolated)
    lambda_k = max(float(spectrum.eigenvalues[k - 1]), 0.0)
    lambda_next = max(float(spectrum.eigenvalues[k]), 0.0)
    upsilon = None
    if reference is not None:
        rho = partition_max_conductance(g, reference)
        upsilon = lambda_next / rho if rho > 0 else float("inf")
    return GapEstimate(
        k=k,
        lambda_k=lambda_k,
        lambda_k_plus_1=lambda_next,
        gap=lambda_next - lambda_k,
        upsilon_proxy=upsilon,
    )


def write_spectrum_csv(spectrum: Spectrum, path: str | Path) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["index", "eigenvalue", "residual"])
    for index, (value, residual) in enumerate(zip(spectrum.eigenvalues.tolist(), spectrum.residuals.tolist()), start=1):
        writer.writerow([index, repr(value), repr(residual)])
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")


def write_embedding_csv(embedding: np.ndarray, path: str | Path) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in np.atleast_2d(embedding).tolist():
        writer.writerow([repr(value) for value in row])
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")
