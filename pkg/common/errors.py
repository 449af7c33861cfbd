"""Exception hierarchy shared by every sparsecluster package."""

from __future__ import annotations

from typing import Optional


class SparseClusterError(Exception):
    """Base class for all errors raised by sparsecluster."""


class DomainError(SparseClusterError, ValueError):
    """An operation was called outside its domain (empty set, zero volume, ...)."""


class GraphError(DomainError):
    """A graph could not be constructed from the given edges."""


class ParseError(DomainError):
    """A text or binary input could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ConvergenceError(SparseClusterError, RuntimeError):
    """An iterative solver hit its iteration cap before meeting the tolerance."""

    def __init__(self, message: str, best_residual: float, iterations: int) -> None:
        self.best_residual = best_residual
        self.iterations = iterations
        super().__init__(f"{message} (best residual {best_residual:.3e} after {iterations} iterations)")


class NoSeedsError(SparseClusterError, RuntimeError):
    """The seeding step activated no node."""


class TauSearchError(SparseClusterError, RuntimeError):
    """The doubling search exceeded its cap without the gap stabilising."""


class ClusteringError(SparseClusterError, RuntimeError):
    """k-means produced an empty cluster that re-seeding could not repair."""


__all__ = [
    "SparseClusterError",
    "DomainError",
    "GraphError",
    "ParseError",
    "ConvergenceError",
    "NoSeedsError",
    "TauSearchError",
    "ClusteringError",
]
