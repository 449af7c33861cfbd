"""Clustering-quality metrics."""

from metrics.quality import ErrReport, best_matching, contingency_table, misclassification_ratio, ncut

__all__ = ["ErrReport", "best_matching", "contingency_table", "misclassification_ratio", "ncut"]
