"""Point clouds and the synthetic point datasets."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from sklearn.datasets import make_moons

from common.errors import DomainError, ParseError
from common.rng import stream
from graphcore.partition import Partition

LOGGER = logging.getLogger("sparsecluster.data_io")

# Equilateral triangle of side 2.
DEFAULT_GAUSSIAN_MEANS = ((0.0, 0.0), (2.0, 0.0), (1.0, float(np.sqrt(3.0))))


@dataclass(frozen=True)
class PointCloud:
    """``n`` points of dimension ``dim`` with optional ground-truth partition."""

    points: np.ndarray
    truth: Optional[Partition] = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise DomainError("points must be a 2-D array (n, dim)")
        if not np.all(np.isfinite(pts)):
            raise DomainError("points must be finite")
        if self.truth is not None and self.truth.n != pts.shape[0]:
            raise DomainError("truth partition must cover every point")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])


def gen_twomoons(n: int, noise: float = 0.05, seed: int = 0) -> PointCloud:
    """Two interleaved unit half-circles, ``n // 2`` points on the outer moon."""
    if n < 2:
        raise DomainError("twomoons needs n >= 2")
    points, labels = make_moons(n_samples=n, noise=noise or None, shuffle=False, random_state=seed)
    return PointCloud(points, Partition(labels, k=2))


def gen_gaussians(
    n: int,
    variance: float = 0.04,
    seed: int = 0,
    means: Sequence[Sequence[float]] = DEFAULT_GAUSSIAN_MEANS,
) -> PointCloud:
    """Uniform mixture of isotropic Gaussians; truth is the component of origin."""
    centres = np.asarray(means, dtype=np.float64)
    if n < centres.shape[0]:
        raise DomainError(f"gaussians needs n >= {centres.shape[0]}")
    if variance < 0:
        raise DomainError("variance must be non-negative")
    rng = stream(seed, 0x6A)
    component = rng.integers(centres.shape[0], size=n)
    points = centres[component] + np.sqrt(variance) * rng.standard_normal((n, centres.shape[1]))
    return PointCloud(points, Partition(component, k=centres.shape[0]))


def write_points_csv(pc: PointCloud, path: str | Path) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in pc.points.tolist():
        writer.writerow([repr(value) for value in row])
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")
    LOGGER.info("Wrote %d points to %s", pc.n, path)


def read_points_csv(path: str | Path, truth: Optional[Partition] = None) -> PointCloud:
    rows = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row:
            continue
        try:
            rows.append([float(value) for value in row])
        except ValueError as exc:
            raise ParseError(f"non-numeric coordinate in {row!r}", line=line_no) from exc
        if len(rows[-1]) != len(rows[0]):
            raise ParseError("all points must have the same dimension", line=line_no)
    return PointCloud(np.asarray(rows, dtype=np.float64).reshape(len(rows), -1), truth)
