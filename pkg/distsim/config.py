"""Configuration of the distributed clustering protocol."""

from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class SimConfig(BaseModel):
    beta: float = Field(..., gt=0, le=1, description="Lower bound on vol(S_i)/vol(V) over clusters.")
    k_hint: Optional[int] = Field(None, ge=1, description="Number of clusters, used for the spectral round count.")
    rounds: Optional[int] = Field(None, ge=1, description="Averaging rounds T; None derives T from the graph.")
    round_multiplier: float = Field(1.0, gt=0, description="c in T = ceil(c * ln n / lambda_{k+1}).")
    seed_multiplier: float = Field(1.0, gt=0, description="a in s = ceil((a / beta) * ln(1 / beta)).")
    seed: int = 0
    vol_estimate: Optional[float] = Field(None, gt=0, description="vol(V) as known to the nodes; exact when None.")
    report_gap: bool = Field(False, description="Report lambda_{k+1} and the gap proxy against the ground truth.")

    @model_validator(mode="after")
    def _beta_fits_k(self) -> "SimConfig":
        if self.k_hint is not None and self.beta > 1.0 / self.k_hint + 1e-12:
            raise ValueError(f"beta={self.beta} exceeds 1/k for k={self.k_hint}")
        return self


def expected_seed_count(cfg: SimConfig) -> int:
    """``ceil((a / beta) * ln(1 / beta))``, at least 1."""
    return max(1, math.ceil(cfg.seed_multiplier / cfg.beta * math.log(1.0 / cfg.beta) - 1e-12))
