"""HTTP gateway for sparsification, clustering and benchmark runs."""

from __future__ import annotations

from .api import app

__all__ = ["app"]
