"""Process-wide defaults read from the environment once at import."""

from __future__ import annotations

import os
from pathlib import Path

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
LOG_FORMAT = os.getenv("LOG_FORMAT", "%(asctime)s | %(levelname)s | %(name)s | %(message)s")

OUTPUT_DIR = Path(os.getenv("SPARSECLUSTER_OUTPUT_DIR", "results"))

# Graphs with at most this many nodes use the dense eigensolver by default.
DENSE_CUTOFF = int(os.getenv("SPARSECLUSTER_DENSE_CUTOFF", "200"))

STAGE_WARN_MS = int(os.getenv("SPARSECLUSTER_STAGE_WARN_MS", "20000"))
THREADS = int(os.getenv("SPARSECLUSTER_THREADS", "1"))

GATEWAY_CORS_ORIGINS = os.getenv("GATEWAY_CORS_ORIGINS", "*").split(",")
PORT = int(os.getenv("PORT", "8000"))
