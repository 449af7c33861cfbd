"""Keyed, order-independent uniform streams.

``keyed_uniforms(seed, a, b, c)`` returns the same number for the same key tuple no
matter how many other keys are drawn alongside it or in which order, which lets
per-edge sampling run in any chunking or edge order.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)
_SHIFT_30 = np.uint64(30)
_SHIFT_27 = np.uint64(27)
_SHIFT_31 = np.uint64(31)
_SHIFT_11 = np.uint64(11)
_INV_2_53 = 1.0 / float(1 << 53)


def _splitmix(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> _SHIFT_30)) * _MIX_1
    z = (z ^ (z >> _SHIFT_27)) * _MIX_2
    return z ^ (z >> _SHIFT_31)


def keyed_uniforms(seed: int | np.ndarray, *keys: int | np.ndarray) -> np.ndarray:
    """Uniform floats in [0, 1) derived from ``(seed, *keys)``; broadcasts over arrays."""
    with np.errstate(over="ignore"):
        state = _splitmix(np.asarray(seed, dtype=np.int64).astype(np.uint64))
        for key in keys:
            state = _splitmix(state ^ np.asarray(key, dtype=np.int64).astype(np.uint64))
        return np.atleast_1d(state >> _SHIFT_11).astype(np.float64) * _INV_2_53


def stream(seed: int, *keys: int) -> np.random.Generator:
    """A numpy Generator for a named sub-stream of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]))


def derive_seed(master: int, *keys: int) -> int:
    """A 31-bit seed for the sub-task ``keys`` of a run seeded with ``master``."""
    state = np.random.SeedSequence([int(master), *[int(k) for k in keys]]).generate_state(1)[0]
    return int(state) & 0x7FFFFFFF
