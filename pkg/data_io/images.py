"""PPM / PGM ingestion and pixel-to-point mapping."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np

from common.errors import DomainError, ParseError
from common.rng import stream
from data_io.points import PointCloud
from graphcore.partition import Partition

LOGGER = logging.getLogger("sparsecluster.data_io.images")

_CHANNELS = {b"P2": 1, b"P3": 3, b"P5": 1, b"P6": 3}


def _header_tokens(data: bytes) -> Tuple[List[bytes], int]:
    """First four header tokens (magic, width, height, maxval) and the raster offset."""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ParseError("truncated header")
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    # Exactly one whitespace byte separates maxval from a binary raster.
    return tokens, pos + 1


def decode_netpbm(data: bytes) -> np.ndarray:
    """Decode P2/P3/P5/P6 into an ``(height, width, 3)`` integer array (gray replicated)."""
    tokens, offset = _header_tokens(data)
    magic = tokens[0]
    if magic not in _CHANNELS:
        raise ParseError(f"unsupported magic number {magic!r}")
    try:
        width, height, maxval = (int(token) for token in tokens[1:4])
    except ValueError as exc:
        raise ParseError("width, height and maxval must be integers") from exc
    if width <= 0 or height <= 0 or not (0 < maxval < 65536):
        raise ParseError("invalid image dimensions or maxval")
    channels = _CHANNELS[magic]
    count = width * height * channels

    if magic in (b"P2", b"P3"):
        try:
            values = np.array([int(tok) for tok in data[offset:].split()], dtype=np.int64)
        except ValueError as exc:
            raise ParseError("non-integer sample in plain raster") from exc
        if values.size < count:
            raise ParseError(f"expected {count} samples, found {values.size}")
        values = values[:count]
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raster = data[offset : offset + count * dtype.itemsize]
        if len(raster) < count * dtype.itemsize:
            raise ParseError("truncated binary raster")
        values = np.frombuffer(raster, dtype=dtype).astype(np.int64)
    if values.max(initial=0) > maxval:
        raise ParseError("sample exceeds maxval")

    pixels = values.reshape(height, width, channels)
    if channels == 1:
        pixels = np.repeat(pixels, 3, axis=2)
    return pixels


def read_image(path: str | Path) -> np.ndarray:
    return decode_netpbm(Path(path).read_bytes())


def image_to_points(image: np.ndarray | bytes | str | Path) -> PointCloud:
    """One point ``(column, row, r, g, b)`` per pixel, row-major order."""
    if isinstance(image, (str, Path)):
        pixels = read_image(image)
    elif isinstance(image, bytes):
        pixels = decode_netpbm(image)
    else:
        pixels = np.asarray(image)
        if pixels.ndim == 2:
            pixels = np.repeat(pixels[:, :, None], 3, axis=2)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise DomainError("image must be (height, width, 3)")
    height, width, _ = pixels.shape
    rows, cols = np.indices((height, width))
    points = np.column_stack([cols.ravel(), rows.ravel(), pixels.reshape(-1, 3)]).astype(np.float64)
    LOGGER.info("Mapped %dx%d image to %d points", width, height, points.shape[0])
    return PointCloud(points)


def encode_ppm(pixels: np.ndarray) -> bytes:
    """Binary P6 encoding of an ``(height, width, 3)`` array with maxval 255."""
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DomainError("pixels must be (height, width, 3)")
    if arr.min(initial=0) < 0 or arr.max(initial=0) > 255:
        raise DomainError("pixel values must lie in [0, 255]")
    height, width, _ = arr.shape
    return f"P6\n{width} {height}\n255\n".encode("ascii") + arr.astype(np.uint8).tobytes()


def write_ppm(pixels: np.ndarray, path: str | Path) -> None:
    Path(path).write_bytes(encode_ppm(pixels))


def gen_segmented_image(
    width: int,
    height: int,
    k: int = 3,
    noise: float = 8.0,
    seed: int = 0,
) -> Tuple[np.ndarray, Partition]:
    """A ``k``-band colour image with Gaussian pixel noise and its band partition.

    Bands are vertical stripes of distinct base colours, a desk-sized stand-in for
    a photograph with ``k`` visually separated regions.
    """
    if k < 1 or width < k:
        raise DomainError("need at least one column per band")
    rng = stream(seed, 0x1A)
    palette = np.array([[200, 40, 40], [40, 180, 60], [50, 60, 210], [220, 200, 40], [160, 60, 180]], dtype=float)
    if k > len(palette):
        palette = rng.uniform(0, 255, size=(k, 3))
    band = np.minimum((np.arange(width) * k) // width, k - 1)
    base = palette[band][None, :, :].repeat(height, axis=0)
    pixels = np.clip(np.rint(base + noise * rng.standard_normal(base.shape)), 0, 255).astype(np.int64)
    truth = Partition(np.tile(band, height), k=k)
    return pixels, truth
