"""RGB to color-name conversion.

The color name space has one probability channel per basic color term.
Conversion goes through a 32768-entry lookup table indexed by the 5-bit
quantized RGB value, ``idx = R//8 + 32*(G//8) + 1024*(B//8)``.
"""
from __future__ import annotations

import functools
import os
import re
from pathlib import Path

import numpy as np

N_NAMES = 11
N_BINS = 32 * 32 * 32
ROW_TOLERANCE = 1e-4

COLOR_NAMES = (
    "black", "blue", "brown", "grey", "green", "orange",
    "pink", "purple", "red", "white", "yellow",
)

# RGB prototype of each color name, in [0, 1]; row i-1 is color name i.
PROTOTYPES = np.array(
    [
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.4, 0.25],
        [0.5, 0.5, 0.5],
        [0.0, 1.0, 0.0],
        [1.0, 0.8, 0.0],
        [1.0, 0.5, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 1.0],
        [1.0, 1.0, 0.0],
    ]
)
PROTOTYPES.setflags(write=False)

FALLBACK_TEMPERATURE = 0.15

_SPLIT = re.compile(r"[,\s]+")


class TableError(ValueError):
    """Raised when a lookup-table file is malformed."""


def _validate(table: np.ndarray, source: str) -> np.ndarray:
    if table.shape != (N_BINS, N_NAMES):
        raise TableError(f"{source}: row count/shape {table.shape}, expected ({N_BINS}, {N_NAMES})")
    bad = np.flatnonzero(~np.isfinite(table).all(axis=1) | (table < 0).any(axis=1) | (table > 1).any(axis=1))
    if bad.size:
        raise TableError(f"{source}: row {bad[0] + 1} has entries outside [0, 1]")
    sums = table.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOLERANCE)
    if bad.size:
        raise TableError(f"{source}: row {bad[0] + 1} not normalized (sum {sums[bad[0]]:.6g})")
    table = np.ascontiguousarray(table, dtype=np.float64)
    table.setflags(write=False)
    return table


def load_table(path: str | os.PathLike) -> np.ndarray:
    """Load and validate a color-name lookup table.

    The file holds one row per RGB bin, 11 space- or comma-separated
    probabilities per row. Rows with 14 columns (the published layout, which
    prefixes each row with the bin's R, G, B values) are accepted and the
    leading three columns dropped.
    """
    path = Path(path)
    rows = []
    with path.open("r", encoding="ascii", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = [tok for tok in _SPLIT.split(line) if tok]
            if len(fields) == N_NAMES + 3:
                fields = fields[3:]
            if len(fields) != N_NAMES:
                raise TableError(f"{path}: row {lineno} has {len(fields)} columns, expected {N_NAMES}")
            try:
                rows.append([float(tok) for tok in fields])
            except ValueError as exc:
                raise TableError(f"{path}: row {lineno} unparseable: {exc}") from exc
    if len(rows) != N_BINS:
        raise TableError(f"{path}: row count {len(rows)}, expected {N_BINS}")
    return _validate(np.array(rows, dtype=np.float64), str(path))


def save_table(path: str | os.PathLike, table: np.ndarray) -> None:
    np.savetxt(path, table, fmt="%.10f", delimiter=" ")


def bin_centers() -> np.ndarray:
    """RGB center of each table bin, scaled to [0, 1], shape ``(32768, 3)``."""
    idx = np.arange(N_BINS)
    q = np.stack([idx % 32, (idx // 32) % 32, idx // 1024], axis=1)
    return (q * 8 + 3.5) / 255.0


@functools.lru_cache(maxsize=4)
def fallback_table(temperature: float = FALLBACK_TEMPERATURE) -> np.ndarray:
    """Softmax over negative squared distances to the prototype colors.

    Stands in for the published table when it is unavailable; it is an
    approximation of real color naming, not a substitute for it.
    """
    centers = bin_centers()
    d2 = ((centers[:, None, :] - PROTOTYPES[None, :, :]) ** 2).sum(axis=2)
    logits = -d2 / temperature
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    table = w / w.sum(axis=1, keepdims=True)
    table.setflags(write=False)
    return table


def bin_index(img: np.ndarray) -> np.ndarray:
    """Table row index of every pixel of an ``(H, W, 3)`` uint8 image."""
    q = np.asarray(img, dtype=np.int64) // 8
    return q[..., 0] + 32 * q[..., 1] + 1024 * q[..., 2]


def to_prob_field(img: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Per-pixel color-name probabilities, shape ``(11, H, W)``."""
    probs = table[bin_index(img)]
    return np.ascontiguousarray(np.moveaxis(probs, -1, 0))


def to_index_image(img: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Most probable color name per pixel, 1-based; ties go to the lowest index."""
    row_argmax = np.argmax(table, axis=1).astype(np.uint8) + 1
    return row_argmax[bin_index(img)]


def histogram(index_image: np.ndarray) -> np.ndarray:
    """Frequency of each color name, shape ``(11,)``, summing to 1."""
    counts = np.bincount(np.asarray(index_image).ravel(), minlength=N_NAMES + 1)[1 : N_NAMES + 1]
    return counts / counts.sum()


def indicator_matrices(index_image: np.ndarray) -> np.ndarray:
    """One boolean mask per color name, shape ``(11, H, W)``."""
    names = np.arange(1, N_NAMES + 1, dtype=index_image.dtype)
    return index_image[None, :, :] == names[:, None, None]
