"""Surroundedness attention maps over the color name channels."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from cns_saliency import morphology
from cns_saliency.raster import ContractError, normalize_minmax

CHANNEL_SCALINGS = ("minmax", "fixed")


def thresholds(step: int) -> np.ndarray:
    """Threshold grid ``0, step, 2*step, ...`` up to 255 inclusive."""
    if not 1 <= step <= 255:
        raise ContractError(f"sample step must be in [1, 255], got {step}")
    return np.arange(0, 256, step, dtype=np.float64)


def attention_from_boolean(bmap: np.ndarray, omega_c: int) -> np.ndarray:
    """Close, fill holes, then drop everything touching the image border."""
    closed = morphology.close(bmap, omega_c)
    filled = morphology.fill_holes_binary(closed)
    return morphology.suppress_border_components(filled)


def _attention_counts(channel: np.ndarray, step: int, omega_c: int) -> np.ndarray:
    """Per-pixel number of surviving attention maps, direct and complemented."""
    levels = np.unique(channel)
    grid = thresholds(step)
    # thresholds that leave the same set of levels above them give the same map
    cut = np.searchsorted(levels, grid, side="right")
    counts = np.zeros(channel.shape, dtype=np.int32)
    memo: dict[int, np.ndarray] = {}
    for theta, k in zip(grid, cut):
        k = int(k)
        if k not in memo:
            bmap = morphology.threshold(channel, theta)
            pair = attention_from_boolean(bmap, omega_c).astype(np.int32)
            pair += attention_from_boolean(morphology.complement(bmap), omega_c)
            memo[k] = pair
        counts += memo[k]
    return counts


def scale_channel(channel: np.ndarray, scaling: str = "minmax") -> np.ndarray:
    """Bring one probability channel to [0, 255] for thresholding.

    ``"minmax"`` stretches the channel's own range (a constant channel maps
    to all zeros); ``"fixed"`` multiplies by 255.
    """
    if scaling == "minmax":
        return normalize_minmax(channel, (0.0, 255.0))
    if scaling == "fixed":
        return np.asarray(channel, dtype=np.float64) * 255.0
    raise ValueError(f"unknown channel scaling {scaling!r}; expected one of {CHANNEL_SCALINGS}")


def master_attention_map(channel: np.ndarray, step: int, omega_c: int) -> np.ndarray:
    """Average of all direct and complemented attention maps of one channel.

    ``channel`` must already be scaled to [0, 255]. Values lie in [0, 1].
    """
    n = len(thresholds(step))
    return _attention_counts(np.asarray(channel, dtype=np.float64), step, omega_c) / (2.0 * n)


def master_attention_maps(
    prob_field: np.ndarray,
    step: int,
    omega_c: int,
    *,
    scaling: str = "minmax",
    threads: int | None = 1,
) -> np.ndarray:
    """Master attention map of every channel of an ``(11, H, W)`` field.

    Channels are independent; with ``threads > 1`` they are computed
    concurrently. Each channel accumulates integer counts, so the result does
    not depend on the thread count.
    """
    channels = [scale_channel(c, scaling) for c in prob_field]

    def one(ch):
        return master_attention_map(ch, step, omega_c)

    if threads is not None and threads <= 1:
        maps = [one(ch) for ch in channels]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            maps = list(pool.map(one, channels))
    return np.stack(maps)


def stack_maps(maps) -> np.ndarray:
    """Stack 2-D maps into one array, rejecting mismatched dimensions."""
    shapes = {np.shape(m) for m in maps}
    if len(shapes) != 1:
        raise ContractError(f"maps have mismatched dimensions: {sorted(shapes)}")
    stacked = np.asarray([np.asarray(m, dtype=np.float64) for m in maps])
    if stacked.ndim != 3:
        raise ContractError(f"expected 2-D maps, got shape {stacked.shape[1:]}")
    return stacked


def mean_attention_map(maps) -> np.ndarray:
    return stack_maps(maps).mean(axis=0)


def morphology_call_count(step: int, n_channels: int = 11) -> int:
    """Number of boolean maps the sweep processes per image (before memoization)."""
    return 2 * len(thresholds(step)) * n_channels
