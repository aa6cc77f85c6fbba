"""Post-processing of attention maps into saliency maps.

The chain is: normalize, smooth by reconstruction, rescale to integer
levels, histogram-driven intensity adjustment, grayscale hole filling.
"""
from __future__ import annotations

import numpy as np

from cns_saliency import morphology
from cns_saliency.raster import ContractError, normalize_minmax, quantize_u8, round_half_up

# guards the cumulative-count comparison against rounding in (1 - ratio) * N
_CUM_EPS = 1e-9


def gray_histogram(levels: np.ndarray) -> np.ndarray:
    """256-bin histogram of an integer-valued field in [0, 255]."""
    v = np.asarray(levels)
    if v.size and (v.min() < 0 or v.max() > 255):
        raise ContractError(f"levels must lie in [0, 255], got [{v.min()}, {v.max()}]")
    return np.bincount(v.astype(np.int64).ravel(), minlength=256)


def truncation_threshold(hist: np.ndarray, saturation_ratio: float) -> int:
    """Smallest level ``k`` whose cumulative count reaches ``(1 - ratio) * N``."""
    hist = np.asarray(hist)
    total = hist.sum()
    if total < 1:
        raise ContractError("histogram is empty")
    cum = np.cumsum(hist)
    need = (1.0 - saturation_ratio) * total
    return int(np.argmax(cum >= need - _CUM_EPS * total))


def adjust(levels: np.ndarray, saturation_ratio: float, gamma: float) -> np.ndarray:
    """Clip at the truncation threshold and apply a power-law curve.

    Each level ``v`` maps to ``(min(v, T) / T) ** gamma`` in [0, 1], where
    ``T`` comes from :func:`truncation_threshold`. When ``T`` is 0 every
    nonzero level saturates to 1 and zeros stay 0.
    """
    v = np.asarray(levels, dtype=np.float64)
    t = truncation_threshold(gray_histogram(v), saturation_ratio)
    if t == 0:
        return (v > 0).astype(np.float64)
    return (np.minimum(v, t) / t) ** gamma


def post_process(attention: np.ndarray, omega_r: int, saturation_ratio: float, gamma: float) -> np.ndarray:
    """Turn a mean attention map into a uint8 saliency map."""
    s = normalize_minmax(attention, (0.0, 1.0))
    s = morphology.smooth_by_reconstruction(s, omega_r)
    s = round_half_up(normalize_minmax(s, (0.0, 255.0)))
    s = adjust(s, saturation_ratio, gamma)
    s = morphology.fill_holes_gray(s)
    return quantize_u8(s)
