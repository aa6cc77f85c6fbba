"""Global color-name cues: frequency masks and contrast weights."""
from __future__ import annotations

import numpy as np

from cns_saliency.attention import stack_maps
from cns_saliency.colorname import PROTOTYPES
from cns_saliency.postprocess import post_process
from cns_saliency.raster import ContractError, normalize_minmax


def contrast_weights(freqs: np.ndarray, prototypes: np.ndarray = PROTOTYPES) -> np.ndarray:
    """Frequency-weighted squared RGB distance of each name to all others.

    Names absent from the image (zero frequency) get weight 0.
    """
    f = np.asarray(freqs, dtype=np.float64)
    c = np.asarray(prototypes, dtype=np.float64)
    d2 = ((c[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)
    w = d2 @ f
    w[f == 0] = 0.0
    return w


def weighted_mean_attention(
    maps: np.ndarray, indicators: np.ndarray, weights: np.ndarray, freqs: np.ndarray
) -> np.ndarray:
    """Weighted sum of normalized ``(f_i * M_i) * A_i`` terms, rescaled to [0, 1]."""
    a = stack_maps(maps)
    m = stack_maps(indicators)
    if a.shape != m.shape:
        raise ContractError(f"attention maps {a.shape} and indicators {m.shape} differ")
    total = np.zeros(a.shape[1:], dtype=np.float64)
    for i in range(a.shape[0]):
        if weights[i] == 0:
            continue
        term = (freqs[i] * m[i]) * a[i]
        total += weights[i] * normalize_minmax(term, (0.0, 1.0))
    return normalize_minmax(total, (0.0, 1.0))


def weighted_saliency(weighted_attention: np.ndarray, omega_r: int, saturation_ratio: float, gamma: float) -> np.ndarray:
    return post_process(weighted_attention, omega_r, saturation_ratio, gamma)
