"""Fusion of the two saliency maps and the end-to-end detector."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from cns_saliency import colorname
from cns_saliency.attention import master_attention_maps, mean_attention_map
from cns_saliency.morphology import fill_holes_gray
from cns_saliency.postprocess import adjust, post_process
from cns_saliency.raster import ContractError, quantize_u8, resize_to_shape, resize_to_width, round_half_up
from cns_saliency.weighted import contrast_weights, weighted_mean_attention, weighted_saliency

PROCESSING_WIDTH = 400
PARAM_NAMES = ("delta", "omega_c", "omega_r", "theta_r", "theta_g")


@dataclass(frozen=True)
class ParamSet:
    """The five tunables.

    delta: threshold sample step; omega_c: closing disk radius; omega_r:
    reconstruction disk radius; theta_r: saturation ratio; theta_g: gamma.
    """

    delta: int = 8
    omega_c: int = 14
    omega_r: int = 14
    theta_r: float = 0.02
    theta_g: float = 1.5

    def __post_init__(self):
        for name in ("delta", "omega_c", "omega_r"):
            value = getattr(self, name)
            if float(value) != int(value):
                raise ContractError(f"{name} must be an integer, got {value}")
            object.__setattr__(self, name, int(value))
        object.__setattr__(self, "theta_r", float(self.theta_r))
        object.__setattr__(self, "theta_g", float(self.theta_g))
        if not 1 <= self.delta <= 255:
            raise ContractError(f"delta must be in [1, 255], got {self.delta}")
        if self.omega_c < 1 or self.omega_r < 1:
            raise ContractError(f"omega_c and omega_r must be >= 1, got {self.omega_c}, {self.omega_r}")
        if not 0 < self.theta_r <= 0.1:
            raise ContractError(f"theta_r must be in (0, 0.1], got {self.theta_r}")
        if not 1 <= self.theta_g <= 3:
            raise ContractError(f"theta_g must be in [1, 3], got {self.theta_g}")

    def replace(self, **changes) -> "ParamSet":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


PRESETS = {
    "asd": ParamSet(8, 11, 13, 0.04, 1.8),
    "ecssd": ParamSet(16, 9, 17, 0.04, 2.2),
    "imgsal": ParamSet(32, 18, 9, 0.003, 2.0),
    "common": ParamSet(8, 14, 14, 0.02, 1.5),
}


def truncated_mean(s: np.ndarray, s_w: np.ndarray) -> np.ndarray:
    """``min(s + s_w, 255) / 2``; the result lies in [0, 127.5]."""
    s = np.asarray(s, dtype=np.float64)
    s_w = np.asarray(s_w, dtype=np.float64)
    if s.shape != s_w.shape:
        raise ContractError(f"saliency maps differ in shape: {s.shape} vs {s_w.shape}")
    return np.minimum(s + s_w, 255.0) / 2.0


def final_refine(s_bar: np.ndarray, theta_r: float, theta_g: float) -> np.ndarray:
    g = adjust(round_half_up(s_bar), theta_r, theta_g)
    return quantize_u8(fill_holes_gray(g))


class Stages(NamedTuple):
    """Intermediate products of one detection run at processing resolution."""

    resized: np.ndarray
    master_maps: np.ndarray
    mean_attention: np.ndarray
    saliency: np.ndarray
    index_image: np.ndarray
    freqs: np.ndarray
    weights: np.ndarray
    weighted_attention: np.ndarray
    weighted_saliency: np.ndarray
    mean_saliency: np.ndarray
    refined: np.ndarray


def run_stages(
    img: np.ndarray,
    params: ParamSet,
    table: np.ndarray | None = None,
    *,
    threads: int | None = 1,
    channel_scaling: str = "minmax",
    width: int = PROCESSING_WIDTH,
) -> Stages:
    if table is None:
        table = colorname.fallback_table()
    resized = resize_to_width(img, width)

    probs = colorname.to_prob_field(resized, table)
    masters = master_attention_maps(
        probs, params.delta, params.omega_c, scaling=channel_scaling, threads=threads
    )
    mean_att = mean_attention_map(masters)
    s = post_process(mean_att, params.omega_r, params.theta_r, params.theta_g)

    index_image = colorname.to_index_image(resized, table)
    freqs = colorname.histogram(index_image)
    weights = contrast_weights(freqs)
    indicators = colorname.indicator_matrices(index_image)
    weighted_att = weighted_mean_attention(masters, indicators, weights, freqs)
    s_w = weighted_saliency(weighted_att, params.omega_r, params.theta_r, params.theta_g)

    s_bar = truncated_mean(s, s_w)
    refined = final_refine(s_bar, params.theta_r, params.theta_g)
    return Stages(resized, masters, mean_att, s, index_image, freqs, weights, weighted_att, s_w, s_bar, refined)


def detect(
    img: np.ndarray,
    params: ParamSet = PRESETS["common"],
    table: np.ndarray | None = None,
    *,
    threads: int | None = 1,
    channel_scaling: str = "minmax",
) -> np.ndarray:
    """Saliency map of an RGB image as uint8, at the image's own dimensions.

    Falls back to :func:`colorname.fallback_table` when ``table`` is None.
    """
    stages = run_stages(img, params, table, threads=threads, channel_scaling=channel_scaling)
    out = resize_to_shape(stages.refined, img.shape[:2])
    return np.asarray(out, dtype=np.uint8)
