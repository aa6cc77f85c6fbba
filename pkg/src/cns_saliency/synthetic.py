"""Synthetic single-object scenes with known ground truth.

Objects and backgrounds are painted in prototype colors without
anti-aliasing, so every image contains exactly two RGB values.
"""
from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from cns_saliency.colorname import PROTOTYPES


@dataclass
class Scene:
    image: np.ndarray
    mask: np.ndarray
    object_color: int
    background_color: int


def prototype_rgb(index: int) -> tuple[int, int, int]:
    """uint8 RGB of color name ``index`` (1-based)."""
    r, g, b = np.floor(PROTOTYPES[index - 1] * 255 + 0.5).astype(int)
    return int(r), int(g), int(b)


def _pick_colors(rng: np.random.Generator) -> tuple[int, int]:
    obj, bg = rng.choice(np.arange(1, 12), size=2, replace=False)
    return int(obj), int(bg)


def _paint(mask: np.ndarray, obj: int, bg: int) -> np.ndarray:
    img = np.empty(mask.shape + (3,), dtype=np.uint8)
    img[...] = prototype_rgb(bg)
    img[mask] = prototype_rgb(obj)
    return img


def _convex_mask(rng, height, width, area_range, margin):
    target = rng.uniform(*area_range) * height * width
    kind = rng.integers(3)
    angle = rng.uniform(0, 180)
    aspect = rng.uniform(0.6, 1.0)
    cx = width / 2 + rng.uniform(-0.1, 0.1) * width
    cy = height / 2 + rng.uniform(-0.1, 0.1) * height
    canvas = np.zeros((height, width), dtype=np.uint8)
    if kind == 0:  # ellipse
        a = np.sqrt(target / (np.pi * aspect))
        cv2.ellipse(canvas, (int(cx), int(cy)), (int(a), int(a * aspect)), angle, 0, 360, 1, -1)
    elif kind == 1:  # rotated rectangle
        a = np.sqrt(target / aspect)
        box = cv2.boxPoints(((cx, cy), (a, a * aspect), angle)).astype(np.int32)
        cv2.fillConvexPoly(canvas, box, 1)
    else:  # regular-ish convex polygon
        k = int(rng.integers(5, 9))
        r = np.sqrt(2 * target / (k * np.sin(2 * np.pi / k)))
        t = np.linspace(0, 2 * np.pi, k, endpoint=False) + np.deg2rad(angle)
        pts = np.stack([cx + r * np.cos(t), cy + aspect * r * np.sin(t)], axis=1).astype(np.int32)
        cv2.fillConvexPoly(canvas, cv2.convexHull(pts), 1)
    mask = canvas.astype(bool)
    inner = mask[margin:-margin, margin:-margin]
    if inner.sum() != mask.sum():
        return None
    frac = mask.mean()
    if not area_range[0] <= frac <= area_range[1]:
        return None
    return mask


def centered_object(
    rng: np.random.Generator,
    height: int = 300,
    width: int = 400,
    area_range: tuple[float, float] = (0.10, 0.40),
    margin: int = 4,
) -> Scene:
    """One uniform convex object that stays ``margin`` pixels clear of the border."""
    while True:
        mask = _convex_mask(rng, height, width, area_range, margin)
        if mask is not None:
            break
    obj, bg = _pick_colors(rng)
    return Scene(_paint(mask, obj, bg), mask, obj, bg)


def border_object(rng: np.random.Generator, height: int = 300, width: int = 400) -> Scene:
    """A uniform rectangle flush with one image edge."""
    side = int(rng.integers(4))
    depth = int(rng.integers(height // 4, height // 2))
    span0 = int(rng.integers(width // 8, width // 3))
    span1 = span0 + int(rng.integers(width // 4, width // 2))
    mask = np.zeros((height, width), dtype=bool)
    if side == 0:
        mask[:depth, span0:span1] = True
    elif side == 1:
        mask[height - depth :, span0:span1] = True
    elif side == 2:
        mask[span0 * height // width : span1 * height // width, :depth] = True
    else:
        mask[span0 * height // width : span1 * height // width, width - depth :] = True
    obj, bg = _pick_colors(rng)
    return Scene(_paint(mask, obj, bg), mask, obj, bg)


def small_objects(
    rng: np.random.Generator, radius: int, count: int = 3, height: int = 300, width: int = 400
) -> Scene:
    """Several same-colored discs of a given radius, spread over the image."""
    canvas = np.zeros((height, width), dtype=np.uint8)
    xs = np.linspace(width * 0.2, width * 0.8, count)
    for x in xs:
        y = height / 2 + rng.uniform(-0.15, 0.15) * height
        cv2.circle(canvas, (int(x), int(y)), radius, 1, -1)
    mask = canvas.astype(bool)
    obj, bg = _pick_colors(rng)
    return Scene(_paint(mask, obj, bg), mask, obj, bg)
