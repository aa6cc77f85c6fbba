"""Binary and grayscale morphology on 2-D numpy arrays.

Connectivity conventions: foreground components and reconstruction
neighbourhoods are 8-connected; background in hole filling is 4-connected.
"""
from __future__ import annotations

import functools

import cv2
import numpy as np

from cns_saliency import _kernels
from cns_saliency.raster import ContractError


@functools.lru_cache(maxsize=64)
def disk(radius: int) -> np.ndarray:
    """Flat disk structuring element: offsets with ``dx**2 + dy**2 <= radius**2``."""
    if radius < 0:
        raise ContractError(f"disk radius must be >= 0, got {radius}")
    yy, xx = np.mgrid[-radius : radius + 1, -radius : radius + 1]
    se = (xx * xx + yy * yy <= radius * radius).astype(np.uint8)
    se.setflags(write=False)
    return se


def disk_offsets(radius: int) -> list[tuple[int, int]]:
    rows, cols = np.nonzero(disk(radius))
    return [(int(c) - radius, int(r) - radius) for r, c in zip(rows, cols)]


def threshold(values: np.ndarray, theta: float) -> np.ndarray:
    """Boolean map of ``values > theta``."""
    return np.asarray(values) > theta


def complement(bmap: np.ndarray) -> np.ndarray:
    return ~np.asarray(bmap, dtype=bool)


def close(bmap: np.ndarray, radius: int) -> np.ndarray:
    """Binary closing with a disk; outside the image counts as background."""
    if radius < 1:
        raise ContractError(f"closing radius must be >= 1, got {radius}")
    pad = radius + 1
    padded = cv2.copyMakeBorder(
        np.asarray(bmap, dtype=np.uint8), pad, pad, pad, pad, cv2.BORDER_CONSTANT, value=0
    )
    se = disk(radius)
    dilated = cv2.dilate(padded, se, borderType=cv2.BORDER_CONSTANT, borderValue=0)
    closed = cv2.erode(dilated, se, borderType=cv2.BORDER_CONSTANT, borderValue=0)
    return closed[pad:-pad, pad:-pad].astype(bool)


def fill_holes_binary(bmap: np.ndarray) -> np.ndarray:
    """Set every background region not 4-connected to the border to foreground."""
    b = np.asarray(bmap, dtype=np.uint8)
    # a one-pixel background frame joins every border-touching background region
    work = cv2.copyMakeBorder(b, 1, 1, 1, 1, cv2.BORDER_CONSTANT, value=0)
    cv2.floodFill(work, None, (0, 0), 2, flags=4)
    return work[1:-1, 1:-1] != 2


def suppress_border_components(bmap: np.ndarray) -> np.ndarray:
    """Remove every 8-connected foreground component that touches the border."""
    b = np.asarray(bmap, dtype=np.uint8)
    work = cv2.copyMakeBorder(b, 1, 1, 1, 1, cv2.BORDER_CONSTANT, value=1)
    cv2.floodFill(work, None, (0, 0), 0, flags=8)
    return work[1:-1, 1:-1].astype(bool)


def reconstruct(marker: np.ndarray, mask: np.ndarray, connectivity: int = 8) -> np.ndarray:
    """Grayscale reconstruction by dilation of ``marker`` under ``mask``.

    Returns the exact fixpoint of iterated unit geodesic dilation, so that
    ``marker <= result <= mask`` everywhere.

    Raises
    ------
    ContractError
        If shapes differ or ``marker`` exceeds ``mask`` anywhere.
    """
    marker = np.ascontiguousarray(marker, dtype=np.float64)
    mask = np.ascontiguousarray(mask, dtype=np.float64)
    if marker.shape != mask.shape or marker.ndim != 2:
        raise ContractError(f"marker {marker.shape} and mask {mask.shape} must be equal 2-D shapes")
    if (marker > mask).any():
        raise ContractError("reconstruction marker exceeds mask")
    prev, allnb = _kernels.neighbourhood(connectivity)
    return _kernels.reconstruct_dilation(marker, mask, prev, allnb)


def reconstruct_erosion(marker: np.ndarray, mask: np.ndarray, connectivity: int = 8) -> np.ndarray:
    """Dual of :func:`reconstruct`: requires ``marker >= mask``."""
    # negation is exact in floating point, so the duality holds bit for bit
    return -reconstruct(-np.asarray(marker, dtype=np.float64), -np.asarray(mask, dtype=np.float64), connectivity)


def erode_gray(values: np.ndarray, radius: int) -> np.ndarray:
    # cv2's default erosion border is +inf, so only in-image pixels count
    return cv2.erode(np.asarray(values, dtype=np.float64), disk(radius))


def dilate_gray(values: np.ndarray, radius: int) -> np.ndarray:
    return cv2.dilate(np.asarray(values, dtype=np.float64), disk(radius))


def smooth_by_reconstruction(values: np.ndarray, radius: int) -> np.ndarray:
    """Opening-by-reconstruction followed by closing-by-reconstruction.

    Bright and dark details the disk cannot fit inside are removed while
    larger regions keep their shape and height. The closing pass is the
    complement-erode-reconstruct-complement sequence written in its dual form
    (dilate, then reconstruct by erosion), which avoids ``1 - (1 - x)``
    rounding.
    """
    if radius < 1:
        raise ContractError(f"reconstruction radius must be >= 1, got {radius}")
    f = np.asarray(values, dtype=np.float64)
    opened = reconstruct(erode_gray(f, radius), f)
    return reconstruct_erosion(dilate_gray(opened, radius), opened)


def fill_holes_gray(values: np.ndarray) -> np.ndarray:
    """Raise dark regions not connected to the border to their surrounding level."""
    f = np.asarray(values, dtype=np.float64)
    if f.size == 0:
        return f.copy()
    marker = np.full_like(f, f.max())
    marker[0, :] = f[0, :]
    marker[-1, :] = f[-1, :]
    marker[:, 0] = f[:, 0]
    marker[:, -1] = f[:, -1]
    return reconstruct_erosion(marker, f, connectivity=4)
