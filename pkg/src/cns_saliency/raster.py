"""Pixel buffers, image I/O, resizing and range normalization.

Images are plain numpy arrays throughout the package:

* RGB images are ``uint8`` arrays of shape ``(H, W, 3)``.
* Gray fields are ``float64`` arrays of shape ``(H, W)``.
* Boolean maps are ``bool`` arrays of shape ``(H, W)``.
"""
from __future__ import annotations

import io
import os
import tempfile
from pathlib import Path

import cv2
import numpy as np
from PIL import Image, UnidentifiedImageError


class DecodeError(ValueError):
    """Raised when an encoded image cannot be decoded."""


class ContractError(ValueError):
    """Raised when an input violates a documented precondition."""


_FORMATS = {b"\x89PNG": "PNG", b"\xff\xd8": "JPEG", b"BM": "BMP"}


def _sniff_format(data: bytes) -> str:
    for magic, name in _FORMATS.items():
        if data.startswith(magic):
            return name
    return "unknown"


def decode_image(data: bytes) -> np.ndarray:
    """Decode a PNG, JPEG or BMP byte stream into an ``(H, W, 3)`` uint8 array.

    Grayscale and palette sources are expanded to three channels and alpha
    is dropped.
    """
    fmt = _sniff_format(data)
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            rgb = im.convert("RGB")
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode {fmt} image: {exc}") from exc
    return np.asarray(rgb, dtype=np.uint8).copy()


def read_image(path: str | os.PathLike) -> np.ndarray:
    return decode_image(Path(path).read_bytes())


def read_gray(path: str | os.PathLike) -> np.ndarray:
    """Read an image file as a single-channel uint8 array."""
    data = Path(path).read_bytes()
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            gray = im.convert("L")
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode {_sniff_format(data)} image {path}: {exc}") from exc
    return np.asarray(gray, dtype=np.uint8).copy()


def write_gray_png(path: str | os.PathLike, values: np.ndarray) -> None:
    """Write an 8-bit single-channel PNG atomically (temp file + rename)."""
    path = Path(path)
    arr = np.asarray(values)
    if arr.dtype != np.uint8:
        raise ContractError(f"expected uint8 map, got {arr.dtype}")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.stem}.", suffix=".png")
    try:
        with os.fdopen(fd, "wb") as fh:
            Image.fromarray(arr, mode="L").save(fh, format="PNG")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def resized_height(height: int, width: int, target: int) -> int:
    return max(1, int(np.floor(height * target / width + 0.5)))


def resize_to_width(img: np.ndarray, target: int) -> np.ndarray:
    """Bilinear resize to ``target`` columns, preserving aspect ratio."""
    if target < 1:
        raise ContractError(f"target width must be >= 1, got {target}")
    h, w = img.shape[:2]
    if w == target:
        return img.copy()
    new_h = resized_height(h, w, target)
    return cv2.resize(img, (target, new_h), interpolation=cv2.INTER_LINEAR)


def resize_to_shape(field: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Bilinear resize of a 2-D field to ``(height, width)``."""
    h, w = shape
    if field.shape[:2] == (h, w):
        return field.copy()
    return cv2.resize(field, (w, h), interpolation=cv2.INTER_LINEAR)


def normalize_minmax(values: np.ndarray, out_range: tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """Affinely map ``[min, max]`` of ``values`` onto ``out_range``.

    A constant input carries no contrast and yields an all-``lo`` field.
    """
    lo, hi = out_range
    f = np.asarray(values, dtype=np.float64)
    fmin = f.min()
    fmax = f.max()
    if fmax <= fmin:
        return np.full(f.shape, lo, dtype=np.float64)
    out = (f - fmin) / (fmax - fmin) * (hi - lo) + lo
    # exact endpoints despite rounding
    out[f == fmax] = hi
    return np.clip(out, lo, hi, out=out)


def is_constant(values: np.ndarray) -> bool:
    return bool(np.ptp(values) == 0)


def round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """Map a [0, 1] field to uint8 via ``round(255 * v)`` with halves rounded up."""
    f = np.asarray(values, dtype=np.float64)
    if f.size and (f.min() < 0.0 or f.max() > 1.0 or np.isnan(f).any()):
        raise ContractError(
            f"quantize_u8 expects values in [0, 1], got [{f.min()}, {f.max()}]"
        )
    return round_half_up(255.0 * f).astype(np.uint8)
