"""PNG image I/O: sRGB-encoded 8/16-bit color images, binary masks, edge maps.

Color images live on disk gamma-encoded; every reader returns linear RGB
float64 in [0, 1] and every writer encodes from linear.  Masks and edge maps
are single-channel 8-bit PNGs holding {0, 255}; soft (anti-aliased) masks are
kept as-is on disk and binarized at 0.5 on ingest.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .color import srgb_decode, srgb_encode
from .errors import ValidationError

__all__ = [
    "read_image",
    "write_image",
    "read_mask_soft",
    "read_mask",
    "binarize_mask",
    "write_mask",
    "read_edge_map",
    "write_edge_map",
]


def read_image(path) -> np.ndarray:
    """Read an 8- or 16-bit sRGB PNG and return linear RGB float64 (H, W, 3)."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise OSError(f"cannot read image: {path}")
    if raw.ndim == 2:
        raw = raw[:, :, None].repeat(3, axis=2)
    if raw.shape[2] == 4:
        raw = raw[:, :, :3]
    if raw.dtype == np.uint8:
        encoded = raw.astype(np.float64) / 255.0
    elif raw.dtype == np.uint16:
        encoded = raw.astype(np.float64) / 65535.0
    else:
        raise ValidationError(f"unsupported image dtype {raw.dtype} in {path}")
    return srgb_decode(encoded[:, :, ::-1])  # BGR -> RGB


def write_image(path, linear: np.ndarray, bit_depth: int = 16) -> None:
    """Encode linear RGB to sRGB and write a PNG; values outside [0,1] clamp."""
    if linear.ndim != 3 or linear.shape[2] != 3:
        raise ValidationError(f"expected (H, W, 3) linear image, got shape {linear.shape}")
    if bit_depth not in (8, 16):
        raise ValidationError(f"bit_depth must be 8 or 16, got {bit_depth}")
    encoded = srgb_encode(linear)
    scale = 255 if bit_depth == 8 else 65535
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    quantized = np.round(encoded * scale).astype(dtype)
    if not cv2.imwrite(str(path), quantized[:, :, ::-1]):
        raise OSError(f"cannot write image: {path}")


def read_mask_soft(path) -> np.ndarray:
    """Read a single-channel mask PNG as float64 in [0, 1] without thresholding."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise OSError(f"cannot read mask: {path}")
    if raw.ndim == 3:
        raw = raw[:, :, 0]
    peak = 255.0 if raw.dtype == np.uint8 else 65535.0
    return raw.astype(np.float64) / peak


def binarize_mask(soft: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Threshold a soft mask into uint8 {0, 1}."""
    return (np.asarray(soft, dtype=np.float64) >= threshold).astype(np.uint8)


def read_mask(path) -> np.ndarray:
    """Read a mask PNG and binarize at 0.5, returning uint8 {0, 1}."""
    return binarize_mask(read_mask_soft(path))


def write_mask(path, mask: np.ndarray) -> None:
    """Write a mask as single-channel 8-bit PNG; binary input maps to {0, 255}."""
    m = np.asarray(mask, dtype=np.float64)
    if m.ndim != 2:
        raise ValidationError(f"expected (H, W) mask, got shape {m.shape}")
    if np.any(m < 0) or np.any(m > 1):
        raise ValidationError("mask values must lie in [0, 1]")
    if not cv2.imwrite(str(path), np.round(m * 255).astype(np.uint8)):
        raise OSError(f"cannot write mask: {path}")


def read_edge_map(path) -> np.ndarray:
    """Read an edge map PNG as uint8 {0, 1}."""
    return read_mask(path)


def write_edge_map(path, edges: np.ndarray) -> None:
    """Write a binary edge map as single-channel PNG {0, 255}."""
    write_mask(path, np.asarray(edges, dtype=np.uint8))


def copy_bytes(src, dst) -> None:
    """Byte-exact file copy (keeps soft masks lossless on disk)."""
    Path(dst).write_bytes(Path(src).read_bytes())
