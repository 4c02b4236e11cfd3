"""Bit planes, the dilated Canny mask, and the contour/region split.

Images are 2-D ``uint8`` arrays (rows x columns); masks are 2-D ``bool``
arrays of the same shape. Flattening is always row-major (raster order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ImageFormatError

CANNY_SIGMA = 1.4
CANNY_LOW = 0.1
CANNY_HIGH = 0.2
DILATE_RADIUS = 2


def as_image(img) -> np.ndarray:
    """Validate and return ``img`` as a 2-D uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ImageFormatError(f"expected a non-empty 2-D grayscale image, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer) or arr.min() < 0 or arr.max() > 255:
            raise ImageFormatError("pixel values must be integers in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def split_planes(img) -> tuple[np.ndarray, np.ndarray]:
    """Return the seven high planes (``pixel >> 1``) and the LSB plane."""
    img = as_image(img)
    return img >> 1, img & 1


def merge_planes(msb7, lsb) -> np.ndarray:
    msb7 = np.asarray(msb7)
    lsb = np.asarray(lsb)
    if msb7.shape != lsb.shape:
        raise ImageFormatError(f"plane shapes differ: {msb7.shape} vs {lsb.shape}")
    if msb7.size and (msb7.min() < 0 or msb7.max() > 127 or lsb.min() < 0 or lsb.max() > 1):
        raise ImageFormatError("planes out of range (msb7 in [0,127], lsb in {0,1})")
    return ((msb7.astype(np.uint8) << 1) | lsb.astype(np.uint8)).astype(np.uint8)


def _non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    # Gradient direction quantized to 0/45/90/135 degrees. A pixel survives if
    # it is >= its neighbour on the negative side and > the one on the positive
    # side, so a plateau two pixels wide keeps exactly one.
    h, w = mag.shape
    padded = np.pad(mag, 1, mode="constant")
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    out = np.zeros_like(mag, dtype=bool)

    def shifted(dr, dc):
        return padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]

    bins = [
        ((angle < 22.5) | (angle >= 157.5), (0, -1), (0, 1)),
        ((angle >= 22.5) & (angle < 67.5), (-1, -1), (1, 1)),
        ((angle >= 67.5) & (angle < 112.5), (-1, 0), (1, 0)),
        ((angle >= 112.5) & (angle < 157.5), (-1, 1), (1, -1)),
    ]
    for sel, neg, pos in bins:
        keep = (mag >= shifted(*neg)) & (mag > shifted(*pos)) & (mag > 0)
        out |= sel & keep
    return out


def canny(
    img,
    sigma: float = CANNY_SIGMA,
    low: float = CANNY_LOW,
    high: float = CANNY_HIGH,
) -> np.ndarray:
    """Canny edges on intensities scaled to [0, 1].

    Thresholds apply to the Sobel gradient magnitude of the smoothed image.
    Borders are handled by edge replication.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not 0 < low < high:
        raise ValueError(f"thresholds must satisfy 0 < low < high, got low={low}, high={high}")
    img = as_image(img).astype(np.float64) / 255.0
    smooth = ndimage.gaussian_filter(img, sigma, mode="nearest")
    gx = ndimage.sobel(smooth, axis=1, mode="nearest")
    gy = ndimage.sobel(smooth, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    thin = _non_max_suppression(mag, gx, gy)

    strong = thin & (mag >= high)
    weak = thin & (mag >= low)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return np.zeros(img.shape, dtype=bool)
    keep = np.zeros(n + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels]


def dilate(mask, radius: int = DILATE_RADIUS) -> np.ndarray:
    """Binary dilation by a (2*radius+1) square; pixels outside count as false."""
    mask = np.asarray(mask, dtype=bool)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius == 0 or not mask.any():
        return mask.copy()
    h, w = mask.shape
    padded = np.pad(mask, radius, mode="constant")
    out = np.zeros_like(mask)
    for dr in range(2 * radius + 1):
        for dc in range(2 * radius + 1):
            out |= padded[dr : dr + h, dc : dc + w]
    return out


def edge_mask(
    img,
    sigma: float = CANNY_SIGMA,
    low: float = CANNY_LOW,
    high: float = CANNY_HIGH,
    radius: int = DILATE_RADIUS,
) -> np.ndarray:
    """The dilated Canny mask that selects the contour subset."""
    return dilate(canny(img, sigma, low, high), radius)


@dataclass(frozen=True)
class Partition:
    """Raster-ordered (index, value) lists for the contour and region subsets."""

    contour_index: np.ndarray
    contour_values: np.ndarray
    region_index: np.ndarray
    region_values: np.ndarray


def partition_content(msb7, mask) -> Partition:
    msb7 = np.asarray(msb7).ravel()
    flat = np.asarray(mask, dtype=bool).ravel()
    if msb7.shape != flat.shape:
        raise ImageFormatError(f"content has {msb7.size} values but mask has {flat.size}")
    cidx = np.flatnonzero(flat)
    ridx = np.flatnonzero(~flat)
    return Partition(cidx, msb7[cidx], ridx, msb7[ridx])


def unpartition(p: Partition, width: int, height: int) -> np.ndarray:
    """Inverse of :func:`partition_content`; returns a (height, width) array."""
    n = width * height
    idx = np.concatenate([p.contour_index, p.region_index]).astype(np.int64)
    if len(p.contour_index) != len(p.contour_values) or len(p.region_index) != len(p.region_values):
        raise ImageFormatError("partition index and value lists differ in length")
    seen = np.zeros(n, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ImageFormatError("partition index outside the image")
    np.add.at(seen, idx, 1)
    if not np.all(seen == 1):
        missing = int(np.sum(seen == 0))
        dup = int(np.sum(seen > 1))
        raise ImageFormatError(f"partition does not cover the image ({missing} missing, {dup} duplicated)")
    vals = np.concatenate([p.contour_values, p.region_values])
    out = np.empty(n, dtype=np.uint8)
    out[idx] = vals
    return out.reshape(height, width)
