"""Exact Euclidean distance transforms and signed-distance mask ensembling."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ._backend import edt_sq
from .errors import DataError, ShapeError

SDF_MEAN = "sdf_mean"
PIXEL_MEAN = "pixel_mean"
MODES = (SDF_MEAN, PIXEL_MEAN)

# signed distances are summed in fixed point so the sign of the mean does not
# depend on summation order
_FIXED_SCALE = float(1 << 32)


def _as_mask(mask) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2 or mask.size == 0:
        raise ShapeError(f"mask must be a non-empty 2D array, got shape {mask.shape}")
    return np.ascontiguousarray(mask.astype(bool, copy=False))


def clamp_distance(shape) -> int:
    h, w = shape
    return w + h


def squared_distance_transform(mask) -> np.ndarray:
    """Exact squared distance (int64) from each pixel to the nearest foreground pixel.

    With no foreground at all every entry is ``(width + height) ** 2``.
    """
    mask = _as_mask(mask)
    if not mask.any():
        return np.full(mask.shape, clamp_distance(mask.shape) ** 2, dtype=np.int64)
    return np.asarray(edt_sq(mask.view(np.uint8)))


def distance_transform(mask) -> np.ndarray:
    """Euclidean distance to the nearest foreground pixel, in pixels."""
    return np.sqrt(squared_distance_transform(mask).astype(np.float64))


def signed_distance(mask) -> np.ndarray:
    """Positive inside the foreground (distance to background), negative outside."""
    mask = _as_mask(mask)
    c = clamp_distance(mask.shape)
    if mask.all():
        return np.full(mask.shape, float(c))
    if not mask.any():
        return np.full(mask.shape, -float(c))
    inside = distance_transform(~mask)
    outside = distance_transform(mask)
    return np.where(mask, inside, -outside)


def average_merge(masks: Sequence, mode: str = SDF_MEAN) -> np.ndarray:
    """Fuse an ensemble of binary masks into one.

    ``sdf_mean`` averages signed distance maps and keeps pixels whose mean is
    >= 0. ``pixel_mean`` is a plain vote: foreground where at least half the
    masks agree.
    """
    if mode not in MODES:
        raise ValueError(f"unknown fusion mode {mode!r}; expected one of {MODES}")
    masks = [_as_mask(m) for m in masks]
    if not masks:
        raise DataError("cannot merge an empty list of masks")
    shape = masks[0].shape
    for k, m in enumerate(masks[1:], start=1):
        if m.shape != shape:
            raise ShapeError(f"mask {k} has shape {m.shape}, expected {shape}")

    if mode == PIXEL_MEAN:
        votes = np.sum([m.astype(np.int64) for m in masks], axis=0)
        return 2 * votes >= len(masks)

    total = np.zeros(shape, dtype=np.int64)
    for m in masks:
        total += np.rint(signed_distance(m) * _FIXED_SCALE).astype(np.int64)
    return total >= 0
