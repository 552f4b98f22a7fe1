"""Early fusion of an RGB image and a GRF image into a 4-channel tensor.

Tensors are float32 arrays of shape ``(4, height, width)`` in channel order
R, G, B, GRF with values in [0, 1].
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import FormatError, ShapeError

RAW_MAGIC = b"GRF4"
RAW_VERSION = 1
_RAW_HEADER = struct.Struct("<4sHHII")


def _as_rgb(rgb) -> np.ndarray:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ShapeError(f"expected an (H, W, 3) RGB array, got shape {rgb.shape}")
    return rgb.astype(np.uint8, copy=False)


def to_greyscale(image) -> np.ndarray:
    """Luma ``round(0.299 R + 0.587 G + 0.114 B)``; 2D input passes through."""
    image = np.asarray(image)
    if image.ndim == 2:
        return image.astype(np.uint8, copy=False)
    rgb = _as_rgb(image).astype(np.int64)
    luma = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return luma.astype(np.uint8)


def merge_rgb_grf(rgb, grf) -> np.ndarray:
    """Stack RGB and GRF planes (GRF last) and scale by 1/255."""
    rgb = _as_rgb(rgb)
    grf = to_greyscale(grf)
    if rgb.shape[:2] != grf.shape:
        h, w = rgb.shape[:2]
        gh, gw = grf.shape
        raise ShapeError(f"RGB image is {w}x{h} but GRF image is {gw}x{gh}")
    planes = np.concatenate([np.moveaxis(rgb, 2, 0), grf[None]], axis=0)
    return planes.astype(np.float32) / np.float32(255.0)


def _check_tensor(tensor) -> np.ndarray:
    tensor = np.asarray(tensor, dtype=np.float32)
    if tensor.ndim != 3 or tensor.shape[0] != 4:
        raise ShapeError(f"expected a (4, H, W) tensor, got shape {tensor.shape}")
    if tensor.size and (tensor.min() < 0.0 or tensor.max() > 1.0):
        raise ValueError("tensor values must lie in [0, 1]")
    return tensor


def quantize(tensor) -> np.ndarray:
    """8-bit (H, W, 4) view of a tensor, rounding to the nearest level."""
    tensor = _check_tensor(tensor)
    return np.moveaxis(np.rint(tensor * 255.0), 0, 2).astype(np.uint8)


def write_fused_png(tensor, path) -> None:
    Image.fromarray(quantize(tensor)).save(path, format="PNG")


def read_fused_png(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode != "RGBA":
            raise FormatError(f"{path}: expected 4 channels (RGBA), got mode {im.mode}")
        data = np.asarray(im, dtype=np.uint8)
    return np.moveaxis(data, 2, 0).astype(np.float32) / np.float32(255.0)


def raw_tensor_bytes(tensor) -> bytes:
    tensor = _check_tensor(tensor)
    _, h, w = tensor.shape
    header = _RAW_HEADER.pack(RAW_MAGIC, RAW_VERSION, 0, w, h)
    return header + np.ascontiguousarray(tensor, dtype="<f4").tobytes()


def export_raw_tensor(tensor, path) -> None:
    """Write the ``.grf4`` format: 16-byte little-endian header, then float32 planes."""
    Path(path).write_bytes(raw_tensor_bytes(tensor))


def read_raw_tensor(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _RAW_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, _, w, h = _RAW_HEADER.unpack_from(data)
    if magic != RAW_MAGIC or version != RAW_VERSION:
        raise FormatError(f"{path}: not a version-{RAW_VERSION} GRF4 file")
    expected = _RAW_HEADER.size + 4 * 4 * w * h
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(data)}")
    planes = np.frombuffer(data, dtype="<f4", offset=_RAW_HEADER.size)
    return planes.reshape(4, h, w).astype(np.float32)
