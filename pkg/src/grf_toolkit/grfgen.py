"""Gaussian random field synthesis from metadata-derived parameters.

White complex Gaussian noise is shaped by a power-law amplitude
``(kx^2 + ky^2 + eps) ** (exponent / 4)``, i.e. spectral power
``|k| ** exponent``, and brought back to the spatial domain with an inverse
2D DFT. The real part is standardised and quantised to 8-bit greyscale.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np

from .errors import DataError
from .metadata import (
    Category,
    MetadataRecord,
    NormalizationStats,
    dob_to_scalar,
    encode_gender,
    hdd_lookup,
    minmax_apply,
)
from .rng import MASK64, standard_normals

CATEGORY_SEEDS = {
    Category.DOB: 76539635,
    Category.GENDER: 88118546,
    Category.HDD: 41094303,
}

EPS = 1e-10
DEFAULT_WIDTH, DEFAULT_HEIGHT = 640, 480


@dataclass(frozen=True)
class GrfParams:
    seed: int
    i: int
    f: float
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT

    def __post_init__(self):
        if not 0 <= int(self.seed) <= MASK64:
            raise ValueError(f"seed out of u64 range: {self.seed}")
        if int(self.i) != self.i or self.i < 1:
            raise ValueError(f"i must be an integer >= 1, got {self.i}")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"f must lie in [0, 1], got {self.f}")
        if self.width < 2 or self.height < 2:
            raise ValueError(f"field must be at least 2x2, got {self.width}x{self.height}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RadialSpectrum:
    k: np.ndarray
    power: np.ndarray

    def slope(self, kmin: float, kmax: float) -> float:
        """Least-squares log-log slope over bins with ``kmin <= k <= kmax``."""
        sel = (self.k >= kmin) & (self.k <= kmax) & (self.power > 0)
        if sel.sum() < 2:
            raise ValueError("fewer than two bins in the fit range")
        return float(np.polyfit(np.log(self.k[sel]), np.log(self.power[sel]), 1)[0])


def category_seed(category) -> int:
    return CATEGORY_SEEDS[Category(category)]


def power_exponent(i: int, f: float) -> float:
    return -abs(i + f)


def frequency_indices(n: int) -> np.ndarray:
    """DFT frequency indices 0, 1, ..., ceil(n/2)-1, -floor(n/2), ..., -1."""
    return np.concatenate([np.arange(0, (n + 1) // 2), np.arange(-(n // 2), 0)]).astype(np.int64)


def frequency_grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer ``(kx, ky)`` grids of shape ``(height, width)``."""
    kx, ky = np.meshgrid(frequency_indices(width), frequency_indices(height))
    return kx, ky


def spectral_field(seed: int, exponent: float, width: int, height: int) -> np.ndarray:
    """Shape seeded complex white noise by ``|k| ** exponent`` power and invert.

    Normals are consumed in row-major pixel order, real part before
    imaginary. The DC term is zeroed and the real part standardised.
    """
    z = standard_normals(seed, 2 * width * height)
    noise = (z[0::2] + 1j * z[1::2]).reshape(height, width)
    kx, ky = frequency_grid(width, height)
    k2 = (kx * kx + ky * ky).astype(np.float64)
    noise *= (k2 + EPS) ** (exponent / 4.0)
    noise[0, 0] = 0.0
    field = np.fft.ifft2(noise).real
    field -= field.mean()
    sd = field.std()
    if sd > 0:
        field /= sd
    return field


def synthesize_field(params: GrfParams) -> np.ndarray:
    """Standardised GRF of shape ``(height, width)`` for ``params``."""
    return spectral_field(params.seed, power_exponent(params.i, params.f), params.width, params.height)


def field_to_greyscale(field: np.ndarray) -> np.ndarray:
    """Per-field min-max to [0, 255], rounding halves away from zero."""
    field = np.asarray(field, dtype=np.float64)
    if not np.all(np.isfinite(field)):
        raise DataError("field contains non-finite values")
    lo, hi = field.min(), field.max()
    if lo == hi:
        return np.full(field.shape, 128, dtype=np.uint8)
    scaled = (field - lo) / (hi - lo) * 255.0
    return np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)


def radial_power_spectrum(field: np.ndarray, bin_count: int = 64) -> RadialSpectrum:
    """Mean squared DFT magnitude in annuli of radial frequency.

    Bins are equal-width over ``(0, min(width, height) / 2]``; the DC term and
    empty bins are dropped. ``k`` is the mean radius of each bin's members.
    """
    if bin_count < 4:
        raise ValueError("bin_count must be >= 4")
    field = np.asarray(field, dtype=np.float64)
    h, w = field.shape
    power = np.abs(np.fft.fft2(field)) ** 2
    kx, ky = frequency_grid(w, h)
    kr = np.sqrt((kx * kx + ky * ky).astype(np.float64))
    kmax = min(w, h) / 2.0
    sel = (kr > 0) & (kr <= kmax)
    # right-closed bins (e_j, e_j+1]
    idx = np.clip(np.ceil(kr[sel] / kmax * bin_count).astype(np.int64) - 1, 0, bin_count - 1)
    n = np.bincount(idx, minlength=bin_count)
    ksum = np.bincount(idx, weights=kr[sel], minlength=bin_count)
    psum = np.bincount(idx, weights=power[sel], minlength=bin_count)
    keep = n > 0
    return RadialSpectrum(k=ksum[keep] / n[keep], power=psum[keep] / n[keep])


def total_variation_per_pixel(field: np.ndarray) -> float:
    """Mean absolute difference over all horizontal and vertical neighbour pairs."""
    field = np.asarray(field, dtype=np.float64)
    dx = np.abs(np.diff(field, axis=1))
    dy = np.abs(np.diff(field, axis=0))
    return float((dx.sum() + dy.sum()) / (dx.size + dy.size))


def category_value(category, record: MetadataRecord, postcode_table: Mapping[str, int] | None = None) -> float:
    """Raw scalar for a category: DOB timestamp, HDD decile or gender code."""
    category = Category(category)
    if category is Category.DOB:
        if record.dob is None:
            raise DataError(f"{record.image_id}: no date of birth")
        return dob_to_scalar(record.dob)
    if category is Category.GENDER:
        if record.gender is None:
            raise DataError(f"{record.image_id}: no gender")
        return encode_gender(record.gender).value
    if record.hdd is not None:
        return float(record.hdd)
    if record.postcode and postcode_table is not None:
        return float(hdd_lookup(record.postcode, postcode_table))
    raise DataError(f"{record.image_id}: no HDD value and no postcode table to look one up")


def grf_params_for_record(
    category,
    record: MetadataRecord,
    norm: NormalizationStats | None,
    i: int = 2,
    dims: tuple[int, int] = (DEFAULT_WIDTH, DEFAULT_HEIGHT),
    seed: int | None = None,
    postcode_table: Mapping[str, int] | None = None,
) -> GrfParams:
    category = Category(category)
    base = category_seed(category) if seed is None else int(seed)
    value = category_value(category, record, postcode_table)
    if category is Category.GENDER:
        # f stays 0 for binary data; the encoded value shifts the seed instead
        return GrfParams(seed=base + int(value), i=i, f=0.0, width=dims[0], height=dims[1])
    if norm is None:
        raise DataError(f"{category.value}: normalisation stats required")
    f = minmax_apply(norm, value, category).value
    return GrfParams(seed=base, i=i, f=f, width=dims[0], height=dims[1])


def grf_for_record(category, record, norm, i=2, dims=(DEFAULT_WIDTH, DEFAULT_HEIGHT), seed=None, postcode_table=None):
    params = grf_params_for_record(category, record, norm, i, dims, seed, postcode_table)
    return field_to_greyscale(synthesize_field(params))

