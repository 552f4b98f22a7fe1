"""PNG helpers for greyscale GRFs, RGB inputs and binary masks."""
from pathlib import Path

import numpy as np
from PIL import Image

from .tensorfuse import to_greyscale

MASK_THRESHOLD = 128
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def write_grey_png(image, path) -> None:
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(path, format="PNG")


def read_grey_png(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode in ("RGB", "RGBA"):
            return to_greyscale(np.asarray(im.convert("RGB")))
        return np.asarray(im.convert("L"), dtype=np.uint8)


def read_rgb(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def write_rgb_png(image, path) -> None:
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(path, format="PNG")


def read_mask(path) -> np.ndarray:
    """Load an 8-bit mask; pixels >= 128 are foreground."""
    return read_grey_png(path) >= MASK_THRESHOLD


def write_mask(mask, path) -> None:
    write_grey_png(np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8), path)


def list_images(directory, suffixes=(".png",)) -> dict[str, Path]:
    """Map file name -> path for image files directly inside ``directory``."""
    return {
        p.name: p
        for p in sorted(Path(directory).iterdir())
        if p.is_file() and p.suffix.lower() in suffixes
    }
