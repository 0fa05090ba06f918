"""PNG/JPEG loading and lossless PNG output."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

__all__ = ["load_image", "save_png"]


def load_image(path: str | Path) -> np.ndarray:
    """Read an image as uint8/uint16 array, grayscale (M,N) or RGB (M,N,3)."""
    with Image.open(path) as img:
        if img.mode in ("L", "RGB"):
            return np.asarray(img)
        if img.mode in ("I;16", "I"):
            return np.asarray(img, dtype=np.uint16)
        return np.asarray(img.convert("RGB"))


def save_png(path: str | Path, array: np.ndarray):
    """Write a uint8 gray/RGB or uint16 gray array as PNG."""
    array = np.asarray(array)
    if array.dtype == np.uint16:
        if array.ndim != 2:
            raise ValueError("16-bit output must be single-channel")
        img = Image.fromarray(array)
    elif array.dtype == np.uint8:
        img = Image.fromarray(array)
    else:
        raise ValueError(f"unsupported dtype for PNG output: {array.dtype}")
    img.save(path, format="PNG")
