"""Sum-modified Laplacian focus features used as lattice input."""

from __future__ import annotations

import numpy as np

from .boxsum import box_sum

__all__ = ["to_luminance", "modified_laplacian", "sml"]

# ITU-R BT.601 luma weights
_LUMA = np.array([0.299, 0.587, 0.114])


def to_luminance(image: np.ndarray) -> np.ndarray:
    """Convert a 1- or 3-channel raster to a [0, 1] luminance plane.

    Integer samples are normalized by their dtype range; float samples must
    already be in [0, 1].
    """
    raw = np.asarray(image)
    if raw.ndim == 3 and raw.shape[2] == 1:
        raw = raw[:, :, 0]
    if raw.ndim == 3:
        if raw.shape[2] != 3:
            raise ValueError(f"unsupported channel count: {raw.shape[2]}")
        arr = raw.astype(np.float64) @ _LUMA
    elif raw.ndim == 2:
        arr = raw.astype(np.float64)
    else:
        raise ValueError(f"expected a 2-D or 3-D raster, got ndim={raw.ndim}")

    if raw.dtype.kind in "ui":
        arr = arr / float(np.iinfo(raw.dtype).max)
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite samples")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("float samples must lie in [0, 1]")
    return arr


def modified_laplacian(image: np.ndarray, step: int = 1) -> np.ndarray:
    """Absolute second differences along both axes, replicate-padded edges."""
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2-D luminance image")
    if min(img.shape) < 2 * step + 1:
        raise ValueError("image too small for the requested step")
    pad = np.pad(img, step, mode="edge")
    center = 2.0 * img
    vert = np.abs(center - pad[: -2 * step, step:-step] - pad[2 * step :, step:-step])
    horz = np.abs(center - pad[step:-step, : -2 * step] - pad[step:-step, 2 * step :])
    return vert + horz


def sml(image: np.ndarray, step: int = 1, window: int = 3) -> np.ndarray:
    """Modified Laplacian summed over a window, truncated at borders."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    ml = modified_laplacian(image, step=step)
    if window == 1:
        return ml
    return box_sum(ml, window // 2)
