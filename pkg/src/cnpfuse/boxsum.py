"""Windowed sums with border truncation, in O(M*N) independent of radius."""

from __future__ import annotations

import numpy as np

__all__ = ["box_sum"]


def box_sum(values: np.ndarray, radius: int) -> np.ndarray:
    """Sum of ``values`` over the (2r+1)^2 window at each pixel.

    Windows are clipped at the borders (no padding, no normalization).  Uses a
    summed-area table, so the cost does not depend on the radius.  Integer
    inputs are accumulated in int64 and stay exact.
    """
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError("values must be a 2-D matrix")
    acc = np.int64 if np.issubdtype(values.dtype, np.integer) else np.float64
    m, n = values.shape

    sat = np.zeros((m + 1, n + 1), dtype=acc)
    np.cumsum(np.cumsum(values, axis=0, dtype=acc), axis=1, out=sat[1:, 1:])

    rows = np.arange(m)[:, None]
    cols = np.arange(n)[None, :]
    r0 = np.clip(rows - radius, 0, m)
    r1 = np.clip(rows + radius + 1, 0, m)
    c0 = np.clip(cols - radius, 0, n)
    c1 = np.clip(cols + radius + 1, 0, n)
    return sat[r1, c1] - sat[r0, c1] - sat[r1, c0] + sat[r0, c0]
