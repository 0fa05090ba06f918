"""Fusion quality metrics: PSNR, SSIM and the gradient-preservation score.

No ground-truth all-in-focus image is assumed: each metric scores the fused
image against both sources and reports the mean of the two scores.  Color
images are evaluated on luminance.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import cv2
import numpy as np
from scipy.ndimage import gaussian_filter

from .focus import to_luminance

__all__ = ["MetricReport", "psnr", "ssim", "qabf", "evaluate_pair"]

PSNR_CAP_DB = 120.0

# SSIM: 11x11 Gaussian window, unit dynamic range
_SSIM_SIGMA = 1.5
_SSIM_TRUNCATE = 3.5  # radius 5 -> 11x11 window
_SSIM_C1 = 0.01**2
_SSIM_C2 = 0.03**2

# Gradient-preservation sigmoid constants, normalized so that perfect
# magnitude and orientation preservation scores exactly 1.
_QG = (0.9994, -15.0, 0.5)
_QA = (0.9879, -22.0, 0.8)

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = np.array([[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]])


def _check_pair(fused, sources):
    if len(sources) != 2:
        raise ValueError("expected exactly two source images")
    fused = np.asarray(fused, dtype=np.float64)
    a = np.asarray(sources[0], dtype=np.float64)
    b = np.asarray(sources[1], dtype=np.float64)
    for s in (a, b):
        if s.shape != fused.shape:
            raise ValueError(f"shape mismatch: {s.shape} vs {fused.shape}")
    return fused, a, b


def _psnr_single(x: np.ndarray, y: np.ndarray) -> float:
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(1.0 / mse), PSNR_CAP_DB)


def psnr(fused: np.ndarray, sources) -> float:
    """Mean PSNR against both sources, peak 1.0, capped at 120 dB."""
    fused, a, b = _check_pair(fused, sources)
    return 0.5 * (_psnr_single(fused, a) + _psnr_single(fused, b))


def _ssim_single(x: np.ndarray, y: np.ndarray) -> float:
    blur = lambda im: gaussian_filter(im, sigma=_SSIM_SIGMA, truncate=_SSIM_TRUNCATE)
    ux, uy = blur(x), blur(y)
    vxx = blur(x * x) - ux * ux
    vyy = blur(y * y) - uy * uy
    vxy = blur(x * y) - ux * uy
    num = (2.0 * ux * uy + _SSIM_C1) * (2.0 * vxy + _SSIM_C2)
    den = (ux * ux + uy * uy + _SSIM_C1) * (vxx + vyy + _SSIM_C2)
    smap = num / den
    pad = int(_SSIM_TRUNCATE * _SSIM_SIGMA + 0.5)  # filter radius
    return float(smap[pad:-pad, pad:-pad].mean())


def ssim(fused: np.ndarray, sources) -> float:
    """Mean windowed SSIM against both sources (images in [0, 1])."""
    fused, a, b = _check_pair(fused, sources)
    return 0.5 * (_ssim_single(fused, a) + _ssim_single(fused, b))


def _gradients(img: np.ndarray):
    gx = cv2.filter2D(img, -1, _SOBEL_X, borderType=cv2.BORDER_REPLICATE)
    gy = cv2.filter2D(img, -1, _SOBEL_Y, borderType=cv2.BORDER_REPLICATE)
    mag = np.hypot(gx, gy)
    ang = np.where(gx == 0.0, np.pi / 2.0, np.arctan(np.divide(gy, gx, out=np.zeros_like(gy), where=gx != 0.0)))
    return mag, ang


def _sigmoid(value, consts):
    t, k, d = consts
    raw = t / (1.0 + np.exp(k * (value - d)))
    peak = t / (1.0 + np.exp(k * (1.0 - d)))
    return raw / peak


def _preservation(g_src, a_src, g_f, a_f):
    hi = np.maximum(g_src, g_f)
    lo = np.minimum(g_src, g_f)
    ratio = np.where(hi > 0.0, lo / np.where(hi > 0.0, hi, 1.0), 1.0)
    align = 1.0 - np.abs(a_src - a_f) / (np.pi / 2.0)
    return _sigmoid(ratio, _QG) * _sigmoid(align, _QA)


def qabf(fused: np.ndarray, sources) -> float:
    """Edge-information preservation score in [0, 1].

    Sobel gradient magnitude/orientation preservation from each source to the
    fused image, sigmoid-weighted and normalized by the source edge strengths.
    """
    fused, a, b = _check_pair(fused, sources)
    g_a, ang_a = _gradients(a)
    g_b, ang_b = _gradients(b)
    g_f, ang_f = _gradients(fused)
    q_af = _preservation(g_a, ang_a, g_f, ang_f)
    q_bf = _preservation(g_b, ang_b, g_f, ang_f)
    den = float(np.sum(g_a + g_b))
    if den == 0.0:
        return 0.0
    return float(np.sum(q_af * g_a + q_bf * g_b) / den)


def evaluate_pair(fused: np.ndarray, a: np.ndarray, b: np.ndarray) -> dict[str, float]:
    """All three metrics for one fused result; color inputs go through luma."""
    f, la, lb = to_luminance(fused), to_luminance(a), to_luminance(b)
    return {
        "qabf": qabf(f, (la, lb)),
        "ssim": ssim(f, (la, lb)),
        "psnr": psnr(f, (la, lb)),
    }


@dataclass
class MetricReport:
    """Per-image metric values plus dataset means, serializable to JSON/CSV."""

    per_image: dict[str, dict[str, float]] = field(default_factory=dict)

    HEADER = {
        "psnr_cap_db": PSNR_CAP_DB,
        "ssim_window": 11,
        "ssim_sigma": _SSIM_SIGMA,
        "ssim_c1": _SSIM_C1,
        "ssim_c2": _SSIM_C2,
        "qabf_sigmoids": {"magnitude": _QG, "orientation": _QA},
    }

    def add(self, image_id: str, values: dict[str, float]):
        self.per_image[image_id] = dict(values)

    def means(self) -> dict[str, float]:
        if not self.per_image:
            return {}
        keys = next(iter(self.per_image.values())).keys()
        return {
            k: float(np.mean([v[k] for v in self.per_image.values()])) for k in keys
        }

    def to_json(self) -> str:
        return json.dumps(
            {
                "constants": self.HEADER,
                "per_image": self.per_image,
                "means": self.means(),
            },
            indent=2,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["image_id", "qabf", "ssim", "psnr"])
        for image_id, vals in sorted(self.per_image.items()):
            writer.writerow(
                [image_id, f"{vals['qabf']:.6f}", f"{vals['ssim']:.6f}", f"{vals['psnr']:.6f}"]
            )
        means = self.means()
        if means:
            writer.writerow(
                ["mean", f"{means['qabf']:.6f}", f"{means['ssim']:.6f}", f"{means['psnr']:.6f}"]
            )
        return buf.getvalue()
