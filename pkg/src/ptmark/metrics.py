"""PSNR, SSIM and a 3-scale MS-SSIM for [0, 1] single-channel images."""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from .errors import ConfigError

PSNR_CAP_DB = 100.0

_WINDOW_SIZE = 11
_WINDOW_SIGMA = 1.5
_C1 = 0.01 ** 2
_C2 = 0.03 ** 2
# First three scales of the standard five-scale weighting, renormalized.
_MS_WEIGHTS = np.array([0.0448, 0.2856, 0.3001])
_MS_WEIGHTS = _MS_WEIGHTS / _MS_WEIGHTS.sum()


def _check_pair(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if a.shape != b.shape:
        raise ConfigError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 3:
        if a.shape[0] != 1:
            raise ConfigError(f"expected single-channel images, got {a.shape}")
        return a[0], b[0]
    if a.ndim != 2:
        raise ConfigError(f"expected (1, H, W) or (H, W) images, got {a.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """10 log10(1 / MSE) on the [0, 1] range, capped at 100 dB."""
    pa, pb = _check_pair(a, b)
    mse = float(np.mean((pa - pb) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(1.0 / mse), PSNR_CAP_DB)


def _gauss_window() -> np.ndarray:
    t = np.arange(_WINDOW_SIZE) - (_WINDOW_SIZE - 1) / 2.0
    k = np.exp(-0.5 * (t / _WINDOW_SIGMA) ** 2)
    return k / k.sum()


_WINDOW_1D = _gauss_window()


def _filter_valid(img: np.ndarray) -> np.ndarray:
    """Separable Gaussian filter, valid region only."""
    n = _WINDOW_SIZE
    h, w = img.shape
    rows = np.zeros((h, w - n + 1))
    for k in range(n):
        rows += _WINDOW_1D[k] * img[:, k:k + w - n + 1]
    out = np.zeros((h - n + 1, rows.shape[1]))
    for k in range(n):
        out += _WINDOW_1D[k] * rows[k:k + h - n + 1, :]
    return out


def _ssim_components(pa: np.ndarray, pb: np.ndarray) -> Tuple[float, float]:
    """Mean luminance term and mean contrast-structure term over valid windows."""
    if min(pa.shape) < _WINDOW_SIZE:
        raise ConfigError(f"images too small for an {_WINDOW_SIZE}x{_WINDOW_SIZE} window: {pa.shape}")
    mu_a = _filter_valid(pa)
    mu_b = _filter_valid(pb)
    var_a = _filter_valid(pa * pa) - mu_a * mu_a
    var_b = _filter_valid(pb * pb) - mu_b * mu_b
    cov = _filter_valid(pa * pb) - mu_a * mu_b
    lum = (2 * mu_a * mu_b + _C1) / (mu_a ** 2 + mu_b ** 2 + _C1)
    cs = (2 * cov + _C2) / (var_a + var_b + _C2)
    return float(np.mean(lum * cs)), float(np.mean(cs))


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Structural similarity with an 11x11 Gaussian window, sigma 1.5."""
    pa, pb = _check_pair(a, b)
    return _ssim_components(pa, pb)[0]


def _downsample2(img: np.ndarray) -> np.ndarray:
    h, w = img.shape
    return img[:h - h % 2, :w - w % 2].reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def msssim(a: np.ndarray, b: np.ndarray) -> float:
    """3-scale MS-SSIM: contrast-structure at coarse scales, full SSIM last."""
    pa, pb = _check_pair(a, b)
    scales = len(_MS_WEIGHTS)
    if min(pa.shape) < _WINDOW_SIZE * 2 ** (scales - 1):
        raise ConfigError(f"images too small for {scales}-scale MS-SSIM: {pa.shape}")
    value = 1.0
    for level in range(scales):
        full, cs = _ssim_components(pa, pb)
        term = full if level == scales - 1 else cs
        value *= max(term, 0.0) ** _MS_WEIGHTS[level]
        if level < scales - 1:
            pa, pb = _downsample2(pa), _downsample2(pb)
    return float(value)
