"""Watermark embedding into and extraction from the initial latent."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from ..errors import ConfigError
from ..numerics import center_spectrum, fft2, uncenter_spectrum
from .key import WatermarkKey

_IMAG_RESIDUAL_TOL = 1e-9


def embed_watermark(z_T: np.ndarray, key: WatermarkKey) -> np.ndarray:
    """Overwrite the key channel's masked Fourier coefficients with the pattern.

    Conjugate symmetry of the pattern keeps the inverse transform real; the
    imaginary residual is checked against 1e-9 and discarded.  All other
    channels and all unmasked coefficients are untouched.
    """
    if z_T.ndim != 3 or z_T.shape[1:] != (key.height, key.width) or key.channel >= z_T.shape[0]:
        raise ConfigError(f"latent shape {z_T.shape} does not match key "
                          f"({key.channel}, {key.height}, {key.width})")
    out = z_T.copy()
    spectrum = center_spectrum(fft2(out[key.channel]))
    spectrum[key.mask] = key.pattern[key.mask]
    back = fft2(uncenter_spectrum(spectrum), inverse=True)
    residual = float(np.abs(back.imag).max())
    if residual > _IMAG_RESIDUAL_TOL:
        raise ConfigError(f"imaginary residual {residual:.3e} exceeds {_IMAG_RESIDUAL_TOL}")
    out[key.channel] = back.real
    return out


def extract_watermark(z_T_est: np.ndarray, key: WatermarkKey) -> Tuple[np.ndarray, float]:
    """Extract the masked spectrum and the per-component variance estimate.

    Returns ``(y, sigma2)`` where ``y`` holds the centered FFT of the key
    channel at the mask coordinates and ``sigma2`` is the mean of
    (re^2 + im^2) / 2 over every non-DC spectrum entry -- the variance of a
    single real component under the Gaussian null.
    """
    if z_T_est.ndim != 3 or z_T_est.shape[1:] != (key.height, key.width):
        raise ConfigError(f"latent shape {z_T_est.shape} does not match key "
                          f"({key.height}, {key.width})")
    spectrum = center_spectrum(fft2(z_T_est[key.channel]))
    y = spectrum[key.mask]
    non_dc = np.ones((key.height, key.width), dtype=bool)
    non_dc[key.height // 2, key.width // 2] = False
    vals = spectrum[non_dc]
    sigma2 = float(np.mean((vals.real**2 + vals.imag**2) / 2.0))
    return y, sigma2
