"""Deterministic numerical kernels: FFT, seeded RNG, special functions."""

from .finitediff import central_difference, relative_error
from .fourier import (
    center_spectrum,
    fft2,
    rotate90_about_origin,
    uncenter_spectrum,
)
from .rng import SeededRng, derive_seed, gaussian_grid
from .special import noncentral_chi2_cdf, reg_lower_incomplete_gamma

__all__ = [
    "SeededRng",
    "derive_seed",
    "gaussian_grid",
    "fft2",
    "center_spectrum",
    "uncenter_spectrum",
    "rotate90_about_origin",
    "reg_lower_incomplete_gamma",
    "noncentral_chi2_cdf",
    "central_difference",
    "relative_error",
]
