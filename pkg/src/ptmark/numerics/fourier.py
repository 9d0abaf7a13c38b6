"""Radix-2 2-D FFT and spectrum-centering helpers.

Grid dimensions are restricted to powers of two, which keeps the transform a
plain iterative Cooley-Tukey without a mixed-radix planner.  The forward
transform is unnormalized; the inverse carries the full 1/(H*W) factor.
"""

from __future__ import annotations

import numpy as np


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def _fft_last_axis(x: np.ndarray, inverse: bool) -> np.ndarray:
    n = x.shape[-1]
    y = np.ascontiguousarray(x[..., _bit_reverse_indices(n)], dtype=np.complex128)
    sign = 1.0 if inverse else -1.0
    half = 1
    while half < n:
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / (2 * half))
        y = y.reshape(y.shape[:-1] + (n // (2 * half), 2, half))
        lo = y[..., 0, :]
        hi = y[..., 1, :] * tw
        y = np.stack((lo + hi, lo - hi), axis=-2).reshape(y.shape[:-3] + (n,))
        half *= 2
    return y


def fft2(grid: np.ndarray, inverse: bool = False) -> np.ndarray:
    """2-D FFT of a (H, W) grid; H and W must each be a power of two.

    ``inverse=True`` applies the conjugate transform and divides by H*W, so
    ``fft2(fft2(g), inverse=True)`` reproduces ``g``.
    """
    if grid.ndim != 2:
        raise ValueError(f"expected a 2-D grid, got shape {grid.shape}")
    h, w = grid.shape
    if not (_is_pow2(h) and _is_pow2(w)):
        raise ValueError(f"grid dimensions must be powers of two >= 2, got {h}x{w}")
    out = _fft_last_axis(grid, inverse)
    out = _fft_last_axis(out.T, inverse).T
    if inverse:
        out = out / (h * w)
    return out


def center_spectrum(spec: np.ndarray) -> np.ndarray:
    """Shift the zero-frequency bin to (H//2, W//2)."""
    h, w = spec.shape
    return np.roll(spec, (h // 2, w // 2), axis=(0, 1))


def uncenter_spectrum(spec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`center_spectrum`."""
    h, w = spec.shape
    return np.roll(spec, (-(h // 2), -(w // 2)), axis=(0, 1))


def rotate90_about_origin(grid: np.ndarray) -> np.ndarray:
    """Modular 90-degree rotation with the DFT origin as fixed point.

    Maps ``g[i, j] -> g[j, (-i) mod H]``, so the spectrum permutes as
    ``G(u, v) -> G(v, -u)`` with no phase factor.  This is the exact rotation
    under which ring-constant spectral patterns are invariant.
    """
    h, w = grid.shape
    if h != w:
        raise ValueError("rotation requires a square grid")
    i = np.arange(h)[:, None]
    j = np.arange(w)[None, :]
    return grid[j, (-i) % h]
