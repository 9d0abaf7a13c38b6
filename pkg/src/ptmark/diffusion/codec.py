"""Invertible latent/image codec: 2x2 pixel shuffle plus an affine range map.

Latent channel c of cell (i, j) lands at image pixel (2i + c//2, 2j + c%2);
values map through v -> (v + 4) / 8 and clamp to [0, 1].  Encode inverts the
unclamped map exactly, so round trips are bit-exact for latents within
[-4, 4].
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

LATENT_RANGE = 4.0


def decode(z: np.ndarray) -> np.ndarray:
    """Latent (4, H, W) -> image (1, 2H, 2W) in [0, 1]."""
    if z.ndim != 3 or z.shape[0] != 4:
        raise ConfigError(f"decode expects a (4, H, W) latent, got {z.shape}")
    _, h, w = z.shape
    x = np.empty((1, 2 * h, 2 * w))
    x[0, 0::2, 0::2] = z[0]
    x[0, 0::2, 1::2] = z[1]
    x[0, 1::2, 0::2] = z[2]
    x[0, 1::2, 1::2] = z[3]
    return np.clip((x + LATENT_RANGE) / (2 * LATENT_RANGE), 0.0, 1.0)


def encode(x: np.ndarray) -> np.ndarray:
    """Image (1, 2H, 2W) -> latent (4, H, W); exact inverse of the affine map."""
    if x.ndim != 3 or x.shape[0] != 1 or x.shape[1] % 2 or x.shape[2] % 2:
        raise ConfigError(f"encode expects a (1, 2H, 2W) image, got {x.shape}")
    v = x * (2 * LATENT_RANGE) - LATENT_RANGE
    z = np.empty((4, x.shape[1] // 2, x.shape[2] // 2))
    z[0] = v[0, 0::2, 0::2]
    z[1] = v[0, 0::2, 1::2]
    z[2] = v[0, 1::2, 0::2]
    z[3] = v[0, 1::2, 1::2]
    return z
