"""Saliency mask: where the watermarked and original latents differ most.

A quantile mask over the box-blurred, channel-summed absolute difference
replaces a pretrained segmenter.  The mask is binary, deterministic, covers
at most a ``q`` fraction of cells (up to quantile-tie rounding) and is
broadcast across channels.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

_ZERO_DIFF_TOL = 1e-9


def _box_blur3(plane: np.ndarray) -> np.ndarray:
    padded = np.pad(plane, 1, mode="reflect")
    h, w = plane.shape
    acc = np.zeros_like(plane)
    for di in range(3):
        for dj in range(3):
            acc += padded[di:di + h, dj:dj + w]
    return acc / 9.0


def saliency_mask(z_hat: np.ndarray, z_star: np.ndarray, q: float) -> np.ndarray:
    """Binary (C, H, W) mask of the top-q blurred difference cells."""
    if z_hat.shape != z_star.shape:
        raise ConfigError(f"shape mismatch: {z_hat.shape} vs {z_star.shape}")
    if not (0.0 < q < 1.0):
        raise ConfigError(f"q must be in (0, 1), got {q}")
    c, h, w = z_hat.shape
    diff = np.abs(z_hat - z_star).sum(axis=0)
    if diff.max() < _ZERO_DIFF_TOL:
        return np.zeros((c, h, w))
    blurred = _box_blur3(diff)
    k = int(round(q * h * w))
    positive = blurred > 0.0
    if positive.sum() <= k:
        plane = positive
    else:
        threshold = np.partition(blurred.ravel(), -k)[-k]
        plane = blurred >= threshold
        if plane.sum() > k + 2:
            # Quantile ties blew past the budget; fall back to a stable top-k.
            order = np.argsort(-blurred.ravel(), kind="stable")[:k]
            flat = np.zeros(h * w, dtype=bool)
            flat[order] = True
            plane = flat.reshape(h, w)
    return np.broadcast_to(plane.astype(float), (c, h, w)).copy()
