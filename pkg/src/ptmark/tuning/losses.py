"""The two tuning objectives and their weighted combination."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from ..errors import ConfigError
from .config import TuningConfig


def tuning_losses(z_pred: np.ndarray, z_star: np.ndarray, z_hat: np.ndarray,
                  mask: np.ndarray, cfg: TuningConfig) -> Tuple[float, float, float]:
    """(l_sem, l_wm, l_total); sum-reduced L2 semantic and masked-L1 watermark terms."""
    if not (z_pred.shape == z_star.shape == z_hat.shape == mask.shape):
        raise ConfigError(
            f"shape mismatch: pred {z_pred.shape}, star {z_star.shape}, "
            f"hat {z_hat.shape}, mask {mask.shape}")
    residual = z_star - z_pred
    l_sem = float(np.sum(residual * residual))
    l_wm = float(np.sum(np.abs(mask * (z_hat - z_pred))))
    return l_sem, l_wm, cfg.lambda1 * l_sem + cfg.lambda2 * l_wm
