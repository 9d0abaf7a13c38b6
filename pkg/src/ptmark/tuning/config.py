"""Hyperparameters for semantic-aware pivotal tuning."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError


@dataclass(frozen=True)
class TuningConfig:
    """Loss weights, iteration budget and optimizer settings.

    ``lambda1`` weighs the semantic alignment term, ``lambda2`` the
    watermark-preservation term; both losses are sum-reduced.  ``start_step``
    indexes the sampled ladder from the noise end: steps before it skip
    optimization and follow the watermarked trajectory unchanged.
    """

    lambda1: float = 1.50
    lambda2: float = 0.0007
    n_iters: int = 10
    guidance_w: float = 7.5
    lr: float = 0.01
    saliency_q: float = 0.20
    start_step: int = 0
    optimizer: str = "adam"   # "adam" or "sgd" (plain gradient descent)
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ConfigError(f"loss weights must be nonnegative, got "
                              f"({self.lambda1}, {self.lambda2})")
        if self.n_iters < 0:
            raise ConfigError(f"n_iters must be >= 0, got {self.n_iters}")
        if not (0.0 < self.saliency_q < 1.0):
            raise ConfigError(f"saliency_q must be in (0, 1), got {self.saliency_q}")
        if self.start_step < 0:
            raise ConfigError(f"start_step must be >= 0, got {self.start_step}")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
