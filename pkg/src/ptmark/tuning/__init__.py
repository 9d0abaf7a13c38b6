"""Semantic-aware pivotal tuning of per-step null embeddings."""

from .config import TuningConfig
from .losses import tuning_losses
from .optimize import LossRecord, TuneResult, embedding_grad, pivotal_tune
from .saliency import saliency_mask

__all__ = [
    "TuningConfig",
    "saliency_mask",
    "tuning_losses",
    "embedding_grad",
    "pivotal_tune",
    "TuneResult",
    "LossRecord",
]
