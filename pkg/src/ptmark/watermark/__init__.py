"""Fourier-ring watermarking: key generation, embedding, verification, AUC."""

from .detect import DEFAULT_THRESHOLD, VerificationReport, auc, score_pvalue, verify
from .embedder import embed_watermark, extract_watermark
from .key import (
    DEFAULT_CHANNEL,
    DEFAULT_RADIUS,
    WatermarkKey,
    key_from_dict,
    key_to_dict,
    keygen,
)

__all__ = [
    "WatermarkKey",
    "keygen",
    "key_to_dict",
    "key_from_dict",
    "embed_watermark",
    "extract_watermark",
    "score_pvalue",
    "verify",
    "auc",
    "VerificationReport",
    "DEFAULT_RADIUS",
    "DEFAULT_CHANNEL",
    "DEFAULT_THRESHOLD",
]
