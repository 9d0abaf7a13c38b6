"""Deterministic prompt embeddings.

A prompt is hashed to a seed and expanded to a unit-norm Gaussian vector;
the null (unconditional) embedding is the zero vector.  This stands in for a
text encoder while keeping every experiment replayable from strings.
"""

from __future__ import annotations

import numpy as np

from ..numerics import SeededRng, derive_seed

EMBED_DIM = 32
_PROMPT_NAMESPACE = 0x9E3779B97F4A7C15


def prompt_embed(prompt: str, dim: int = EMBED_DIM) -> np.ndarray:
    """Unit-normalized seeded Gaussian vector for a UTF-8 prompt."""
    rng = SeededRng(derive_seed(_PROMPT_NAMESPACE, prompt))
    v = rng.normal((dim,))
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


def null_embed(dim: int = EMBED_DIM) -> np.ndarray:
    """The zero unconditional embedding."""
    return np.zeros(dim)
