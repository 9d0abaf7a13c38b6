"""Distance scoring, p-values, image verification and detection AUC.

The score is the sigma^2-normalized squared distance between the stored
pattern and the extracted message over the mask:

    eta = (1/sigma^2) sum_mask |W - y|^2

Because the mask is conjugate-symmetric and the latent is real, the mask
carries |mask| independent real components (each coordinate pair contributes
one complex value twice), so under the Gaussian null eta/2 follows a
non-central chi-squared law with |mask| degrees of freedom and non-centrality
sum_mask |W|^2 / (2 sigma^2).  The p-value is that CDF at eta/2, which is
exactly uniform under the null.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..diffusion import NoiseSchedule, ToyDenoiser, encode, invert_trajectory
from ..errors import ConfigError, DegenerateSpectrumError
from ..numerics import noncentral_chi2_cdf
from .embedder import extract_watermark
from .key import WatermarkKey

DEFAULT_THRESHOLD = 0.01


@dataclass(frozen=True)
class VerificationReport:
    eta: float
    sigma2: float
    dof: int
    noncentrality: float
    p_value: float
    decision: bool
    threshold: float

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "sigma2": self.sigma2,
            "dof": self.dof,
            "noncentrality": self.noncentrality,
            "p_value": self.p_value,
            "decision": self.decision,
            "threshold": self.threshold,
        }


def score_pvalue(y: np.ndarray, key: WatermarkKey, sigma2: float) -> Tuple[float, float]:
    """(eta, p) for an extracted message ``y`` against the key pattern."""
    if sigma2 <= 0:
        raise DegenerateSpectrumError(f"sigma^2 must be positive, got {sigma2}")
    pattern = key.pattern[key.mask]
    if y.shape != pattern.shape:
        raise ConfigError(f"message length {y.shape} != mask size {pattern.shape}")
    diff = pattern - y
    eta = float(np.sum(diff.real**2 + diff.imag**2) / sigma2)
    lambda_nc = float(np.sum(pattern.real**2 + pattern.imag**2) / sigma2)
    dof = key.mask_size  # independent components after conjugate pairing
    p = noncentral_chi2_cdf(eta / 2.0, dof, lambda_nc / 2.0)
    return eta, p


def verify(x: np.ndarray, d: ToyDenoiser, key: WatermarkKey, cond: np.ndarray,
           schedule: NoiseSchedule,
           threshold: float = DEFAULT_THRESHOLD) -> VerificationReport:
    """Invert an image at guidance 1 and test the recovered initial latent."""
    if not (0.0 < threshold <= 1.0):
        raise ConfigError(f"threshold must be in (0, 1], got {threshold}")
    z0 = encode(x)
    traj = invert_trajectory(d, z0, cond, schedule)
    y, sigma2 = extract_watermark(traj.initial, key)
    eta, p = score_pvalue(y, key, sigma2)
    pattern = key.pattern[key.mask]
    return VerificationReport(
        eta=eta,
        sigma2=sigma2,
        dof=key.mask_size,
        noncentrality=float(np.sum(pattern.real**2 + pattern.imag**2) / sigma2 / 2.0),
        p_value=p,
        decision=p < threshold,
        threshold=threshold,
    )


def auc(p_watermarked: Sequence[float], p_clean: Sequence[float]) -> float:
    """Mann-Whitney statistic: P(p_wm < p_clean), ties counted one half."""
    if len(p_watermarked) == 0 or len(p_clean) == 0:
        raise ConfigError("AUC needs nonempty p-value populations")
    wm = np.asarray(p_watermarked, dtype=float)[:, None]
    clean = np.asarray(p_clean, dtype=float)[None, :]
    wins = (wm < clean).sum() + 0.5 * (wm == clean).sum()
    return float(wins / (wm.size * clean.size))
