"""Per-step null-embedding optimization and the full pivotal tuning loop.

Stage 1 builds the two pivots: the original trajectory by DDIM inversion at
guidance 1 and the watermarked trajectory by guided sampling from the
embedded initial noise.  Stage 2 walks the ladder from the noise end,
optimizing the null embedding at each step to pull the tuned trajectory
toward the original pivot while a masked L1 term holds it to the watermarked
pivot inside watermark-salient cells.  Gradients flow only through the
unconditional branch of the guidance combination and only through the
current step; the saliency mask is a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..diffusion import (
    NoiseSchedule,
    Trajectory,
    ToyDenoiser,
    decode,
    denoise_eps,
    denoise_eps_vjp,
    invert_trajectory,
    null_embed,
    sample_trajectory,
)
from ..errors import NumericalError
from ..watermark import WatermarkKey, embed_watermark
from .config import TuningConfig
from .losses import tuning_losses
from .saliency import saliency_mask

_EMBED_NORM_CLAMP = 100.0


@dataclass
class LossRecord:
    """Loss values at one optimization iteration of one ladder step."""

    step_index: int
    timestep: int
    iteration: int
    l_sem: float
    l_wm: float
    l_total: float


@dataclass
class TuneResult:
    trajectory: Trajectory
    null_schedule: np.ndarray          # (T, d), ordered from the noise end
    image: np.ndarray
    loss_curves: List[LossRecord] = field(default_factory=list)

    def curves_csv(self) -> str:
        lines = ["step,timestep,iter,l_sem,l_wm,l_total"]
        for r in self.loss_curves:
            lines.append(f"{r.step_index},{r.timestep},{r.iteration},"
                         f"{r.l_sem:.12g},{r.l_wm:.12g},{r.l_total:.12g}")
        return "\n".join(lines) + "\n"


class _Adam:
    def __init__(self, cfg: TuningConfig, dim: int):
        self.cfg = cfg
        self.m = np.zeros(dim)
        self.v = np.zeros(dim)
        self.count = 0

    def update(self, e: np.ndarray, grad: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        if cfg.optimizer == "sgd":
            out = e - cfg.lr * grad
        else:
            self.count += 1
            self.m = cfg.adam_beta1 * self.m + (1 - cfg.adam_beta1) * grad
            self.v = cfg.adam_beta2 * self.v + (1 - cfg.adam_beta2) * grad * grad
            m_hat = self.m / (1 - cfg.adam_beta1 ** self.count)
            v_hat = self.v / (1 - cfg.adam_beta2 ** self.count)
            out = e - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
        norm = float(np.linalg.norm(out))
        if norm > _EMBED_NORM_CLAMP:
            out = out * (_EMBED_NORM_CLAMP / norm)
        return out


def _predict_step(d: ToyDenoiser, z_bar: np.ndarray, t: int, null_t: np.ndarray,
                  cond: np.ndarray, cfg: TuningConfig, schedule: NoiseSchedule,
                  ) -> Tuple[np.ndarray, np.ndarray, float, float]:
    """One guided DDIM step from z_bar; returns (z_pred, eps_null, a, b)."""
    idx = schedule.step_index(t)
    ladder = schedule.ladder
    abar_hi = schedule.abar(ladder[idx])
    abar_lo = schedule.abar(ladder[idx + 1])
    w = cfg.guidance_w
    eps_cond = denoise_eps(d, z_bar, t, cond)
    if w == 1.0:
        eps_tilde = eps_cond
    else:
        eps_null = denoise_eps(d, z_bar, t, null_t)
        eps_tilde = w * eps_cond + (1.0 - w) * eps_null
    a = math.sqrt(abar_lo / abar_hi)
    b = math.sqrt(1.0 - abar_lo) - a * math.sqrt(1.0 - abar_hi)
    return a * z_bar + b * eps_tilde, eps_tilde, a, b


def _loss_and_grad(d: ToyDenoiser, z_bar: np.ndarray, t: int, null_t: np.ndarray,
                   cond: np.ndarray, z_star_prev: np.ndarray, z_hat_prev: np.ndarray,
                   mask: np.ndarray, cfg: TuningConfig, schedule: NoiseSchedule,
                   ) -> Tuple[np.ndarray, np.ndarray, Tuple[float, float, float]]:
    z_pred, _, _, b = _predict_step(d, z_bar, t, null_t, cond, cfg, schedule)
    losses = tuning_losses(z_pred, z_star_prev, z_hat_prev, mask, cfg)
    w = cfg.guidance_w
    if w == 1.0:
        # The unconditional branch has coefficient 1 - w = 0.
        return z_pred, np.zeros_like(null_t), losses
    # d l_total / d z_pred: L2 term plus the masked L1 subgradient (sign(0) = 0).
    d_loss = 2.0 * cfg.lambda1 * (z_pred - z_star_prev) \
        - cfg.lambda2 * mask * np.sign(z_hat_prev - z_pred)
    grad = (1.0 - w) * denoise_eps_vjp(d, z_bar, t, null_t, b * d_loss)
    return z_pred, grad, losses


def embedding_grad(d: ToyDenoiser, z_bar_t: np.ndarray, t: int, null_t: np.ndarray,
                   cond: np.ndarray, z_star_prev: np.ndarray, z_hat_prev: np.ndarray,
                   mask: np.ndarray, cfg: TuningConfig,
                   schedule: NoiseSchedule) -> np.ndarray:
    """Gradient of the combined loss at step ``t`` with respect to the null embedding."""
    if cfg.lambda1 == 0.0 and cfg.lambda2 == 0.0:
        return np.zeros_like(null_t)
    _, grad, _ = _loss_and_grad(d, z_bar_t, t, null_t, cond, z_star_prev,
                                z_hat_prev, mask, cfg, schedule)
    return grad


def pivotal_tune(d: ToyDenoiser, z0_star: np.ndarray, key: WatermarkKey,
                 cond: np.ndarray, cfg: TuningConfig, schedule: NoiseSchedule,
                 star: Optional[Trajectory] = None) -> TuneResult:
    """Run both stages and return the tuned trajectory, embeddings and image.

    ``star`` may carry a precomputed inversion of ``z0_star`` (it is verified
    by shape only); otherwise the inversion runs here.
    """
    dim = d.embed_dim
    if star is None:
        star = invert_trajectory(d, z0_star, cond, schedule)
    z_hat_T = embed_watermark(star.initial, key)
    hat = sample_trajectory(d, z_hat_T, cond, null_embed(dim), cfg.guidance_w, schedule)

    ladder = schedule.ladder
    t_count = schedule.t_sample
    z_bar = z_hat_T
    null_t = null_embed(dim)
    states = [(ladder[0], z_bar)]
    nulls = np.zeros((t_count, dim))
    records: List[LossRecord] = []

    for i, t in enumerate(schedule.steps):
        z_star_prev = star.states[i + 1][1]
        z_hat_prev = hat.states[i + 1][1]
        if i < cfg.start_step:
            # Before the tuning window: follow the watermarked pivot unchanged.
            z_bar = z_hat_prev
            nulls[i] = null_t
            states.append((ladder[i + 1], z_bar))
            continue
        mask = saliency_mask(z_hat_prev, z_star_prev, cfg.saliency_q)
        opt = _Adam(cfg, dim)
        for j in range(cfg.n_iters):
            _, grad, losses = _loss_and_grad(d, z_bar, t, null_t, cond,
                                             z_star_prev, z_hat_prev, mask, cfg, schedule)
            if not all(math.isfinite(v) for v in losses):
                raise NumericalError(
                    f"non-finite loss at step {i} (t={t}), iteration {j}: {losses}")
            records.append(LossRecord(i, t, j, *losses))
            null_t = opt.update(null_t, grad)
        z_pred, _, _, _ = _predict_step(d, z_bar, t, null_t, cond, cfg, schedule)
        final = tuning_losses(z_pred, z_star_prev, z_hat_prev, mask, cfg)
        if not all(math.isfinite(v) for v in final):
            raise NumericalError(f"non-finite loss at step {i} (t={t}) after updates: {final}")
        records.append(LossRecord(i, t, cfg.n_iters, *final))
        z_bar = z_pred
        nulls[i] = null_t
        states.append((ladder[i + 1], z_bar))

    return TuneResult(trajectory=Trajectory(states), null_schedule=nulls,
                      image=decode(z_bar), loss_curves=records)
