"""Shared per-run machinery: model construction and the per-image pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..diffusion import (
    NoiseSchedule,
    Trajectory,
    ToyDenoiser,
    decode,
    encode,
    invert_trajectory,
    make_denoiser,
    null_embed,
    prompt_embed,
    sample_trajectory,
    schedule_linear,
)
from ..numerics import SeededRng, gaussian_grid
from ..perturb import PerturbationSpec, RegenerateContext, apply_perturbation
from ..tuning import TuningConfig, TuneResult, pivotal_tune
from ..watermark import WatermarkKey, keygen, verify
from .config import RunConfig

CLEAN_LABEL = "clean"


@dataclass(frozen=True)
class Runtime:
    cfg: RunConfig
    schedule: NoiseSchedule
    denoiser: ToyDenoiser
    key: WatermarkKey

    @property
    def regen_ctx(self) -> RegenerateContext:
        return RegenerateContext(denoiser=self.denoiser, schedule=self.schedule)


def build_runtime(cfg: RunConfig) -> Runtime:
    schedule = schedule_linear(cfg.schedule.t_train, cfg.schedule.beta_min,
                               cfg.schedule.beta_max, cfg.schedule.t_sample)
    denoiser = make_denoiser(cfg.denoiser.seed, schedule.steps,
                             channels=cfg.denoiser.channels,
                             height=cfg.denoiser.height, width=cfg.denoiser.width,
                             embed_dim=cfg.denoiser.embed_dim,
                             gamma=cfg.denoiser.gamma, beta_add=cfg.denoiser.beta_add)
    key = keygen(cfg.key.seed, radius=cfg.key.radius, channel=cfg.key.channel,
                 height=cfg.denoiser.height, width=cfg.denoiser.width)
    return Runtime(cfg=cfg, schedule=schedule, denoiser=denoiser, key=key)


@dataclass
class ImageContext:
    """Everything reusable about one (prompt, seed) cell."""

    prompt: str
    seed: int
    cond: np.ndarray
    rng: SeededRng
    x_ref: np.ndarray
    z0_star: np.ndarray
    star: Trajectory


def make_image_context(rt: Runtime, prompt: str, seed: int) -> ImageContext:
    """Clean reference generation plus its inversion pivot."""
    rng = SeededRng(seed).child(prompt)
    cond = prompt_embed(prompt, rt.denoiser.embed_dim)
    z_T = gaussian_grid(rng.child("init"), rt.denoiser.channels,
                        rt.denoiser.height, rt.denoiser.width)
    ref = sample_trajectory(rt.denoiser, z_T, cond, null_embed(rt.denoiser.embed_dim),
                            rt.cfg.tuning.guidance_w, rt.schedule)
    x_ref = decode(ref.final)
    z0_star = encode(x_ref)
    star = invert_trajectory(rt.denoiser, z0_star, cond, rt.schedule)
    return ImageContext(prompt=prompt, seed=seed, cond=cond, rng=rng,
                        x_ref=x_ref, z0_star=z0_star, star=star)


def tune_image(rt: Runtime, ctx: ImageContext, tuning: TuningConfig) -> TuneResult:
    return pivotal_tune(rt.denoiser, ctx.z0_star, rt.key, ctx.cond, tuning,
                        rt.schedule, star=ctx.star)


def perturbation_cells(cfg: RunConfig) -> List[Optional[PerturbationSpec]]:
    """The evaluation cells: unperturbed first, then the configured suite."""
    return [None] + list(cfg.perturbations)


def cell_label(spec: Optional[PerturbationSpec]) -> str:
    return CLEAN_LABEL if spec is None else spec.label


def verify_under(rt: Runtime, ctx: ImageContext, x: np.ndarray,
                 spec: Optional[PerturbationSpec], stream: str) -> Dict[str, float]:
    """Perturb (if requested) and verify; returns the report plus the p-value."""
    if spec is None:
        x_p = x
    else:
        x_p = apply_perturbation(x, spec, ctx.rng.child(f"pert/{stream}/{spec.label}"),
                                 rt.regen_ctx)
    report = verify(x_p, rt.denoiser, rt.key, ctx.cond, rt.schedule,
                    threshold=rt.cfg.threshold)
    return report.to_dict()
