"""Toy latent diffusion stack: schedule, denoiser, DDIM sampling/inversion, codec."""

from .codec import LATENT_RANGE, decode, encode
from .denoiser import ToyDenoiser, cfg_eps, denoise_eps, denoise_eps_vjp, make_denoiser
from .embeddings import EMBED_DIM, null_embed, prompt_embed
from .sampler import (
    Trajectory,
    ddim_inverse_step,
    ddim_step,
    invert_trajectory,
    sample_trajectory,
)
from .schedule import (
    DEFAULT_BETA_MAX,
    DEFAULT_BETA_MIN,
    DEFAULT_T_SAMPLE,
    DEFAULT_T_TRAIN,
    NoiseSchedule,
    forward_diffuse,
    schedule_linear,
)

__all__ = [
    "NoiseSchedule",
    "schedule_linear",
    "forward_diffuse",
    "ToyDenoiser",
    "make_denoiser",
    "denoise_eps",
    "denoise_eps_vjp",
    "cfg_eps",
    "Trajectory",
    "ddim_step",
    "ddim_inverse_step",
    "sample_trajectory",
    "invert_trajectory",
    "decode",
    "encode",
    "LATENT_RANGE",
    "prompt_embed",
    "null_embed",
    "EMBED_DIM",
    "DEFAULT_T_TRAIN",
    "DEFAULT_BETA_MIN",
    "DEFAULT_BETA_MAX",
    "DEFAULT_T_SAMPLE",
]
