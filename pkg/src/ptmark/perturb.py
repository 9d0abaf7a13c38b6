"""Image-space perturbation suite plus an in-model regeneration attack.

Every perturbation maps [0, 1] images to [0, 1] images of the same shape and
is deterministic given an explicit seed.  JPEG is modeled as 8x8 block-DCT
quantization with the standard luminance table (no entropy coding -- the
detection-relevant distortion is the quantization).  The regeneration attack
re-noises the encoded latent partway up the ladder and denoises back at
guidance 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .diffusion import (
    NoiseSchedule,
    ToyDenoiser,
    decode,
    encode,
    forward_diffuse,
    null_embed,
    sample_trajectory,
)
from .errors import ConfigError
from .numerics import SeededRng

KINDS = ("jpeg", "crop", "blur", "noise", "brightness", "rotate", "regenerate")

# Standard JPEG luminance quantization table.
_JPEG_LUMA = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=float)


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str
    param: float

    def __post_init__(self):
        object.__setattr__(self, "param", float(self.param))
        if self.kind not in KINDS:
            raise ConfigError(f"unknown perturbation kind {self.kind!r}")
        checks = {
            "jpeg": lambda p: 1 <= p <= 100,
            "crop": lambda p: 0.0 < p <= 1.0,
            "blur": lambda p: p >= 0 and float(p).is_integer(),
            "noise": lambda p: 0.0 <= p <= 1.0,
            "brightness": lambda p: p > 0,
            "rotate": lambda p: 0.0 <= p <= 180.0,
            "regenerate": lambda p: p >= 1 and float(p).is_integer(),
        }
        if not checks[self.kind](self.param):
            raise ConfigError(f"parameter {self.param} out of range for {self.kind}")

    @property
    def label(self) -> str:
        return self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param}

    @staticmethod
    def from_dict(data: dict) -> "PerturbationSpec":
        return PerturbationSpec(kind=str(data["kind"]), param=float(data["param"]))


@dataclass(frozen=True)
class RegenerateContext:
    """Model access the regeneration attack needs."""

    denoiser: ToyDenoiser
    schedule: NoiseSchedule
    cond: Optional[np.ndarray] = None  # attacker-side conditioning; zero if None


def severity_defaults(t_sample: int = 50) -> List[PerturbationSpec]:
    """The benchmark severities: JPEG q25, crop 75%, blur radius 4, noise 10%,
    brightness x2, rotation up to 75 degrees, regeneration at 60% of the ladder."""
    return [
        PerturbationSpec("jpeg", 25),
        PerturbationSpec("crop", 0.75),
        PerturbationSpec("blur", 4),
        PerturbationSpec("noise", 0.10),
        PerturbationSpec("brightness", 2.0),
        PerturbationSpec("rotate", 75.0),
        PerturbationSpec("regenerate", max(1, round(0.60 * t_sample))),
    ]


def _dct_matrix(n: int = 8) -> np.ndarray:
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    m[0] /= math.sqrt(2.0)
    return m


_DCT8 = _dct_matrix(8)


def _jpeg(x: np.ndarray, quality: float) -> np.ndarray:
    h, w = x.shape[1], x.shape[2]
    if h % 8 or w % 8:
        raise ConfigError(f"jpeg needs dimensions divisible by 8, got {h}x{w}")
    q = float(quality)
    scale = 5000.0 / q if q < 50 else 200.0 - 2.0 * q
    table = np.clip(np.floor((_JPEG_LUMA * scale + 50.0) / 100.0), 1.0, 255.0)
    plane = x[0] * 255.0 - 128.0
    blocks = plane.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3)
    coefs = np.einsum("ab,ijbc,dc->ijad", _DCT8, blocks, _DCT8)
    coefs = np.round(coefs / table) * table
    blocks = np.einsum("ba,ijbc,cd->ijad", _DCT8, coefs, _DCT8)
    plane = blocks.transpose(0, 2, 1, 3).reshape(h, w)
    return np.clip((plane + 128.0) / 255.0, 0.0, 1.0)[None]


def _crop(x: np.ndarray, area_fraction: float, rng: SeededRng) -> np.ndarray:
    h, w = x.shape[1], x.shape[2]
    if area_fraction == 1.0:
        return x.copy()
    side = math.sqrt(area_fraction)
    ch, cw = max(1, round(side * h)), max(1, round(side * w))
    top = rng.integers(0, h - ch + 1)
    left = rng.integers(0, w - cw + 1)
    window = x[0, top:top + ch, left:left + cw]
    rows = np.clip(np.floor(np.arange(h) * ch / h).astype(int), 0, ch - 1)
    cols = np.clip(np.floor(np.arange(w) * cw / w).astype(int), 0, cw - 1)
    return window[np.ix_(rows, cols)][None].copy()


def _gaussian_kernel(radius: int) -> np.ndarray:
    sigma = radius / 2.0
    half = 2 * radius
    t = np.arange(-half, half + 1, dtype=float)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def _blur(x: np.ndarray, radius: int) -> np.ndarray:
    if radius == 0:
        return x.copy()
    k = _gaussian_kernel(radius)
    half = 2 * radius
    plane = np.pad(x[0], half, mode="reflect")
    plane = np.apply_along_axis(lambda r: np.convolve(r, k, mode="valid"), 1, plane)
    plane = np.apply_along_axis(lambda c: np.convolve(c, k, mode="valid"), 0, plane)
    return np.clip(plane, 0.0, 1.0)[None]


def _rotate(x: np.ndarray, max_degrees: float, rng: SeededRng) -> np.ndarray:
    angle = float(rng.uniform()) * 2.0 * max_degrees - max_degrees
    if angle == 0.0:
        return x.copy()
    theta = math.radians(angle)
    h, w = x.shape[1], x.shape[2]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    # Inverse map: rotate output coordinates by -angle about the center.
    dy, dx = yy - cy, xx - cx
    src_y = cy + dy * math.cos(theta) + dx * math.sin(theta)
    src_x = cx - dy * math.sin(theta) + dx * math.cos(theta)
    y0 = np.floor(src_y).astype(int)
    x0 = np.floor(src_x).astype(int)
    fy, fx = src_y - y0, src_x - x0

    def _reflect(idx, n):
        period = 2 * n - 2
        idx = np.mod(idx, period)
        return np.where(idx >= n, period - idx, idx)

    plane = x[0]
    out = np.zeros((h, w))
    for oy, ox, wgt in ((0, 0, (1 - fy) * (1 - fx)), (0, 1, (1 - fy) * fx),
                        (1, 0, fy * (1 - fx)), (1, 1, fy * fx)):
        out += wgt * plane[_reflect(y0 + oy, h), _reflect(x0 + ox, w)]
    return np.clip(out, 0.0, 1.0)[None]


def _regenerate(x: np.ndarray, steps: int, rng: SeededRng,
                ctx: RegenerateContext) -> np.ndarray:
    schedule = ctx.schedule
    n = min(max(int(steps), 1), schedule.t_sample)
    t_attack = schedule.steps[schedule.t_sample - n]
    z = encode(x)
    z_noised = forward_diffuse(z, t_attack, schedule, rng)
    cond = ctx.cond if ctx.cond is not None else null_embed(ctx.denoiser.embed_dim)
    # Denoise from t_attack down at guidance 1 on a truncated ladder.
    sub = _truncated_schedule(schedule, t_attack)
    traj = sample_trajectory(ctx.denoiser, z_noised, cond, cond, 1.0, sub)
    return decode(traj.final)


def _truncated_schedule(schedule: NoiseSchedule, t_top: int) -> NoiseSchedule:
    idx = schedule.step_index(t_top)
    return NoiseSchedule(t_train=schedule.t_train, betas=schedule.betas,
                         alpha_bars=schedule.alpha_bars, steps=schedule.steps[idx:])


def apply_perturbation(x: np.ndarray, spec: PerturbationSpec, rng: SeededRng,
                       ctx: Optional[RegenerateContext] = None) -> np.ndarray:
    """Apply one perturbation; ``ctx`` is required for the regeneration attack."""
    if x.ndim != 3 or x.shape[0] != 1:
        raise ConfigError(f"expected a (1, H, W) image, got {x.shape}")
    if spec.kind == "jpeg":
        return _jpeg(x, spec.param)
    if spec.kind == "crop":
        return _crop(x, spec.param, rng)
    if spec.kind == "blur":
        return _blur(x, int(spec.param))
    if spec.kind == "noise":
        if spec.param == 0.0:
            return x.copy()
        return np.clip(x + spec.param * rng.normal(x.shape), 0.0, 1.0)
    if spec.kind == "brightness":
        return np.clip(x * spec.param, 0.0, 1.0)
    if spec.kind == "rotate":
        return _rotate(x, spec.param, rng)
    if spec.kind == "regenerate":
        if ctx is None:
            raise ConfigError("regenerate needs a denoiser/schedule context")
        return _regenerate(x, int(spec.param), rng, ctx)
    raise ConfigError(f"unknown perturbation kind {spec.kind!r}")
