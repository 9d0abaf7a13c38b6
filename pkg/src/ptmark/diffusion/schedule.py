"""Noise schedule and the closed-form forward noising step."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from ..errors import ConfigError
from ..numerics import SeededRng

DEFAULT_T_TRAIN = 1000
DEFAULT_BETA_MIN = 1e-4
DEFAULT_BETA_MAX = 0.02
DEFAULT_T_SAMPLE = 50


@dataclass(frozen=True)
class NoiseSchedule:
    """Beta ladder, cumulative alpha-bar table and the sampled timestep list.

    ``alpha_bars[t]`` is the product of (1 - beta_i) for i <= t with
    ``alpha_bars[0] = 1`` (the data end).  ``steps`` holds the sampled
    timesteps in strictly decreasing order; the implicit ladder used by the
    samplers is ``steps + [0]``.
    """

    t_train: int
    betas: np.ndarray
    alpha_bars: np.ndarray
    steps: List[int]
    _index: Dict[int, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.steps)})

    @property
    def t_sample(self) -> int:
        return len(self.steps)

    @property
    def ladder(self) -> List[int]:
        return list(self.steps) + [0]

    def step_index(self, t: int) -> int:
        """Position of sampled step ``t`` (0 = noise end)."""
        try:
            return self._index[t]
        except KeyError:
            raise ConfigError(f"timestep {t} is not a sampled step") from None

    def abar(self, t: int) -> float:
        return float(self.alpha_bars[t])


def schedule_linear(t_train: int = DEFAULT_T_TRAIN,
                    beta_min: float = DEFAULT_BETA_MIN,
                    beta_max: float = DEFAULT_BETA_MAX,
                    t_sample: int = DEFAULT_T_SAMPLE) -> NoiseSchedule:
    """Linear beta ladder with evenly strided sampled steps."""
    if not (0.0 < beta_min <= beta_max < 1.0):
        raise ConfigError(f"need 0 < beta_min <= beta_max < 1, got ({beta_min}, {beta_max})")
    if not (1 <= t_sample <= t_train):
        raise ConfigError(f"need 1 <= t_sample <= t_train, got t_sample={t_sample}, t_train={t_train}")
    betas = np.linspace(beta_min, beta_max, t_train)
    alpha_bars = np.empty(t_train + 1)
    alpha_bars[0] = 1.0
    alpha_bars[1:] = np.cumprod(1.0 - betas)
    steps = [round(t_train * (t_sample - i) / t_sample) for i in range(t_sample)]
    return NoiseSchedule(t_train=t_train, betas=betas, alpha_bars=alpha_bars, steps=steps)


def forward_diffuse(z0: np.ndarray, t: int, schedule: NoiseSchedule,
                    rng: SeededRng) -> np.ndarray:
    """Noise ``z0`` to timestep ``t``: sqrt(abar) z0 + sqrt(1 - abar) eps."""
    if t != 0 and t not in schedule._index:
        raise ConfigError(f"timestep {t} is outside the sampled ladder")
    abar = schedule.abar(t)
    if t == 0:
        return z0.copy()
    eps = rng.normal(z0.shape)
    return np.sqrt(abar) * z0 + np.sqrt(1.0 - abar) * eps
