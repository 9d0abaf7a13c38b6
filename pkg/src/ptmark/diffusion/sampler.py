"""DDIM sampling and first-order inversion on the sampled-step ladder.

Both directions share one algebraic transfer map between alpha-bar levels:

    z' = sqrt(abar'/abar) (z - sqrt(1-abar) eps) + sqrt(1-abar') eps

Sampling walks the ladder downward (noise to data); inversion walks it upward
evaluating eps at the current state, which makes each inverse step the exact
algebraic inverse when handed the same eps.  Inversion evaluates the denoiser
at the upper step of each ladder pair, matching the step embedding the
forward pass would use there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple, Union

import math

import numpy as np

from ..errors import ConfigError
from .denoiser import ToyDenoiser, cfg_eps, denoise_eps
from .schedule import NoiseSchedule


@dataclass(frozen=True)
class Trajectory:
    """Ordered latents along the ladder, noise end first (t = T ... 0)."""

    states: List[Tuple[int, np.ndarray]]

    @property
    def timesteps(self) -> List[int]:
        return [t for t, _ in self.states]

    @property
    def initial(self) -> np.ndarray:
        """Latent at the noise end (z at the top sampled step)."""
        return self.states[0][1]

    @property
    def final(self) -> np.ndarray:
        """Latent at t = 0."""
        return self.states[-1][1]

    def at(self, t: int) -> np.ndarray:
        for ts, z in self.states:
            if ts == t:
                return z
        raise KeyError(f"no state recorded at timestep {t}")

    def __len__(self) -> int:
        return len(self.states)


def _transfer(z: np.ndarray, eps: np.ndarray, abar_from: float, abar_to: float) -> np.ndarray:
    a = math.sqrt(abar_to / abar_from)
    b = math.sqrt(1.0 - abar_to) - a * math.sqrt(1.0 - abar_from)
    return a * z + b * eps


def ddim_step(z_t: np.ndarray, eps: np.ndarray, t: int, schedule: NoiseSchedule) -> np.ndarray:
    """One deterministic update from sampled step ``t`` to its ladder successor."""
    idx = schedule.step_index(t)  # raises for t == 0 (no predecessor)
    ladder = schedule.ladder
    return _transfer(z_t, eps, schedule.abar(ladder[idx]), schedule.abar(ladder[idx + 1]))


def ddim_inverse_step(z_t: np.ndarray, eps: np.ndarray, t: int,
                      schedule: NoiseSchedule) -> np.ndarray:
    """Algebraic inverse of :func:`ddim_step`, moving up the ladder from ``t``."""
    ladder = schedule.ladder
    try:
        idx = ladder.index(t)
    except ValueError:
        raise ConfigError(f"timestep {t} is not on the ladder") from None
    if idx == 0:
        raise ConfigError(f"timestep {t} is the top of the ladder; no successor")
    return _transfer(z_t, eps, schedule.abar(ladder[idx]), schedule.abar(ladder[idx - 1]))


NullsLike = Union[np.ndarray, List[np.ndarray]]


def _null_at(nulls: NullsLike, i: int) -> np.ndarray:
    arr = np.asarray(nulls) if not isinstance(nulls, np.ndarray) else nulls
    if arr.ndim == 1:
        return arr
    return arr[i]


def sample_trajectory(d: ToyDenoiser, z_T: np.ndarray, cond: np.ndarray,
                      nulls: NullsLike, w: float,
                      schedule: NoiseSchedule) -> Trajectory:
    """Guided DDIM sampling from the top step down to t = 0.

    ``nulls`` is either a single embedding used at every step or a (T, d)
    per-step array ordered from the noise end.
    """
    nulls_arr = np.asarray(nulls)
    if nulls_arr.ndim == 2 and nulls_arr.shape[0] != schedule.t_sample:
        raise ConfigError(
            f"per-step nulls cover {nulls_arr.shape[0]} steps, ladder has {schedule.t_sample}")
    ladder = schedule.ladder
    z = z_T
    states = [(ladder[0], z)]
    for i, t in enumerate(schedule.steps):
        eps = cfg_eps(d, z, t, cond, _null_at(nulls_arr, i), w)
        z = _transfer(z, eps, schedule.abar(ladder[i]), schedule.abar(ladder[i + 1]))
        states.append((ladder[i + 1], z))
    return Trajectory(states)


def invert_trajectory(d: ToyDenoiser, z_0: np.ndarray, cond: np.ndarray,
                      schedule: NoiseSchedule) -> Trajectory:
    """DDIM inversion at guidance 1 from t = 0 up to the top sampled step."""
    ladder = schedule.ladder
    z = z_0
    states = [(0, z)]
    for i in range(schedule.t_sample - 1, -1, -1):
        t_hi = ladder[i]
        eps = denoise_eps(d, z, t_hi, cond)
        z = _transfer(z, eps, schedule.abar(ladder[i + 1]), schedule.abar(t_hi))
        states.append((t_hi, z))
    return Trajectory(states[::-1])
