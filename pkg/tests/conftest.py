"""Shared fixtures.

Most tests run on a reduced setup (32x32 latents, 10-step ladder) to stay
fast; the acceptance suite builds the full default configuration itself.
"""

import pytest

from ptmark.diffusion import make_denoiser, prompt_embed, schedule_linear
from ptmark.harness import RunConfig, build_runtime, config_from_dict
from ptmark.watermark import keygen


@pytest.fixture(scope="session")
def small_schedule():
    return schedule_linear(t_sample=10)


@pytest.fixture(scope="session")
def small_denoiser(small_schedule):
    return make_denoiser(1234, small_schedule.steps, height=32, width=32)


@pytest.fixture(scope="session")
def small_key():
    return keygen(99, radius=8, height=32, width=32)


@pytest.fixture(scope="session")
def cond():
    return prompt_embed("a corgi in fantasy armor")


@pytest.fixture(scope="session")
def small_runtime():
    cfg = config_from_dict({
        "prompts": ["a corgi in fantasy armor", "metal ball on grass"],
        "seeds": [1, 2],
        "denoiser": {"height": 32, "width": 32},
        "schedule": {"t_sample": 10},
        "key": {"radius": 8},
    })
    return build_runtime(cfg)


@pytest.fixture(scope="session")
def default_runtime():
    cfg = RunConfig(prompts=["a corgi in fantasy armor"], seeds=[1])
    return build_runtime(cfg)
