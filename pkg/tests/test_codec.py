import numpy as np
import pytest

from ptmark.diffusion import decode, encode
from ptmark.errors import ConfigError
from ptmark.numerics import SeededRng


def test_round_trip_exact_in_range():
    z = SeededRng(1).uniform((4, 16, 16)) * 8.0 - 4.0  # entries in [-4, 4]
    assert np.array_equal(encode(decode(z)), z)


def test_zero_latent_gives_mid_gray():
    x = decode(np.zeros((4, 8, 8)))
    assert np.all(x == 0.5)
    assert x.shape == (1, 16, 16)


def test_clamp_engages_only_outside_range():
    z = np.zeros((4, 8, 8))
    z[0, 0, 0] = 4.5
    z[1, 0, 0] = -4.5
    z[2, 0, 0] = 3.9
    x = decode(z)
    back = encode(x)
    assert back[0, 0, 0] == 4.0
    assert back[1, 0, 0] == -4.0
    assert abs(back[2, 0, 0] - 3.9) < 1e-12


def test_pixel_shuffle_layout():
    z = np.zeros((4, 2, 2))
    z[0, 0, 0], z[1, 0, 0], z[2, 0, 0], z[3, 0, 0] = -4.0, -2.0, 2.0, 4.0
    x = decode(z)
    assert x[0, 0, 0] == 0.0    # channel 0 -> (0, 0)
    assert x[0, 0, 1] == 0.25   # channel 1 -> (0, 1)
    assert x[0, 1, 0] == 0.75   # channel 2 -> (1, 0)
    assert x[0, 1, 1] == 1.0    # channel 3 -> (1, 1)


def test_shape_validation():
    with pytest.raises(ConfigError):
        decode(np.zeros((3, 8, 8)))
    with pytest.raises(ConfigError):
        encode(np.zeros((1, 9, 16)))
