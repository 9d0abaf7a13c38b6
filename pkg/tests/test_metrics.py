import math

import numpy as np
import pytest

from ptmark.errors import ConfigError
from ptmark.metrics import msssim, psnr, ssim
from ptmark.numerics import SeededRng


def test_psnr_identical_capped():
    x = SeededRng(1).uniform((1, 32, 32))
    assert psnr(x, x) == 100.0


def test_psnr_formula():
    a = np.zeros((1, 10, 10))
    b = np.full((1, 10, 10), 0.1)  # MSE = 0.01
    assert abs(psnr(a, b) - 20.0) < 1e-12
    c = np.full((1, 10, 10), 0.5)  # MSE = 0.25
    assert abs(psnr(a, c) - 10 * math.log10(1 / 0.25)) < 1e-12


def test_psnr_shape_mismatch():
    with pytest.raises(ConfigError):
        psnr(np.zeros((1, 8, 8)), np.zeros((1, 16, 16)))


def test_ssim_identical():
    x = SeededRng(2).uniform((1, 64, 64))
    assert abs(ssim(x, x) - 1.0) < 1e-12


def test_ssim_symmetric():
    a = SeededRng(3).uniform((1, 64, 64))
    b = SeededRng(4).uniform((1, 64, 64))
    assert ssim(a, b) == ssim(b, a)


def test_ssim_checkerboard_inversion_near_minus_one():
    # Structured content vs its negative: strong anti-correlation.
    i = np.arange(64)[:, None]
    j = np.arange(64)[None, :]
    board = ((i // 4 + j // 4) % 2).astype(float)
    inverted = 1.0 - board
    value = ssim(board[None], inverted[None])
    assert value < -0.8


def test_ssim_in_range():
    a = SeededRng(5).uniform((1, 64, 64))
    b = SeededRng(6).uniform((1, 64, 64))
    assert -1.0 <= ssim(a, b) <= 1.0


def test_msssim_identical():
    x = SeededRng(7).uniform((1, 64, 64))
    assert abs(msssim(x, x) - 1.0) < 1e-12


def test_msssim_orders_degradation():
    x = SeededRng(8).uniform((1, 128, 128))
    mild = np.clip(x + 0.02 * SeededRng(9).normal(x.shape), 0, 1)
    harsh = np.clip(x + 0.3 * SeededRng(10).normal(x.shape), 0, 1)
    assert msssim(x, mild) > msssim(x, harsh)


def test_msssim_too_small_rejected():
    with pytest.raises(ConfigError):
        msssim(np.zeros((1, 16, 16)), np.zeros((1, 16, 16)))
