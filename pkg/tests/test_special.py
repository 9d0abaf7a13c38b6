import math

import numpy as np
import pytest
from scipy import integrate

from ptmark.errors import NumericalError
from ptmark.numerics import noncentral_chi2_cdf, reg_lower_incomplete_gamma


def quadrature_gamma_oracle(s: float, x: float) -> float:
    """Independent oracle: adaptive quadrature of the gamma density."""
    val, err = integrate.quad(
        lambda t: math.exp((s - 1) * math.log(t) - t - math.lgamma(s)),
        0.0, x, limit=500, epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-11
    return val


def test_exponential_special_case():
    for x in (0.1, 0.5, 1.0, 2.5, 7.0):
        assert abs(reg_lower_incomplete_gamma(1.0, x) - (1.0 - math.exp(-x))) < 1e-12


def test_zero_argument():
    assert reg_lower_incomplete_gamma(2.5, 0.0) == 0.0


def test_against_quadrature_oracle():
    # Frozen case from the quadrature oracle plus a spread of regimes.
    assert abs(reg_lower_incomplete_gamma(2.5, 3.7)
               - quadrature_gamma_oracle(2.5, 3.7)) < 1e-10
    for s, x in [(0.5, 0.2), (1.5, 4.0), (8.0, 3.0), (8.0, 20.0), (30.0, 30.0)]:
        assert abs(reg_lower_incomplete_gamma(s, x)
                   - quadrature_gamma_oracle(s, x)) < 1e-10


def test_monotone_in_x():
    xs = np.linspace(0.0, 20.0, 200)
    vals = [reg_lower_incomplete_gamma(3.0, x) for x in xs]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        reg_lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        reg_lower_incomplete_gamma(1.0, -1.0)
    with pytest.raises(ValueError):
        reg_lower_incomplete_gamma(float("nan"), 1.0)
    with pytest.raises(ValueError):
        noncentral_chi2_cdf(float("inf"), 2, 0.0)
    with pytest.raises(ValueError):
        noncentral_chi2_cdf(1.0, 0, 0.0)
    with pytest.raises(ValueError):
        noncentral_chi2_cdf(1.0, 2, -1.0)


def test_central_two_dof():
    # chi^2 with 2 dof: CDF(x) = 1 - exp(-x/2).
    assert abs(noncentral_chi2_cdf(2.0, 2, 0.0) - (1.0 - math.exp(-1.0))) < 1e-12


def test_zero_x():
    assert noncentral_chi2_cdf(0.0, 4, 3.0) == 0.0
    assert noncentral_chi2_cdf(0.0, 1, 0.0) == 0.0


def montecarlo_ncx2_oracle(x: float, k: int, lam: float, n: int = 10**6,
                           seed: int = 0) -> float:
    """Independent oracle: empirical CDF of sum (Z_i + mu_i)^2."""
    gen = np.random.Generator(np.random.Philox(key=seed))
    total = np.zeros(n)
    mus = np.zeros(k)
    mus[0] = math.sqrt(lam)
    for mu in mus:
        total += (gen.standard_normal(n) + mu) ** 2
    return float(np.mean(total <= x))


def test_against_montecarlo_oracle():
    cases = [(10.0, 4, 8.0), (5.0, 2, 1.0), (25.0, 10, 12.0)]
    for x, k, lam in cases:
        mc = montecarlo_ncx2_oracle(x, k, lam)
        assert abs(noncentral_chi2_cdf(x, k, lam) - mc) < 5e-3


def test_matches_central_at_zero_lambda():
    for k in (1, 2, 5, 16):
        for x in (0.5, 2.0, 10.0, 30.0):
            direct = reg_lower_incomplete_gamma(k / 2.0, x / 2.0)
            assert abs(noncentral_chi2_cdf(x, k, 0.0) - direct) < 1e-12


def test_monotonicity_grid():
    # Nondecreasing in x, nonincreasing in lambda, on a 10x10x10 grid.
    xs = np.linspace(0.5, 40.0, 10)
    ks = range(1, 11)
    lams = np.linspace(0.0, 30.0, 10)
    for k in ks:
        for lam in lams:
            vals = [noncentral_chi2_cdf(x, k, lam) for x in xs]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        for x in xs:
            vals = [noncentral_chi2_cdf(x, k, lam) for lam in lams]
            assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_against_scipy():
    from scipy.stats import ncx2
    for x, k, lam in [(2.0, 2, 0.5), (10.0, 4, 8.0), (40.0, 16, 25.0),
                      (300.0, 312, 10.0), (650.0, 624, 20.0)]:
        assert abs(noncentral_chi2_cdf(x, k, lam) - ncx2.cdf(x, k, lam)) < 1e-9


def test_huge_lambda_raises_with_diagnostics():
    with pytest.raises(NumericalError):
        noncentral_chi2_cdf(1e7, 2, 1e7)
