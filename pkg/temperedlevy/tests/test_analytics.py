"""Testing analytics utilities."""
import math
from importlib.resources import files

import numpy as np
import pytest

from ..analytics import (
    _acvf_tfln2_fourier,
    acvf_tfln1,
    acvf_tfln1_asymptotic,
    acvf_tfln2,
    acvf_tfln2_asymptotic_band,
    acvf_tfln2_limit_constant,
    cov_tflp1,
    cov_tflp1_quadrature,
    cov_tflp2,
    cov_tflp2_quadrature,
    ct_squared,
    empirical_acvf,
    fit_semi_lrd,
    flp_covariance,
    periodogram,
    spec_density_tfln1,
    spec_density_tfln2,
    var_limit_tflp1,
)
from ..exceptions import DegenerateFitError, LengthError, ParameterError
from ..helpers.data import read_table
from ..levy_driver import CompoundPoisson
from ..process_sim import TemperedParams, simulate_noise

SEMILRD_CSV_FILEPATH = str(files("temperedlevy") / "resources" / "tests" / "acvf_semilrd.csv")


def test_ct_squared():
    """Testing the covariance constant of the first kind."""
    assert ct_squared(TemperedParams(0.3, 1.0), 0.0) == 0.0
    assert ct_squared(TemperedParams(0.0, 1.0), 1.0) == pytest.approx(1.0 - math.exp(-1.0))
    params = TemperedParams(0.3, 0.5)
    np.testing.assert_allclose(ct_squared(params, [-2.0, 2.0]), ct_squared(params, 2.0))


def test_ct_squared_integer_order():
    """Testing the logarithmic series near the origin when d + 1/2 is an integer."""
    params = TemperedParams(0.5, 1.0)
    for t in (1e-8, 1e-6, 1e-4):
        expected = 0.25 * (0.5 - np.euler_gamma - math.log(t / 2.0))
        assert ct_squared(params, t) == pytest.approx(expected, rel=1e-7)
    nearby = TemperedParams(0.5 + 1e-5, 1.0)
    assert ct_squared(params, 1e-8) == pytest.approx(ct_squared(nearby, 1e-8), rel=2e-3)
    assert cov_tflp1(params, 5e-4, 5e-4) == pytest.approx(
        cov_tflp1_quadrature(params, 5e-4, 5e-4), rel=1e-6
    )
    smooth = TemperedParams(1.5, 1.0)
    assert cov_tflp1(smooth, 5e-4, 5e-4) == pytest.approx(
        cov_tflp1_quadrature(smooth, 5e-4, 5e-4), rel=1e-6
    )


@pytest.mark.parametrize("d", [-0.3, 0.0, 0.3, 0.8])
def test_cov_tflp1(d):
    """Testing the closed covariance of the first kind against quadrature."""
    params = TemperedParams(d, 0.7)
    for s, t in ((1.0, 1.0), (0.5, 2.0), (-1.0, 1.5), (3.0, 0.2)):
        assert cov_tflp1(params, s, t, 0.5) == pytest.approx(
            cov_tflp1_quadrature(params, s, t, 0.5), rel=1e-6
        )
    assert cov_tflp1(params, 0.0, 2.0) == pytest.approx(0.0, abs=1e-14)
    assert cov_tflp1(params, 1.0, 2.0) == pytest.approx(cov_tflp1(params, 2.0, 1.0))


def test_cov_tflp1_small_arguments():
    """Testing the series branch of the covariance near the origin."""
    params = TemperedParams(0.3, 1.0)
    for t in (1e-4, 5e-4, 2e-3):
        assert cov_tflp1(params, t, t) == pytest.approx(
            cov_tflp1_quadrature(params, t, t), rel=1e-6
        )


def test_var_limit():
    """Testing the large-time variance of the first kind."""
    assert var_limit_tflp1(TemperedParams(0.0, 1.0), 1.0) == pytest.approx(1.0)
    assert var_limit_tflp1(TemperedParams(0.0, 0.5), 1.0) == pytest.approx(2.0)
    params = TemperedParams(0.3, 0.5)
    assert cov_tflp1(params, 200.0, 200.0) == pytest.approx(var_limit_tflp1(params), rel=1e-8)


@pytest.mark.parametrize("d", [0.3, 0.8])
def test_cov_tflp2(d):
    """Testing the covariance of the second kind against quadrature."""
    params = TemperedParams(d, 1.0)
    for s, t in ((1.0, 1.0), (1.0, 2.0), (-0.5, 1.0)):
        assert cov_tflp2(params, s, t, 2.0) == pytest.approx(
            cov_tflp2_quadrature(params, s, t, 2.0), rel=1e-6
        )
    assert cov_tflp2(params, 0.0, 1.0) == pytest.approx(0.0, abs=1e-14)


def test_cov_tflp2_errors():
    """Testing the parameter range of the covariance of the second kind."""
    with pytest.raises(ParameterError):
        cov_tflp2(TemperedParams(-0.2, 1.0), 1.0, 1.0)
    with pytest.raises(ParameterError):
        cov_tflp2_quadrature(TemperedParams(0.0, 1.0), 1.0, 1.0)
    assert cov_tflp2_quadrature(TemperedParams(-0.2, 1.0), 1.0, 1.0) > 0


@pytest.mark.parametrize("d", [-0.2, 0.2])
def test_untempered_limit(d):
    """Testing continuity of the covariance as the tempering vanishes."""
    params = TemperedParams(d, 1e-6)
    for s, t in ((1.0, 1.0), (1.0, 2.0)):
        assert cov_tflp1(params, s, t) == pytest.approx(flp_covariance(d, s, t), rel=1e-2)
    with pytest.raises(ParameterError):
        flp_covariance(0.6, 1.0, 1.0)


def test_acvf_tfln1():
    """Testing the noise autocovariance of the first kind."""
    params = TemperedParams(0.3, 0.5)
    assert acvf_tfln1(params, 0.0, 2.0) == pytest.approx(cov_tflp1(params, 1.0, 1.0, 2.0))
    for h in (1.0, 3.0):
        expected = cov_tflp1(params, 1.0, h + 1.0) - cov_tflp1(params, 1.0, h)
        assert acvf_tfln1(params, h) == pytest.approx(expected, rel=1e-8)
    np.testing.assert_allclose(acvf_tfln1(params, [-2.0, 2.0]), acvf_tfln1(params, 2.0))


def test_acvf_tfln1_asymptotic():
    """Testing the large-lag equivalent of the noise of the first kind."""
    params = TemperedParams(0.3, 0.5)
    h = 30.0
    ratio = acvf_tfln1(params, h) / acvf_tfln1_asymptotic(params, h, corrected=True)
    assert abs(ratio - 1.0) < 0.1
    small = TemperedParams(0.3, 0.01)
    assert acvf_tfln1_asymptotic(small, 10.0) == pytest.approx(
        acvf_tfln1_asymptotic(small, 10.0, corrected=True), rel=1e-4
    )


def test_spectral_densities():
    """Testing values of the spectral densities."""
    ou = TemperedParams(0.0, 1.0)
    assert spec_density_tfln1(ou, 0.0) == 0.0
    assert spec_density_tfln1(ou, math.pi) == pytest.approx(1.0 / (math.pi * (1.0 + math.pi ** 2)))
    assert spec_density_tfln1(ou, math.pi, el2=3.0) == pytest.approx(
        6.0 * spec_density_tfln1(ou, math.pi)
    )
    params = TemperedParams(0.3, 2.0)
    assert spec_density_tfln2(params, 0.0) == pytest.approx(1.0 / (4.0 * math.pi * 2.0 ** 0.6))
    omega = np.array([1e-3, 0.5, 2.0])
    expected = (1.0 - np.cos(omega)) / (2.0 * math.pi * omega ** 2 * (4.0 + omega ** 2) ** 0.3)
    np.testing.assert_allclose(spec_density_tfln2(params, omega), expected, rtol=1e-6)


def test_acvf_tfln2_inversions():
    """Testing the lag integral against the spectral inversion."""
    params = TemperedParams(0.3, 1.0)
    for h in (0.0, 0.5, 2.0):
        assert acvf_tfln2(params, h) == pytest.approx(_acvf_tfln2_fourier(params, h, 1.0), rel=1e-6)
    negative = TemperedParams(-0.2, 1.0)
    assert acvf_tfln2(negative, 0.0) > 0
    assert acvf_tfln2(negative, 2.0) == pytest.approx(
        _acvf_tfln2_fourier(negative, 2.0, 1.0), rel=1e-6
    )
    with pytest.raises(ParameterError):
        acvf_tfln2(TemperedParams(0.0, 1.0), 1.0)


@pytest.mark.parametrize("d,lam", [(0.4, 0.5), (0.3, 1.0), (-0.2, 0.5)])
def test_acvf_tfln2_methods(d, lam):
    """Testing the spectral inversion and the lag integral on shared lags."""
    params = TemperedParams(d, lam)
    lags = np.array([2.0, 3.5, 6.0])
    np.testing.assert_allclose(
        acvf_tfln2(params, lags, 0.5, method="fourier"),
        acvf_tfln2(params, lags, 0.5, method="lag"),
        rtol=1e-5,
    )
    assert acvf_tfln2(params, 0.5, method="fourier") == pytest.approx(
        acvf_tfln2(params, 0.5), rel=1e-6
    )
    with pytest.raises(ParameterError):
        acvf_tfln2(params, 2.0, method="differencing")
    if d < 0:
        with pytest.raises(ParameterError):
            acvf_tfln2(params, 0.5, method="lag")


def test_acvf_tfln2_band():
    """Testing the asymptotic band of the noise of the second kind."""
    params = TemperedParams(0.3, 0.5)
    lags = np.geomspace(1.0, 20.0, 16)
    values = np.asarray(acvf_tfln2(params, lags))
    lower, upper = acvf_tfln2_asymptotic_band(params, lags)
    assert np.all(lower <= values * (1.0 + 1e-12))
    assert np.all(values <= upper * (1.0 + 1e-12))
    h = 60.0
    ratio = acvf_tfln2(params, h) * math.exp(0.5 * h) * h ** 0.7
    assert ratio == pytest.approx(acvf_tfln2_limit_constant(params), rel=0.1)


def test_empirical_acvf():
    """Testing the sample autocovariance."""
    np.testing.assert_array_equal(empirical_acvf(np.zeros(100), 10), np.zeros(11))
    samples = np.random.default_rng(1).standard_normal(20000)
    acvf = empirical_acvf(samples, 5)
    assert acvf[0] == pytest.approx(np.var(samples), rel=1e-10)
    assert acvf[0] == pytest.approx(1.0, abs=0.05)
    assert np.all(np.abs(acvf[1:]) < 0.05)
    direct = np.mean((samples[2:] - samples.mean()) * (samples[:-2] - samples.mean()))
    assert acvf[2] == pytest.approx(direct * (samples.size - 2) / samples.size, rel=1e-8)
    with pytest.raises(LengthError):
        empirical_acvf(np.zeros(5), 5)


def test_empirical_acvf_simulated_noise():
    """Testing the sample autocovariance of a simulated noise against the closed form."""
    params = TemperedParams(0.2, 0.3)
    driver = CompoundPoisson(1.0, "uniform", 1.0)
    noise = simulate_noise(params, 2 ** 18 - 1, driver, seed=13, refinement=4)
    assert noise.values.size == 2 ** 18
    acvf = empirical_acvf(noise.values, 20)
    blocks = np.stack([empirical_acvf(block, 20) for block in noise.values.reshape(64, -1)])
    standard_error = blocks.std(axis=0, ddof=1) / math.sqrt(blocks.shape[0])
    lags = np.arange(1, 21)
    expected = acvf_tfln1(params, lags, driver.second_moment())
    assert np.all(np.abs(acvf[1:] - expected) < 4.0 * standard_error[1:])


def test_periodogram():
    """Testing the averaged periodogram."""
    omega, power = periodogram(np.zeros(1024), 256)
    assert omega.size == 128
    assert omega[0] == 0.0 and omega[-1] < math.pi
    np.testing.assert_array_equal(power, 0.0)
    samples = np.random.default_rng(2).standard_normal(2 ** 16)
    _, power = periodogram(samples, 256)
    assert np.mean(power) == pytest.approx(1.0 / (2.0 * math.pi), rel=0.05)
    with pytest.raises(LengthError):
        periodogram(samples, 100)
    with pytest.raises(LengthError):
        periodogram(samples[:128], 256)


def test_fit_semi_lrd():
    """Testing exact recovery of the semi-long-range model."""
    h = np.arange(1.0, 51.0)
    gamma = 2.0 * np.exp(-0.4 * h) * h ** 0.25
    fit = fit_semi_lrd(h, gamma)
    assert fit.lambda_hat == pytest.approx(0.4, rel=1e-10)
    assert fit.delta_hat == pytest.approx(0.25, rel=1e-10)
    assert fit.c_hat == pytest.approx(2.0, rel=1e-10)
    assert fit.fit_range == (1.0, 50.0)
    assert fit.residual_rms < 1e-10
    assert fit.sign == 1 and fit.converged
    negative = fit_semi_lrd(h, -gamma)
    assert negative.sign == -1
    assert negative.lambda_hat == pytest.approx(0.4, rel=1e-10)


def test_fit_semi_lrd_file():
    """Testing the fit on a stored autocovariance table."""
    table, units = read_table(SEMILRD_CSV_FILEPATH)
    assert units == ["lag", "value^2"]
    fit = fit_semi_lrd(table["h"].to_numpy(), table["gamma"].to_numpy())
    assert fit.lambda_hat == pytest.approx(0.3, rel=1e-6)
    assert fit.delta_hat == pytest.approx(0.2, rel=1e-5)
    assert fit.c_hat == pytest.approx(0.8, rel=1e-5)


def test_fit_semi_lrd_pairs():
    """Testing the fit on an array of (h, gamma) pairs."""
    table, _ = read_table(SEMILRD_CSV_FILEPATH)
    paired = fit_semi_lrd(table[["h", "gamma"]].to_numpy())
    separate = fit_semi_lrd(table["h"].to_numpy(), table["gamma"].to_numpy())
    assert paired == separate
    with pytest.raises(ParameterError):
        fit_semi_lrd(np.ones((4, 3)))
    with pytest.raises(ParameterError):
        fit_semi_lrd(np.arange(1.0, 5.0))


@pytest.mark.parametrize("d,lam,sign", [(0.2, 0.3, 1.0), (-0.2, 0.5, -1.0)])
def test_fit_semi_lrd_window_bias(d, lam, sign):
    """Testing the finite-window bias of the memory estimate on exact autocovariances."""
    horizon = 20.0 / lam
    lags = np.linspace(0.5 * horizon, horizon, 40)
    fit = fit_semi_lrd(lags, acvf_tfln1(TemperedParams(d, lam), lags))
    assert fit.lambda_hat == pytest.approx(lam, rel=0.05)
    # NOTE: the O(1/h) term of the lag second difference biases δ on a finite window
    assert 0.02 < sign * (fit.delta_hat - d) < 0.06


def test_fit_semi_lrd_degenerate():
    """Testing the degenerate fits."""
    with pytest.raises(DegenerateFitError):
        fit_semi_lrd(np.array([1.0, 2.0]), np.array([1.0, 0.5]))
    with pytest.raises(DegenerateFitError):
        fit_semi_lrd(np.array([1.0, 2.0, 3.0, 4.0]), np.array([1.0, 0.0, 0.0, 0.0]))
