"""Testing stochastic integration utilities."""
import math
import os
from importlib.resources import files

import numpy as np
import pytest
from scipy import special

from ..analytics import cov_tflp1, cov_tflp2
from ..exceptions import (
    GridError,
    NonConvergenceError,
    OffGridBreakpointError,
    ParameterError,
    RegimeError,
    RegimeMismatchError,
)
from ..levy_driver import CompoundPoisson, SampleGrid
from ..process_sim import (
    PathKind,
    TemperedParams,
    integration_grid,
    kernel_g1,
    kernel_g2_values,
    simulate_tflp1,
    simulate_tflp2,
)
from ..stoch_integration import (
    Convention,
    ElementaryFunction,
    Regime,
    approximate_by_elementary,
    ensemble_isometry,
    integrate_elementary,
    integrate_general,
    inner_product,
    monte_carlo_isometry,
    refinement_distances,
    regime_of,
    transform_integrand,
)
from ..tempered_calculus import GridFunction, tempered_power_density

ELEMENTARY_CSV_FILEPATH = str(files("temperedlevy") / "resources" / "tests" / "elementary.csv")
DRIVER = CompoundPoisson(1.0, "uniform", 1.0)
PATH_GRID = SampleGrid(0.0, 3.0, 96)


def _bump(dx: float) -> GridFunction:
    grid = SampleGrid(-5.0, 5.0, int(round(10.0 / dx)))
    return GridFunction.from_callable(grid, lambda x: np.exp(-(x ** 2)))


def test_regime_of():
    """Testing the integrand spaces of the targets."""
    assert regime_of(TemperedParams(0.3, 1.0), PathKind.TFLP2) == Regime.A1
    assert regime_of(TemperedParams(-0.3, 1.0), PathKind.TFLP2) == Regime.A2
    assert regime_of(TemperedParams(-0.3, 1.0), PathKind.TFLP1) == Regime.A3
    assert regime_of(TemperedParams(0.0, 1.0), PathKind.TFLP1) == Regime.A4
    assert regime_of(TemperedParams(0.3, 1.0), PathKind.TFLP1) == Regime.A4
    for d, target in ((0.0, PathKind.TFLP2), (0.6, PathKind.TFLP1)):
        with pytest.raises(RegimeError):
            regime_of(TemperedParams(d, 1.0), target)


def test_elementary_function(tmpdir):
    """Testing validation, evaluation and persistence of step functions."""
    with pytest.raises(ParameterError):
        ElementaryFunction([0.0, 1.0], [])
    with pytest.raises(ParameterError):
        ElementaryFunction([0.0, 1.0, 2.0], [1.0])
    with pytest.raises(ParameterError):
        ElementaryFunction([0.0, 0.0], [1.0])
    with pytest.raises(ParameterError):
        ElementaryFunction.indicator(1.0, 1.0)
    reversed_indicator = ElementaryFunction.indicator(1.0, -1.0)
    np.testing.assert_array_equal(reversed_indicator.breakpoints, [-1.0, 1.0])
    np.testing.assert_array_equal(reversed_indicator.coefficients, [-1.0])
    f = ElementaryFunction.from_csv(ELEMENTARY_CSV_FILEPATH)
    np.testing.assert_array_equal(f.breakpoints, [0.0, 0.5, 1.5, 2.0])
    np.testing.assert_array_equal(f.coefficients, [2.0, -1.0, 0.5])
    np.testing.assert_array_equal(
        f([-0.1, 0.0, 0.5, 1.0, 1.5, 2.0]), [0.0, 2.0, -1.0, -1.0, 0.5, 0.0]
    )
    np.testing.assert_array_equal(f.scaled(2.0).coefficients, [4.0, -2.0, 1.0])
    filepath = os.path.join(tmpdir, "step.csv")
    f.to_csv(filepath)
    loaded = ElementaryFunction.from_csv(filepath)
    np.testing.assert_array_equal(loaded.breakpoints, f.breakpoints)
    np.testing.assert_array_equal(loaded.coefficients, f.coefficients)


def test_zero_integrand():
    """Testing that the zero integrand has a zero transform and integral."""
    params = TemperedParams(0.3, 1.0)
    zero = GridFunction.zeros(SampleGrid(0.0, 1.0, 32))
    transform = transform_integrand(zero, params)
    assert transform.norm == 0.0
    assert integrate_general(zero, params, DRIVER, seed=1) == 0.0
    step = ElementaryFunction([0.0, 1.0], [0.0])
    assert transform_integrand(step, params, PathKind.TFLP1).norm == 0.0


@pytest.mark.parametrize(
    "d, target",
    [(0.3, PathKind.TFLP2), (-0.3, PathKind.TFLP2), (-0.3, PathKind.TFLP1), (0.3, PathKind.TFLP1)],
)
def test_kernel_reproduction(d, target):
    """Testing that the transform of an indicator is the normalized kernel."""
    params = TemperedParams(d, 1.0)
    grid = SampleGrid(-20.0, 2.0, 22 * 64)
    transform = transform_integrand(ElementaryFunction.indicator(0.0, 1.5), params, target, grid)
    points = grid.points
    away = (np.abs(points) > 1e-6) & (np.abs(points - 1.5) > 1e-6)
    kernel = kernel_g2_values if target == PathKind.TFLP2 else kernel_g1
    expected = kernel(params, 1.5, points[away]) / special.gamma(1.0 + d)
    np.testing.assert_allclose(transform.transformed.values[away], expected, rtol=1e-8, atol=1e-10)


def test_scaled_convention():
    """Testing the alternative operator combination of the first kind."""
    params = TemperedParams(0.3, 1.0)
    grid = SampleGrid(-20.0, 2.0, 22 * 64)
    indicator = ElementaryFunction.indicator(0.0, 1.0)
    scaled = transform_integrand(indicator, params, PathKind.TFLP1, grid, Convention.SCALED)
    points = grid.points
    away = (np.abs(points) > 1e-6) & (np.abs(points - 1.0) > 1e-6)
    y = points[away]
    expected = special.gamma(0.7) * (
        tempered_power_density(0.7, 1.0, 1.0 - y) - tempered_power_density(0.7, 1.0, -y)
    )
    np.testing.assert_allclose(scaled.transformed.values[away], expected, rtol=1e-8, atol=1e-10)
    default = transform_integrand(indicator, params, PathKind.TFLP1, grid)
    with pytest.raises(RegimeMismatchError):
        inner_product(scaled, default)


def test_sampled_integrand():
    """Testing the grid operators against the exact transform of an indicator."""
    params = TemperedParams(0.3, 1.0)
    sampled = GridFunction.from_callable(
        SampleGrid(-1.0, 2.0, 768), lambda x: ((x >= 0.0) & (x < 1.0)).astype(float)
    )
    exact = transform_integrand(
        ElementaryFunction.indicator(0.0, 1.0), params, grid=SampleGrid(-20.0, 2.0, 22 * 256)
    )
    approximate = transform_integrand(sampled, params)
    assert approximate.norm == pytest.approx(exact.norm, rel=3e-2)


def test_inner_product():
    """Testing the isometry against the covariance."""
    grid = SampleGrid(-20.0, 2.0, 22 * 512)
    params = TemperedParams(0.3, 1.0)
    first = transform_integrand(ElementaryFunction.indicator(0.0, 1.0), params, grid=grid)
    second = transform_integrand(ElementaryFunction.indicator(0.0, 2.0), params, grid=grid)
    assert inner_product(first, second) == pytest.approx(cov_tflp2(params, 1.0, 2.0), rel=1e-4)
    assert (first * 2.0).norm == pytest.approx(2.0 * first.norm)
    assert (second - first).norm ** 2 == pytest.approx(cov_tflp2(params, 1.0, 1.0), rel=1e-4)
    polarized = ((first + second).norm ** 2 - (second - first).norm ** 2) / 4.0
    assert polarized == pytest.approx(inner_product(first, second), rel=1e-10)
    ou = TemperedParams(0.0, 1.0)
    third = transform_integrand(ElementaryFunction.indicator(0.0, 1.0), ou, PathKind.TFLP1, grid)
    assert third.norm ** 2 == pytest.approx(cov_tflp1(ou, 1.0, 1.0), rel=1e-4)
    negative = transform_integrand(
        ElementaryFunction.indicator(0.0, 1.0), TemperedParams(-0.3, 1.0), grid=grid
    )
    with pytest.raises(RegimeMismatchError):
        inner_product(first, negative)
    with pytest.raises(GridError):
        inner_product(first, transform_integrand(ElementaryFunction.indicator(0.0, 1.0), params))


def test_integrate_elementary():
    """Testing step integrals along a path."""
    grid = SampleGrid(0.0, 2.0, 8)
    path = simulate_tflp2(TemperedParams(0.3, 0.5), grid, DRIVER, seed=3)
    indicator = ElementaryFunction.indicator(0.0, 1.5)
    assert integrate_elementary(indicator, path) == pytest.approx(path.values[6])
    steps = ElementaryFunction([0.0, 0.5, 1.5, 2.0], [2.0, -1.0, 0.5])
    expected = 2.0 * path.values[2] - (path.values[6] - path.values[2]) + 0.5 * (
        path.values[8] - path.values[6]
    )
    assert integrate_elementary(steps, path) == pytest.approx(expected)
    with pytest.raises(OffGridBreakpointError):
        integrate_elementary(ElementaryFunction.indicator(0.0, 0.3), path)


@pytest.mark.parametrize(
    "d, target, simulator",
    [
        (0.3, PathKind.TFLP2, simulate_tflp2),
        (-0.3, PathKind.TFLP2, simulate_tflp2),
        (0.3, PathKind.TFLP1, simulate_tflp1),
        (-0.3, PathKind.TFLP1, simulate_tflp1),
    ],
)
def test_pathwise_consistency(d, target, simulator):
    """Testing that integrals of indicators reproduce the simulated path."""
    params = TemperedParams(d, 0.5)
    obs_grid = SampleGrid(0.0, 2.0, 8)
    path = simulator(params, obs_grid, DRIVER, seed=11, refinement=4)
    layout = integration_grid(obs_grid, params, refinement=4)
    for index in (1, 5, 8):
        value = integrate_general(
            ElementaryFunction.indicator(0.0, obs_grid.points[index]),
            params,
            DRIVER,
            seed=11,
            target=target,
            grid=layout.grid,
        )
        assert value == pytest.approx(path.values[index], rel=1e-8, abs=1e-8)


def test_monte_carlo_isometry():
    """Testing the Monte Carlo variance of integrals against the isometry."""
    params = TemperedParams(0.3, 1.0)
    grid = SampleGrid(-20.0, 1.0, 21 * 32)
    steps = ElementaryFunction([0.0, 0.5, 1.0], [1.0, -2.0])
    record = monte_carlo_isometry(steps, params, DRIVER, 2000, seed=4, grid=grid)
    assert record.n_draws == 2000
    assert abs(record.z_score) < 4.0
    assert abs(record.mean) < 4.0 * record.mean_std_error
    assert set(record.to_dict()) == {
        "estimate",
        "mc_std_error",
        "predicted_variance",
        "mean",
        "mean_std_error",
        "n_draws",
    }
    sequential = monte_carlo_isometry(steps, params, DRIVER, 50, seed=4, grid=grid, threads=1)
    parallel = monte_carlo_isometry(steps, params, DRIVER, 50, seed=4, grid=grid, threads=3)
    assert sequential.estimate == pytest.approx(parallel.estimate)
    with pytest.raises(ParameterError):
        monte_carlo_isometry(steps, params, DRIVER, 1, grid=grid)


@pytest.mark.parametrize(
    "d,target,regime",
    [
        (0.3, PathKind.TFLP2, Regime.A1),
        (-0.3, PathKind.TFLP2, Regime.A2),
        (-0.3, PathKind.TFLP1, Regime.A3),
        (0.3, PathKind.TFLP1, Regime.A4),
    ],
)
def test_ensemble_isometry(d, target, regime):
    """Testing the variance of integrals along simulated paths in every regime."""
    params = TemperedParams(d, 1.0)
    assert regime_of(params, target) == regime
    smooth = GridFunction.from_callable(PATH_GRID, lambda t: np.sin(math.pi * t / 3.0) ** 2)
    integrands = [ElementaryFunction.indicator(0.0, 1.0), smooth]
    records = ensemble_isometry(
        integrands, params, DRIVER, 2000, PATH_GRID, target, seed=21, refinement=4
    )
    assert len(records) == 2
    for record in records:
        assert record.n_draws == 2000
        assert abs(record.z_score) < 3.0
        assert abs(record.mean) < 4.0 * record.mean_std_error
    if d > 0:
        covariance = cov_tflp2 if target == PathKind.TFLP2 else cov_tflp1
        expected = DRIVER.second_moment() * float(covariance(params, 1.0, 1.0))
        assert records[0].predicted_variance == pytest.approx(expected, rel=1e-2)


def test_ensemble_isometry_errors():
    """Testing integrands the path sums cannot handle."""
    params = TemperedParams(0.3, 1.0)
    with pytest.raises(OffGridBreakpointError):
        ensemble_isometry(
            [ElementaryFunction.indicator(0.0, 0.1)], params, DRIVER, 4, PATH_GRID
        )
    other = GridFunction.from_callable(SampleGrid(0.0, 3.0, 48), np.sin)
    with pytest.raises(GridError):
        ensemble_isometry([other], params, DRIVER, 4, PATH_GRID)
    with pytest.raises(ParameterError):
        ensemble_isometry([ElementaryFunction.indicator(0.0, 1.0)], params, DRIVER, 1, PATH_GRID)
    with pytest.raises(RegimeError):
        ensemble_isometry(
            [ElementaryFunction.indicator(0.0, 1.0)],
            TemperedParams(0.0, 1.0),
            DRIVER,
            4,
            PATH_GRID,
        )


def test_approximate_by_elementary():
    """Testing step approximations in the transform norm."""
    params = TemperedParams(0.3, 1.0)
    step = ElementaryFunction.indicator(0.0, 1.0)
    assert approximate_by_elementary(step, params) is step
    bump = _bump(1.0 / 64.0)
    approximation = approximate_by_elementary(bump, params, tolerance=1e-2)
    assert isinstance(approximation, ElementaryFunction)
    assert approximation.breakpoints[0] == -5.0 and approximation.breakpoints[-1] == 5.0
    distances = refinement_distances(bump, params, levels=(2, 4, 6))
    assert [pieces for pieces, _ in distances] == [4, 16, 64]
    assert distances[0][1] > distances[1][1] > distances[2][1]
    with pytest.raises(NonConvergenceError):
        approximate_by_elementary(bump, params, tolerance=1e-12, max_level=2)
    with pytest.raises(RegimeError):
        approximate_by_elementary(bump, TemperedParams(0.0, 1.0))


def test_general_integral_is_linear():
    """Testing linearity of single draws in the integrand."""
    params = TemperedParams(-0.2, 0.5)
    grid = SampleGrid(-40.0, 2.0, 42 * 16)
    f = ElementaryFunction.indicator(0.0, 1.0)
    g = ElementaryFunction.indicator(1.0, 2.0)
    both = ElementaryFunction([0.0, 1.0, 2.0], [1.0, 3.0])
    single = [integrate_general(h, params, DRIVER, seed=2, grid=grid) for h in (f, g, both)]
    assert single[2] == pytest.approx(single[0] + 3.0 * single[1], abs=1e-10)
    assert math.isfinite(single[2])
