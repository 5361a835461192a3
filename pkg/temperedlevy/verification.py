"""Verification suites run by the verify command."""
import math
from dataclasses import dataclass
from enum import Enum, auto
from typing import Callable, Dict, List

import numpy as np
import pandas as pd
from loguru import logger
from scipy import integrate

from . import analytics
from .analytics import ArrayLike
from .constants import DEFAULT_SEED
from .levy_driver import CompoundPoisson, SampleGrid
from .process_sim import PathKind, TemperedParams, kernel_g1, kernel_g2_values, simulate_noise
from .stoch_integration import ElementaryFunction, ensemble_isometry, transform_integrand
from .tempered_calculus import (
    GridFunction,
    fourier_multiplier,
    frac_derivative_minus,
    frac_integral_minus,
)


class Budget(Enum):
    QUICK = auto()
    FULL = auto()


BUDGET_MAPPINGS = {budget.name.lower(): budget for budget in Budget}


@dataclass
class CheckResult:
    """Outcome of one verification check."""

    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool

    @staticmethod
    def relative(name: str, measured: float, expected: float, tolerance: float) -> "CheckResult":
        error = abs(measured - expected) / max(abs(expected), 1e-300)
        return CheckResult(name, measured, expected, tolerance, bool(error <= tolerance))

    @staticmethod
    def absolute(name: str, measured: float, expected: float, tolerance: float) -> "CheckResult":
        return CheckResult(
            name, measured, expected, tolerance, bool(abs(measured - expected) <= tolerance)
        )


def _bump(dx: float, half_width: float = 10.0) -> GridFunction:
    n_cells = int(round(2.0 * half_width / dx))
    return GridFunction.from_callable(
        SampleGrid(-half_width, half_width, n_cells), lambda x: np.exp(-(x ** 2))
    )


def calculus_suite(budget: Budget, seed: int) -> List[CheckResult]:
    """Inversion order, multiplier agreement and semigroup property of the grid operators."""
    lam = 1.0
    exponents = range(4, 8) if budget == Budget.QUICK else range(4, 10)
    results = []
    for kappa in (0.2, 0.5, 0.8):
        steps, errors = [], []
        for exponent in exponents:
            f = _bump(2.0 ** -exponent)
            roundtrip = frac_derivative_minus(frac_integral_minus(f, kappa, lam), kappa, lam)
            steps.append(f.grid.dx)
            errors.append(np.abs(roundtrip.values - f.values).max())
        order, _ = np.polyfit(np.log(steps), np.log(errors), 1)
        nominal = min(1.0, 1.0 - kappa)
        results.append(
            CheckResult(
                f"inversion order kappa={kappa}",
                float(order),
                nominal,
                0.15,
                bool(order >= nominal - 0.15),
            )
        )
        f = _bump(2.0 ** -6)
        marchaud = frac_derivative_minus(f, kappa, lam)
        spectral = fourier_multiplier(f, kappa, lam, "-")
        difference = np.linalg.norm(marchaud.values - spectral.values) / np.linalg.norm(
            spectral.values
        )
        results.append(
            CheckResult(
                f"multiplier vs marchaud kappa={kappa}",
                float(difference),
                0.0,
                4.0 * f.grid.dx ** (2.0 - kappa),
                bool(difference <= 4.0 * f.grid.dx ** (2.0 - kappa)),
            )
        )
    f = _bump(2.0 ** -6)
    composed = frac_integral_minus(frac_integral_minus(f, 0.3, lam), 0.4, lam)
    direct = frac_integral_minus(f, 0.7, lam)
    results.append(
        CheckResult.absolute(
            "semigroup I^0.4 I^0.3 = I^0.7",
            float(np.abs(composed.values - direct.values).max() / np.abs(direct.values).max()),
            0.0,
            1e-3,
        )
    )
    return results


def covariance_suite(budget: Budget, seed: int) -> List[CheckResult]:
    """Bessel covariance formulas against kernel quadrature, and the variance plateau."""
    results = []
    times = (1.0, 2.5) if budget == Budget.QUICK else tuple(np.linspace(0.6, 3.0, 5))
    for d in (-0.3, 0.2, 0.45):
        for lam in (0.5, 2.0):
            params = TemperedParams(d, lam)
            for s in times:
                for t in times:
                    results.append(
                        CheckResult.relative(
                            f"cov1 d={d} lambda={lam} s={s:.2f} t={t:.2f}",
                            float(analytics.cov_tflp1(params, s, t)),
                            analytics.cov_tflp1_quadrature(params, s, t),
                            1e-6,
                        )
                    )
            results.append(
                CheckResult.relative(
                    f"plateau d={d} lambda={lam}",
                    float(analytics.cov_tflp1(params, 20.0 / lam, 20.0 / lam)),
                    analytics.var_limit_tflp1(params),
                    1e-5,
                )
            )
    pairs = ((1.0, 1.0),) if budget == Budget.QUICK else ((1.0, 1.0), (0.5, 2.0), (1.5, 2.0))
    for d in (0.2, 0.45):
        params = TemperedParams(d, 1.0)
        for s, t in pairs:
            results.append(
                CheckResult.relative(
                    f"cov2 d={d} s={s} t={t}",
                    analytics.cov_tflp2(params, s, t),
                    analytics.cov_tflp2_quadrature(params, s, t),
                    1e-5,
                )
            )
    return results


ISOMETRY_CASES = (
    ("A1", PathKind.TFLP2, 0.3),
    ("A2", PathKind.TFLP2, -0.3),
    ("A3", PathKind.TFLP1, -0.3),
    ("A4", PathKind.TFLP1, 0.3),
)

ISOMETRY_GRID = SampleGrid(0.0, 3.0, 96)

ISOMETRY_INTEGRANDS = (
    ElementaryFunction.indicator(0.0, 1.0),
    ElementaryFunction.indicator(2.0, 1.0),
    ElementaryFunction([0.0, 0.5, 1.5], [2.0, -1.0]),
    ElementaryFunction([0.0, 1.0, 2.0, 3.0], [1.0, 0.5, -0.5]),
    GridFunction.from_callable(ISOMETRY_GRID, lambda t: np.sin(math.pi * t / 3.0) ** 2),
)


def isometry_suite(budget: Budget, seed: int, n_draws: int = 0) -> List[CheckResult]:
    """Kernel reproduction and the isometry on simulated paths in every regime."""
    n_paths = n_draws or (400 if budget == Budget.QUICK else 10000)
    driver = CompoundPoisson(1.0, "uniform", 1.0)
    results = []
    for regime, target, d in ISOMETRY_CASES:
        params = TemperedParams(d, 1.0)
        indicator = ElementaryFunction.indicator(0.0, 1.0)
        transform = transform_integrand(indicator, params, target)
        y = transform.grid.points
        if target == PathKind.TFLP2:
            kernel = np.asarray(kernel_g2_values(params, 1.0, y)) / math.gamma(1.0 + d)
        else:
            kernel = np.asarray(kernel_g1(params, 1.0, y)) / math.gamma(1.0 + d)
        results.append(
            CheckResult.absolute(
                f"{regime} kernel reproduction",
                float(np.abs(transform.transformed.values - kernel).max()),
                0.0,
                1e-3,
            )
        )
        records = ensemble_isometry(
            ISOMETRY_INTEGRANDS, params, driver, n_paths, ISOMETRY_GRID, target, seed, refinement=4
        )
        for index, record in enumerate(records):
            results.append(
                CheckResult.absolute(
                    f"{regime} isometry integrand {index}",
                    record.estimate,
                    record.predicted_variance,
                    3.0 * record.mc_std_error,
                )
            )
    return results


def _two_sided_mass(envelope: Callable[[float], float], split: float = 60.0) -> float:
    """∫ (1 - cos ω) envelope(ω) dω over the real line, envelope even."""
    head, _ = integrate.quad(
        lambda w: (1.0 - math.cos(w)) * envelope(w),
        0.0,
        split,
        epsabs=0.0,
        epsrel=1e-12,
        limit=1000,
    )
    plain, _ = integrate.quad(envelope, split, np.inf, epsabs=1e-15)
    oscillating, _ = integrate.quad(
        envelope, split, np.inf, weight="cos", wvar=1.0, epsabs=1e-15
    )
    return 2.0 * (head + plain - oscillating)


def spectra_suite(budget: Budget, seed: int) -> List[CheckResult]:
    """Plancherel identities, semi-long-range fits and periodogram shapes."""
    results = []
    d, lam = 0.3, 0.5
    params = TemperedParams(d, lam)
    # NOTE: the densities integrate to γ(0) / (2 EL2)
    mass = _two_sided_mass(lambda w: 1.0 / (2.0 * math.pi * (lam ** 2 + w ** 2) ** (d + 1.0)))
    results.append(
        CheckResult.relative(
            "plancherel first kind", 2.0 * mass, float(analytics.acvf_tfln1(params, 0.0)), 1e-6
        )
    )
    mass = _two_sided_mass(
        lambda w: 1.0 / (2.0 * math.pi * w ** 2 * (lam ** 2 + w ** 2) ** d)
    )
    results.append(
        CheckResult.relative(
            "plancherel second kind", 2.0 * mass, float(analytics.acvf_tfln2(params, 0.0)), 1e-6
        )
    )
    for d, lam in ((0.2, 0.3), (-0.2, 0.5)):
        horizon = 20.0 / lam
        lags = np.linspace(0.5 * horizon, horizon, 40)
        fit = analytics.fit_semi_lrd(lags, analytics.acvf_tfln1(TemperedParams(d, lam), lags))
        results.append(
            CheckResult.relative(f"semi-lrd lambda d={d}", fit.lambda_hat, lam, 0.05)
        )
        results.append(CheckResult.absolute(f"semi-lrd delta d={d}", fit.delta_hat, d, 0.06))
    second = TemperedParams(0.4, 0.5)
    lags = np.linspace(20.0, 40.0, 12)
    fit = analytics.fit_semi_lrd(lags, analytics.acvf_tfln2(second, lags))
    results.append(CheckResult.absolute("semi-lrd delta second kind", fit.delta_hat, -0.6, 0.1))
    first = TemperedParams(0.2, 0.3)
    driver = CompoundPoisson(1.0, "uniform", 1.0)
    n_lags = 2 ** 16 if budget == Budget.QUICK else 2 ** 18
    noise = simulate_noise(first, n_lags, driver, seed=seed, refinement=4)
    omega, power = analytics.periodogram(noise.values, 1024)
    band = (omega > 0.05) & (omega < 2.5)
    slope, _ = np.polyfit(
        np.log(_aliased(analytics.spec_density_tfln1, first, omega[band])),
        np.log(power[band]),
        1,
    )
    results.append(CheckResult.absolute("periodogram slope first kind", float(slope), 1.0, 0.1))
    results.extend(_flattening_checks(TemperedParams(0.4, 0.1), driver, seed + 1))
    return results


def _aliased(
    density: Callable[..., ArrayLike], params: TemperedParams, omega: np.ndarray, images: int = 64
) -> np.ndarray:
    """Spectral density of the noise sampled at unit lags, Σ_k h(ω + 2πk)."""
    shifts = 2.0 * math.pi * np.arange(-images, images + 1)
    return np.asarray(density(params, omega[:, None] + shifts[None, :])).sum(axis=1)


def _log_slope(omega: np.ndarray, power: np.ndarray, low: float, high: float) -> float:
    band = (omega >= low) & (omega <= high)
    slope, _ = np.polyfit(np.log(omega[band]), np.log(power[band]), 1)
    return float(slope)


def _flattening_checks(
    params: TemperedParams, driver: CompoundPoisson, seed: int
) -> List[CheckResult]:
    """Level and low-frequency flattening of the periodogram of the second kind."""
    lam, el2 = params.lam, driver.second_moment()
    noise = simulate_noise(params, 2 ** 18, driver, PathKind.TFLN2, seed=seed, refinement=4)
    omega, power = analytics.periodogram(noise.values, 2 ** 13)
    band = (omega >= 0.05 * lam) & (omega <= 12.0 * lam)
    expected = 2.0 * el2 * _aliased(analytics.spec_density_tfln2, params, omega[band])
    low = _log_slope(omega, power, 0.05 * lam, 0.3 * lam)
    mid = _log_slope(omega, power, 3.0 * lam, 12.0 * lam)
    ratio = abs(low) / abs(mid)
    return [
        CheckResult.relative(
            "periodogram level second kind", float(np.mean(power[band] / expected)), 1.0, 0.1
        ),
        CheckResult("von karman flattening second kind", ratio, 0.0, 0.3, bool(ratio < 0.3)),
    ]


SUITES: Dict[str, Callable[..., List[CheckResult]]] = {
    "calculus": calculus_suite,
    "covariance": covariance_suite,
    "isometry": isometry_suite,
    "spectra": spectra_suite,
}


def run_suite(
    name: str, budget: Budget = Budget.QUICK, seed: int = DEFAULT_SEED, n_draws: int = 0
) -> List[CheckResult]:
    """
    Run a named suite, "all" runs every suite.

    Args:
        name (str): suite name.
        budget (Budget): quick or full.
        seed (int): base seed of the Monte Carlo checks.
        n_draws (int): Monte Carlo draws of the isometry checks, 0 for the budget default.

    Returns:
        List[CheckResult]: check outcomes.
    """
    names = list(SUITES) if name == "all" else [name]
    results: List[CheckResult] = []
    for suite in names:
        logger.info(f"Running {suite} suite ({budget.name.lower()} budget)")
        if suite == "isometry":
            results.extend(isometry_suite(budget, seed, n_draws))
        else:
            results.extend(SUITES[suite](budget, seed))
    return results


def results_table(results: List[CheckResult]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "check": [result.name for result in results],
            "measured": [result.measured for result in results],
            "expected": [result.expected for result in results],
            "tolerance": [result.tolerance for result in results],
            "passed": [result.passed for result in results],
        }
    )
