"""Simulation of tempered fractional Lévy processes and their noises."""
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum, auto
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy import integrate, signal, special

from .constants import (
    DEFAULT_SEED,
    GRID_ALIGNMENT_TOLERANCE,
    QUADRATURE_EPSREL,
    QUADRATURE_LIMIT,
    REFINEMENT,
    THREADS,
    TRUNCATION_TOLERANCE,
)
from .exceptions import (
    GridError,
    LagMisalignedError,
    ParameterError,
    QuadratureError,
    TruncationError,
)
from .helpers.data import read_table, write_table
from .levy_driver import LevyDriverSpec, SampleGrid, derive_seed, sample_increments
from .tempered_calculus import (
    incomplete_gamma_increment,
    tempered_power_cell_average,
    tempered_power_primitive,
)


@dataclass(frozen=True)
class TemperedParams:
    """Memory parameter d and tempering rate lam of a process."""

    d: float
    lam: float

    def __post_init__(self) -> None:
        if not self.d > -0.5:
            raise ParameterError(f"Memory parameter [{self.d}] must exceed -1/2.")
        if not self.lam > 0:
            raise ParameterError(f"Tempering [{self.lam}] must be positive.")

    def to_config(self) -> Dict[str, float]:
        return {"d": self.d, "lambda": self.lam}


class PathKind(Enum):
    TFLP1 = auto()
    TFLP2 = auto()
    TFLN1 = auto()
    TFLN2 = auto()


PATH_KIND_MAPPINGS = {kind.name.lower(): kind for kind in PathKind}
NOISE_OF = {PathKind.TFLP1: PathKind.TFLN1, PathKind.TFLP2: PathKind.TFLN2}


def _tempered_power(d: float, lam: float, u: np.ndarray) -> np.ndarray:
    """u_+^d e^{-λ u_+} with 0^0 = 0 and the value 0 at u <= 0."""
    u = np.asarray(u, dtype=float)
    positive = u > 0
    safe = np.where(positive, u, 1.0)
    return np.where(positive, safe ** d * np.exp(-lam * safe), 0.0)


def kernel_g1(params: TemperedParams, t: float, x: np.ndarray) -> np.ndarray:
    """
    Kernel of the process of the first kind.

    g(x) = e^{-λ(t-x)_+}(t-x)_+^d - e^{-λ(-x)_+}(-x)_+^d with 0^0 = 0.

    Args:
        params (TemperedParams): parameters.
        t (float): time.
        x (np.ndarray): integration variable(s).

    Returns:
        np.ndarray: kernel values, a float for scalar x.
    """
    x = np.asarray(x, dtype=float)
    values = _tempered_power(params.d, params.lam, t - x) - _tempered_power(
        params.d, params.lam, -x
    )
    return float(values) if values.ndim == 0 else values


def kernel_g2_values(params: TemperedParams, t: float, y: np.ndarray) -> np.ndarray:
    """
    Closed form of the kernel of the second kind.

    The time integral λ∫_0^t (s-y)_+^d e^{-λ(s-y)_+} ds equals
    λ^{-d} Γ(d+1) [P(d+1, λ(t-y)_+) - P(d+1, λ(-y)_+)].

    Args:
        params (TemperedParams): parameters.
        t (float): time.
        y (np.ndarray): integration variable(s).

    Returns:
        np.ndarray: kernel values, a float for scalar y.
    """
    d, lam = params.d, params.lam
    y = np.asarray(y, dtype=float)
    integral = (
        lam
        * special.gamma(d + 1.0)
        * (
            tempered_power_primitive(d + 1.0, lam, t - y)
            - tempered_power_primitive(d + 1.0, lam, -y)
        )
    )
    values = _tempered_power(d, lam, t - y) - _tempered_power(d, lam, -y) + integral
    return float(values) if values.ndim == 0 else values


def _time_integral(exponent: float, lam: float, t: float, y: float) -> float:
    """∫_0^t (s-y)_+^exponent e^{-λ(s-y)_+} ds, oriented, by adaptive quadrature."""
    lower, upper, orientation = (0.0, t, 1.0) if t >= 0 else (t, 0.0, -1.0)
    if upper <= y:
        return 0.0
    if y >= lower:
        # NOTE: algebraic weight (s - y)^exponent carries the endpoint singularity
        value, error = integrate.quad(
            lambda s: np.exp(-lam * (s - y)),
            y,
            upper,
            weight="alg",
            wvar=(exponent, 0.0),
            epsabs=0.0,
            epsrel=QUADRATURE_EPSREL,
            limit=QUADRATURE_LIMIT,
        )
    else:
        value, error = integrate.quad(
            lambda s: (s - y) ** exponent * np.exp(-lam * (s - y)),
            lower,
            upper,
            epsabs=0.0,
            epsrel=QUADRATURE_EPSREL,
            limit=QUADRATURE_LIMIT,
        )
    if error > 1e-8 * max(1.0, abs(value)):
        raise QuadratureError(
            f"Time integral at t=[{t}], y=[{y}] has error estimate [{error:.3e}]."
        )
    return orientation * value


def kernel_g2(
    params: TemperedParams, t: float, y: float, form: str = "definition"
) -> float:
    """
    Kernel of the process of the second kind by adaptive quadrature.

    Args:
        params (TemperedParams): parameters.
        t (float): time.
        y (float): integration variable.
        form (str): "definition" for g1 plus λ∫_0^t (s-y)_+^d e^{-λ(s-y)_+} ds,
            "derivative" for d∫_0^t (s-y)_+^{d-1} e^{-λ(s-y)_+} ds.

    Returns:
        float: kernel value.

    Raises:
        ParameterError: for an unknown form or the derivative form with d <= 0.
        QuadratureError: when the quadrature tolerance is not met.
    """
    d, lam = params.d, params.lam
    if form == "definition":
        return float(kernel_g1(params, t, y)) + lam * _time_integral(d, lam, t, y)
    if form == "derivative":
        if not d > 0:
            raise ParameterError(f"Derivative form of the kernel needs d > 0, got [{d}].")
        return d * _time_integral(d - 1.0, lam, t, y)
    raise ParameterError(f"Kernel form [{form}] is not supported.")


def truncation_width(params: TemperedParams, tolerance: float = TRUNCATION_TOLERANCE) -> float:
    """
    Smallest R with e^{-λR} max(R, 1)^{max(d, 0)} < tolerance.

    Args:
        params (TemperedParams): parameters.
        tolerance (float): tail bound.

    Returns:
        float: truncation width R.
    """
    power = max(params.d, 0.0)
    width = -math.log(tolerance) / params.lam
    # NOTE: fixed point iteration, increasing and convergent
    for _ in range(50):
        updated = (-math.log(tolerance) + power * math.log(max(width, 1.0))) / params.lam
        if abs(updated - width) < 1e-12 * updated:
            break
        width = updated
    return width * (1.0 + 1e-9)


def truncation_bound(params: TemperedParams, width: float) -> float:
    return math.exp(-params.lam * width) * max(width, 1.0) ** max(params.d, 0.0)


@dataclass
class IntegrationLayout:
    """Fine grid over [-R, t_max] whose every stride-th point from origin is an observation."""

    grid: SampleGrid
    origin: int
    stride: int
    trunc_width: float

    @property
    def observation_indices(self) -> np.ndarray:
        return np.arange(self.origin, self.grid.n_cells + 1, self.stride)


def integration_grid(
    obs_grid: SampleGrid,
    params: TemperedParams,
    trunc_width: float = 0.0,
    refinement: int = REFINEMENT,
    tolerance: float = TRUNCATION_TOLERANCE,
) -> IntegrationLayout:
    """
    Integration grid shared by the simulators and the stochastic integrals.

    Args:
        obs_grid (SampleGrid): observation grid starting at t = 0.
        params (TemperedParams): parameters fixing the truncation.
        trunc_width (float): truncation width, 0 picks it from the tolerance.
        refinement (int): integration cells per observation cell.
        tolerance (float): admissible tail bound.

    Returns:
        IntegrationLayout: grid, index of t = 0 and stride.

    Raises:
        GridError: when the observation grid does not start at 0.
        ParameterError: for a non-positive refinement.
        TruncationError: when a given width leaves a tail above tolerance.
    """
    if abs(obs_grid.x_min) > GRID_ALIGNMENT_TOLERANCE * obs_grid.dx:
        raise GridError(f"Observation grid must start at 0, got [{obs_grid.x_min}].")
    if int(refinement) != refinement or refinement < 1:
        raise ParameterError(f"Refinement [{refinement}] must be a positive integer.")
    refinement = int(refinement)
    if trunc_width < 0:
        raise ParameterError(f"Truncation width [{trunc_width}] must be non-negative.")
    if trunc_width == 0:
        trunc_width = truncation_width(params, tolerance)
    elif truncation_bound(params, trunc_width) >= tolerance:
        raise TruncationError(
            f"Truncation width [{trunc_width}] leaves a tail bound of "
            f"{truncation_bound(params, trunc_width):.3e} above [{tolerance}]."
        )
    n_back = int(math.ceil(trunc_width / obs_grid.dx - GRID_ALIGNMENT_TOLERANCE))
    width = n_back * obs_grid.dx
    grid = SampleGrid(-width, obs_grid.x_max, (n_back + obs_grid.n_cells) * refinement)
    logger.debug(
        f"Integration grid of {grid.n_cells} cells, truncation {width:.4g}, "
        f"refinement {refinement}"
    )
    return IntegrationLayout(grid, n_back * refinement, refinement, width)


def moving_average_weights(
    params: TemperedParams, kind: PathKind, n_cells: int, dx: float
) -> np.ndarray:
    """
    Cell averages w_m of the kernel profile over [(m-1) dx, m dx], w_0 = 0.

    The profile is u_+^d e^{-λu}/Γ(1+d) for the first kind and that plus
    λ times its primitive for the second kind. Exact cell integration
    handles the singularity at u = 0 when d < 0.

    Args:
        params (TemperedParams): parameters.
        kind (PathKind): TFLP1 or TFLP2.
        n_cells (int): number of weights after w_0.
        dx (float): cell width.

    Returns:
        np.ndarray: n_cells + 1 weights.
    """
    d, lam = params.d, params.lam
    m = np.arange(1, n_cells + 1, dtype=float)
    weights = np.zeros(n_cells + 1)
    weights[1:] = (
        lam ** (-(d + 1.0))
        * incomplete_gamma_increment(d + 1.0, lam * (m - 1.0) * dx, lam * m * dx)
        / dx
    )
    if kind == PathKind.TFLP2:
        weights[1:] += lam * tempered_power_cell_average(d + 1.0, lam, (m - 1.0) * dx, m * dx)
    return weights


def _derivative_weights(
    params: TemperedParams, kind: PathKind, n_cells: int, dx: float
) -> np.ndarray:
    """Cell averages of the time derivative of the kernel profile, for d > 1/2."""
    d, lam = params.d, params.lam
    u = dx * np.arange(n_cells + 1, dtype=float)
    if kind == PathKind.TFLP1:
        profile = _tempered_power(d, lam, u) / special.gamma(1.0 + d)
    else:
        profile = tempered_power_primitive(d, lam, u)
    weights = np.zeros(n_cells + 1)
    weights[1:] = np.diff(profile) / dx
    return weights


@dataclass
class SamplePath:
    """Simulated path on an observation grid with its provenance."""

    grid: SampleGrid
    values: np.ndarray
    params: TemperedParams
    driver: LevyDriverSpec
    seed: int
    kind: PathKind
    trunc_width: float = 0.0
    refinement: int = 1

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_cells + 1,):
            raise GridError(
                f"Path of {self.values.size} values does not fit a grid of "
                f"{self.grid.n_cells} cells."
            )

    @property
    def times(self) -> np.ndarray:
        return self.grid.points

    def metadata(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_config(),
            "driver": self.driver.to_config(),
            "seed": self.seed,
            "kind": self.kind.name.lower(),
            "truncation": self.trunc_width,
            "refinement": self.refinement,
        }

    def to_csv(self, filepath: str) -> str:
        """
        Write the path as CSV (t, value) and its metadata as a JSON sidecar.

        Args:
            filepath (str): CSV destination.

        Returns:
            str: path of the sidecar.
        """
        write_table(
            pd.DataFrame({"t": self.times, "value": self.values}),
            filepath,
            units=["time", "value"],
        )
        sidecar = f"{os.path.splitext(filepath)[0]}.json"
        with open(sidecar, "w") as fp:
            json.dump(self.metadata(), fp, indent=2, sort_keys=True)
        return sidecar

    @staticmethod
    def from_csv(filepath: str) -> "SamplePath":
        """
        Read a path written by to_csv.

        Args:
            filepath (str): CSV path, the sidecar is expected next to it.

        Returns:
            SamplePath: the path.
        """
        table, _ = read_table(filepath)
        with open(f"{os.path.splitext(filepath)[0]}.json") as fp:
            metadata = json.load(fp)
        times = table["t"].to_numpy()
        return SamplePath(
            grid=SampleGrid(times[0], times[-1], times.size - 1),
            values=table["value"].to_numpy(),
            params=TemperedParams(metadata["params"]["d"], metadata["params"]["lambda"]),
            driver=LevyDriverSpec.from_config(metadata["driver"]),
            seed=metadata["seed"],
            kind=PATH_KIND_MAPPINGS[metadata["kind"]],
            trunc_width=metadata["truncation"],
            refinement=metadata["refinement"],
        )


def _moving_average(increments: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Y_i = sum_{k < i} increments_k weights_{i-k}, i = 0..len(increments)."""
    return signal.fftconvolve(increments, weights)[: increments.size + 1]


def _simulate_direct(
    params: TemperedParams,
    kind: PathKind,
    obs_grid: SampleGrid,
    driver: LevyDriverSpec,
    trunc_width: float,
    seed: int,
    refinement: int,
    tolerance: float,
) -> SamplePath:
    layout = integration_grid(obs_grid, params, trunc_width, refinement, tolerance)
    increments = sample_increments(driver, layout.grid, seed)
    weights = moving_average_weights(params, kind, layout.grid.n_cells, layout.grid.dx)
    averaged = _moving_average(increments, weights)
    observed = averaged[layout.observation_indices]
    values = observed - averaged[layout.origin]
    values[0] = 0.0
    return SamplePath(
        obs_grid, values, params, driver, seed, kind, layout.trunc_width, layout.stride
    )


def simulate_tflp1(
    params: TemperedParams,
    obs_grid: SampleGrid,
    driver: LevyDriverSpec,
    trunc_width: float = 0.0,
    seed: int = DEFAULT_SEED,
    refinement: int = REFINEMENT,
    tolerance: float = TRUNCATION_TOLERANCE,
) -> SamplePath:
    """
    Simulate the process of the first kind by Riemann-Stieltjes sums.

    S(t) = (1/Γ(1+d)) Σ_k ΔL_k times the cell average of g1(t, .) over the
    k-th integration cell, on an integration grid covering [-R, t_max].
    For -1/2 < d < 0 the grid values converge in law only, the continuum
    paths being unbounded.

    Args:
        params (TemperedParams): parameters, d = 0 gives the Lévy OU case.
        obs_grid (SampleGrid): observation grid starting at 0.
        driver (LevyDriverSpec): driving Lévy process.
        trunc_width (float): truncation width, 0 picks it automatically.
        seed (int): seed of the driver increments.
        refinement (int): integration cells per observation cell.
        tolerance (float): truncation tail bound.

    Returns:
        SamplePath: path of kind TFLP1 with value 0 at t = 0.
    """
    if params.d < 0:
        logger.debug("Negative memory parameter, grid values converge in law only")
    return _simulate_direct(
        params, PathKind.TFLP1, obs_grid, driver, trunc_width, seed, refinement, tolerance
    )


def simulate_tflp2(
    params: TemperedParams,
    obs_grid: SampleGrid,
    driver: LevyDriverSpec,
    trunc_width: float = 0.0,
    seed: int = DEFAULT_SEED,
    refinement: int = REFINEMENT,
    tolerance: float = TRUNCATION_TOLERANCE,
) -> SamplePath:
    """
    Simulate the process of the second kind by Riemann-Stieltjes sums.

    Same scheme as simulate_tflp1 with the kernel of the second kind, whose
    time integral is integrated in closed form over every cell.

    Returns:
        SamplePath: path of kind TFLP2.

    Raises:
        ParameterError: for d = 0.
    """
    if params.d == 0:
        raise ParameterError("Process of the second kind needs d != 0.")
    return _simulate_direct(
        params, PathKind.TFLP2, obs_grid, driver, trunc_width, seed, refinement, tolerance
    )


def simulate_smooth_regime(
    params: TemperedParams,
    obs_grid: SampleGrid,
    driver: LevyDriverSpec,
    trunc_width: float = 0.0,
    seed: int = DEFAULT_SEED,
    kind: PathKind = PathKind.TFLP1,
    refinement: int = REFINEMENT,
    tolerance: float = TRUNCATION_TOLERANCE,
) -> SamplePath:
    """
    Simulate an absolutely continuous path, d > 1/2.

    The inner process V(s) = ∫ ∂_s kernel(s - x) dL(x) is computed on the
    integration grid and integrated in time with the trapezoidal rule from 0.
    Same seed and grid give the same increments as the direct simulators.

    Args:
        params (TemperedParams): parameters with d > 1/2.
        obs_grid (SampleGrid): observation grid starting at 0.
        driver (LevyDriverSpec): driving Lévy process.
        trunc_width (float): truncation width, 0 picks it automatically.
        seed (int): seed of the driver increments.
        kind (PathKind): TFLP1 or TFLP2.
        refinement (int): integration cells per observation cell.
        tolerance (float): truncation tail bound.

    Returns:
        SamplePath: path of the requested kind.

    Raises:
        ParameterError: for d <= 1/2 or a noise kind.
    """
    if not params.d > 0.5:
        raise ParameterError(f"Smooth representation needs d > 1/2, got [{params.d}].")
    if kind not in NOISE_OF:
        raise ParameterError(f"Smooth representation simulates processes, not [{kind.name}].")
    layout = integration_grid(obs_grid, params, trunc_width, refinement, tolerance)
    increments = sample_increments(driver, layout.grid, seed)
    weights = _derivative_weights(params, kind, layout.grid.n_cells, layout.grid.dx)
    inner = _moving_average(increments, weights)[layout.origin :]
    path = integrate.cumulative_trapezoid(inner, dx=layout.grid.dx, initial=0.0)
    return SamplePath(
        obs_grid,
        path[:: layout.stride],
        params,
        driver,
        seed,
        kind,
        layout.trunc_width,
        layout.stride,
    )


SIMULATOR_FACTORY: Dict[PathKind, Callable[..., SamplePath]] = {
    PathKind.TFLP1: simulate_tflp1,
    PathKind.TFLP2: simulate_tflp2,
}


def noise_path(path: SamplePath, unit_lag: float = 1.0) -> SamplePath:
    """
    Increment series X(t) = S(t + unit_lag) - S(t).

    Args:
        path (SamplePath): path of kind TFLP1 or TFLP2.
        unit_lag (float): lag, an integer multiple of the grid step.

    Returns:
        SamplePath: noise on the grid truncated by the lag.

    Raises:
        ParameterError: for a noise path.
        LagMisalignedError: when the lag is not a multiple of the step.
    """
    if path.kind not in NOISE_OF:
        raise ParameterError(f"Path of kind [{path.kind.name}] is already a noise.")
    ratio = unit_lag / path.grid.dx
    shift = int(round(ratio))
    if shift < 1 or abs(ratio - shift) > GRID_ALIGNMENT_TOLERANCE * max(1.0, ratio):
        raise LagMisalignedError(unit_lag, path.grid.dx)
    if shift >= path.grid.n_cells:
        raise LagMisalignedError(unit_lag, path.grid.dx)
    n_cells = path.grid.n_cells - shift
    grid = SampleGrid(path.grid.x_min, path.grid.x_min + n_cells * path.grid.dx, n_cells)
    return SamplePath(
        grid,
        path.values[shift:] - path.values[:-shift],
        path.params,
        path.driver,
        path.seed,
        NOISE_OF[path.kind],
        path.trunc_width,
        path.refinement,
    )


def simulate_noise(
    params: TemperedParams,
    n_lags: int,
    driver: LevyDriverSpec,
    kind: PathKind = PathKind.TFLN1,
    steps_per_lag: int = 1,
    seed: int = DEFAULT_SEED,
    **kwargs: Any,
) -> SamplePath:
    """
    Simulate n_lags + 1 values of a noise sampled at integer times.

    Args:
        params (TemperedParams): parameters.
        n_lags (int): last lag.
        driver (LevyDriverSpec): driving Lévy process.
        kind (PathKind): TFLN1 or TFLN2.
        steps_per_lag (int): observation cells per unit lag.
        seed (int): seed of the driver increments.
        kwargs: forwarded to the process simulator.

    Returns:
        SamplePath: noise at times 0..n_lags.
    """
    process_kind = {noise: process for process, noise in NOISE_OF.items()}.get(kind)
    if process_kind is None:
        raise ParameterError(f"Kind [{kind.name}] is not a noise.")
    n_cells = (n_lags + 1) * steps_per_lag
    grid = SampleGrid(0.0, float(n_lags + 1), n_cells)
    path = SIMULATOR_FACTORY[process_kind](params, grid, driver, seed=seed, **kwargs)
    noise = noise_path(path, 1.0)
    indices = np.arange(0, noise.grid.n_cells + 1, steps_per_lag)
    return SamplePath(
        SampleGrid(0.0, float(n_lags), n_lags),
        noise.values[indices],
        params,
        driver,
        seed,
        kind,
        path.trunc_width,
        path.refinement,
    )


def simulate_ensemble(
    simulator: Callable[..., SamplePath],
    n_paths: int,
    seed: int = DEFAULT_SEED,
    threads: int = THREADS,
    **kwargs: Any,
) -> np.ndarray:
    """
    Simulate independent paths with seeds derived from a base seed.

    Members are keyed by their index, results come back in index order
    regardless of the number of workers.

    Args:
        simulator (Callable[..., SamplePath]): simulate_* function.
        n_paths (int): ensemble size.
        seed (int): base seed.
        threads (int): worker count.
        kwargs: forwarded to the simulator.

    Returns:
        np.ndarray: (n_paths, n_points) path values.
    """
    if n_paths < 1:
        raise ParameterError(f"Ensemble size [{n_paths}] must be positive.")

    def member(index: int) -> np.ndarray:
        return simulator(seed=derive_seed(seed, index), **kwargs).values

    logger.info(f"Simulating {n_paths} paths on {threads} threads")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return np.stack(list(executor.map(member, range(n_paths))))


def _lag_indices(
    grid: SampleGrid, tau_range: Optional[Tuple[float, float]], lam: float, n_lags: int = 12
) -> np.ndarray:
    tau_min, tau_max = tau_range if tau_range else (4.0 * grid.dx, 0.1 / lam)
    low = max(1, int(round(tau_min / grid.dx)))
    high = min(grid.n_cells // 4, int(round(tau_max / grid.dx)))
    if high <= low:
        raise GridError(
            f"Lag range [{tau_min}, {tau_max}] holds fewer than two lags of the grid."
        )
    return np.unique(np.round(np.geomspace(low, high, n_lags)).astype(int))


def holder_exponent(
    values: np.ndarray,
    grid: SampleGrid,
    lam: float,
    tau_range: Optional[Tuple[float, float]] = None,
) -> float:
    """
    Slope of log max_t |S(t + τ) - S(t)| against log τ.

    Args:
        values (np.ndarray): path values.
        grid (SampleGrid): observation grid.
        lam (float): tempering, fixes the default lag range.
        tau_range (Optional[Tuple[float, float]]): lags, default [4 dx, 0.1/λ].

    Returns:
        float: estimated Hölder exponent.
    """
    lags = _lag_indices(grid, tau_range, lam)
    oscillation = np.array([np.abs(values[k:] - values[:-k]).max() for k in lags])
    slope, _ = np.polyfit(np.log(lags * grid.dx), np.log(oscillation), 1)
    return float(slope)


def structure_exponent(
    paths: np.ndarray, grid: SampleGrid, lam: float, tau_range: Optional[Tuple[float, float]] = None
) -> float:
    """
    Slope of log E|S(t + τ) - S(t)|² against log τ over paths and times.

    Args:
        paths (np.ndarray): (n_paths, n_points) values, or a single path.
        grid (SampleGrid): observation grid.
        lam (float): tempering, fixes the default lag range.
        tau_range (Optional[Tuple[float, float]]): lags, default [4 dx, 0.1/λ].

    Returns:
        float: estimated exponent.
    """
    paths = np.atleast_2d(paths)
    lags = _lag_indices(grid, tau_range, lam)
    moments = np.array([np.mean((paths[:, k:] - paths[:, :-k]) ** 2) for k in lags])
    slope, _ = np.polyfit(np.log(lags * grid.dx), np.log(moments), 1)
    return float(slope)


def total_variation(values: np.ndarray) -> float:
    """Discrete total variation Σ|S(t_{j+1}) - S(t_j)|."""
    return float(np.sum(np.abs(np.diff(values))))
