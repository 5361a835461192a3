"""Wiener-type stochastic integrals against the tempered fractional processes."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum, auto
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger
from scipy import special

from .constants import DEFAULT_SEED, MAX_REFINEMENT_LEVEL, REFINEMENT, THREADS
from .exceptions import (
    GridError,
    NonConvergenceError,
    OffGridBreakpointError,
    ParameterError,
    RegimeError,
    RegimeMismatchError,
)
from .helpers.data import read_table, write_table
from .levy_driver import LevyDriverSpec, SampleGrid, derive_seed, sample_increments
from .process_sim import (
    PathKind,
    SamplePath,
    TemperedParams,
    integration_grid,
    simulate_ensemble,
    simulate_tflp1,
    simulate_tflp2,
    truncation_width,
)
from .tempered_calculus import (
    GridFunction,
    frac_derivative_minus,
    frac_integral_minus,
    tempered_power_cell_average,
    tempered_power_density,
    tempered_power_primitive,
)


class Regime(Enum):
    A1 = auto()
    A2 = auto()
    A3 = auto()
    A4 = auto()


class Convention(Enum):
    """Operator combination used for the process of the first kind."""

    KERNEL = auto()
    SCALED = auto()


CONVENTION_MAPPINGS = {convention.name.lower(): convention for convention in Convention}
TARGET_MAPPINGS = {"tflp1": PathKind.TFLP1, "tflp2": PathKind.TFLP2}


def regime_of(params: TemperedParams, target: PathKind) -> Regime:
    """
    Integrand space for a target process.

    Args:
        params (TemperedParams): parameters.
        target (PathKind): TFLP1 or TFLP2.

    Returns:
        Regime: A1 or A2 for the second kind, A3 or A4 for the first kind.

    Raises:
        RegimeError: when d admits no integrand space for the target.
    """
    d = params.d
    if target == PathKind.TFLP2:
        if d > 0:
            return Regime.A1
        if d < 0:
            return Regime.A2
    elif target == PathKind.TFLP1:
        if -0.5 < d < 0:
            return Regime.A3
        if 0 <= d < 0.5:
            return Regime.A4
    raise RegimeError(target.name, d)


@dataclass
class ElementaryFunction:
    """Step function Σ a_i 1_{[t_i, t_{i+1})}."""

    breakpoints: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.size < 1:
            raise ParameterError("Elementary function needs at least one piece.")
        if self.breakpoints.size != self.coefficients.size + 1:
            raise ParameterError(
                f"Elementary function with {self.coefficients.size} pieces needs "
                f"{self.coefficients.size + 1} breakpoints, got {self.breakpoints.size}."
            )
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ParameterError("Breakpoints must be strictly increasing.")

    @staticmethod
    def indicator(start: float, stop: float) -> "ElementaryFunction":
        """
        Indicator of [start, stop], the negative of the one of [stop, start] when stop < start.

        Args:
            start (float): first end.
            stop (float): second end, different from start.

        Returns:
            ElementaryFunction: the oriented indicator.
        """
        if start == stop:
            raise ParameterError(f"Indicator of the empty interval [{start}, {stop}].")
        if stop < start:
            return ElementaryFunction([stop, start], [-1.0])
        return ElementaryFunction([start, stop], [1.0])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        index = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (index >= 0) & (index < self.coefficients.size)
        clipped = np.clip(index, 0, self.coefficients.size - 1)
        return np.where(inside, self.coefficients[clipped], 0.0)

    def scaled(self, factor: float) -> "ElementaryFunction":
        return ElementaryFunction(self.breakpoints.copy(), factor * self.coefficients)

    def sample(self, grid: SampleGrid) -> GridFunction:
        return GridFunction(grid, self(grid.points))

    def to_csv(self, filepath: str) -> None:
        """
        Write breakpoints and coefficients, the last row carrying a zero coefficient.

        Args:
            filepath (str): destination path.
        """
        write_table(
            pd.DataFrame(
                {"t": self.breakpoints, "a": np.append(self.coefficients, 0.0)}
            ),
            filepath,
            units=["time", "value"],
        )

    @staticmethod
    def from_csv(filepath: str) -> "ElementaryFunction":
        """
        Read a function written by to_csv.

        Args:
            filepath (str): path to the CSV file.

        Returns:
            ElementaryFunction: the step function.
        """
        table, _ = read_table(filepath)
        return ElementaryFunction(
            table.iloc[:, 0].to_numpy(), table.iloc[:-1, 1].to_numpy()
        )


Integrand = Union[GridFunction, ElementaryFunction]


@dataclass(frozen=True)
class KernelTerm:
    """coefficient times J_κ, or its derivative, with J_κ(u) = λ^{-κ} P(κ, λu_+)."""

    coefficient: float
    kappa: float
    derivative: bool = False

    def values(self, lam: float, u: np.ndarray) -> np.ndarray:
        if self.derivative:
            return self.coefficient * tempered_power_density(self.kappa, lam, u)
        return self.coefficient * tempered_power_primitive(self.kappa, lam, u)

    def cell_average(self, lam: float, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
        if self.derivative:
            increment = tempered_power_primitive(self.kappa, lam, upper) - tempered_power_primitive(
                self.kappa, lam, lower
            )
            return self.coefficient * increment / (upper - lower)
        return self.coefficient * tempered_power_cell_average(self.kappa, lam, lower, upper)


def kernel_terms(
    params: TemperedParams, regime: Regime, convention: Convention = Convention.KERNEL
) -> List[KernelTerm]:
    """
    Profile K with transform of 1_{[a, b)} equal to K(b - y) - K(a - y).

    The TFLP profiles reproduce g1/Γ(1+d) with the KERNEL convention; the
    SCALED convention gives the profile Γ(1-d) J'_{1-d}.

    Args:
        params (TemperedParams): parameters.
        regime (Regime): integrand space.
        convention (Convention): operator combination for A3 and A4.

    Returns:
        List[KernelTerm]: terms of the profile.
    """
    d, lam = params.d, params.lam
    if regime == Regime.A1:
        return [KernelTerm(1.0, d)]
    if regime == Regime.A2:
        return [KernelTerm(lam, 1.0 + d), KernelTerm(1.0, 1.0 + d, derivative=True)]
    if convention == Convention.SCALED:
        return [KernelTerm(special.gamma(1.0 - d), 1.0 - d, derivative=True)]
    return [KernelTerm(1.0, 1.0 + d, derivative=True)]


def _grid_operator(
    f: GridFunction, params: TemperedParams, regime: Regime, convention: Convention
) -> GridFunction:
    """Transform of a sampled integrand with the grid operators."""
    d, lam = params.d, params.lam
    if regime == Regime.A1:
        return frac_integral_minus(f, d, lam)
    if regime == Regime.A2:
        return frac_derivative_minus(f, -d, lam)
    if convention == Convention.SCALED:
        scale = special.gamma(1.0 - d)
        if regime == Regime.A3:
            head = frac_integral_minus(f, -d, lam)
        else:
            head = frac_derivative_minus(f, d, lam)
        tail = frac_integral_minus(f, 1.0 - d, lam)
    else:
        scale = 1.0
        if regime == Regime.A3:
            head = frac_derivative_minus(f, -d, lam)
        elif d == 0:
            head = f
        else:
            head = frac_integral_minus(f, d, lam)
        tail = frac_integral_minus(f, 1.0 + d, lam)
    return GridFunction(f.grid, scale * (head.values - lam * tail.values))


@dataclass
class IntegrandTransform:
    """Transformed integrand: point values and exact cell averages on a grid."""

    regime: Regime
    transformed: GridFunction
    cell_values: np.ndarray
    convention: Convention = Convention.KERNEL

    def __post_init__(self) -> None:
        self.cell_values = np.asarray(self.cell_values, dtype=float)
        if self.cell_values.shape != (self.grid.n_cells,):
            raise GridError("Cell values do not match the transform grid.")

    @property
    def grid(self) -> SampleGrid:
        return self.transformed.grid

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.grid.dx * np.sum(self.cell_values ** 2)))

    def _check_compatible(self, other: "IntegrandTransform") -> None:
        if (self.regime, self.convention) != (other.regime, other.convention):
            raise RegimeMismatchError(self.regime.name, other.regime.name)
        if self.grid != other.grid:
            raise GridError("Transforms live on different grids.")

    def _combine(self, other: "IntegrandTransform", sign: float) -> "IntegrandTransform":
        self._check_compatible(other)
        return IntegrandTransform(
            self.regime,
            GridFunction(self.grid, self.transformed.values + sign * other.transformed.values),
            self.cell_values + sign * other.cell_values,
            self.convention,
        )

    def __add__(self, other: "IntegrandTransform") -> "IntegrandTransform":
        return self._combine(other, 1.0)

    def __sub__(self, other: "IntegrandTransform") -> "IntegrandTransform":
        return self._combine(other, -1.0)

    def __mul__(self, factor: float) -> "IntegrandTransform":
        return IntegrandTransform(
            self.regime,
            GridFunction(self.grid, factor * self.transformed.values),
            factor * self.cell_values,
            self.convention,
        )

    __rmul__ = __mul__


def default_grid(f: Integrand, params: TemperedParams, refinement: int = REFINEMENT) -> SampleGrid:
    """
    Grid carrying the transform of an integrand.

    Sampled integrands keep their step and get a zero extension of one
    truncation width to the left. Step functions get a grid over
    [t_1 - R, t_{n+1}] with REFINEMENT cells per shortest piece.

    Args:
        f (Integrand): integrand.
        params (TemperedParams): parameters fixing the truncation width R.
        refinement (int): cells per shortest piece of a step function.

    Returns:
        SampleGrid: the grid.
    """
    width = truncation_width(params)
    if isinstance(f, GridFunction):
        n_extra = int(math.ceil(width / f.grid.dx))
        return SampleGrid(
            f.grid.x_min - n_extra * f.grid.dx, f.grid.x_max, f.grid.n_cells + n_extra
        )
    step = float(np.diff(f.breakpoints).min()) / refinement
    start = f.breakpoints[0] - width
    n_cells = int(math.ceil((f.breakpoints[-1] - start) / step))
    return SampleGrid(f.breakpoints[-1] - n_cells * step, f.breakpoints[-1], n_cells)


def _extend(f: GridFunction, grid: SampleGrid) -> GridFunction:
    """Zero extension of a sampled integrand to a grid with the same step."""
    offset = (f.grid.x_min - grid.x_min) / grid.dx
    start = int(round(offset))
    if (
        abs(offset - start) > 1e-6
        or not math.isclose(f.grid.dx, grid.dx, rel_tol=1e-9)
        or start < 0
        or start + f.grid.n_cells > grid.n_cells
    ):
        raise GridError("Sampled integrand is not aligned with the transform grid.")
    values = np.zeros(grid.n_cells + 1)
    values[start : start + f.grid.n_cells + 1] = f.values
    return GridFunction(grid, values)


def transform_integrand(
    f: Integrand,
    params: TemperedParams,
    target: PathKind = PathKind.TFLP2,
    grid: Optional[SampleGrid] = None,
    convention: Convention = Convention.KERNEL,
) -> IntegrandTransform:
    """
    Transform an integrand into the L² function it is integrated against.

    Step functions are transformed exactly, point values and cell averages
    of the incomplete gamma profiles. Sampled integrands go through the
    grid operators of tempered_calculus, with trapezoidal cell averages.

    Args:
        f (Integrand): step function or sampled function.
        params (TemperedParams): parameters.
        target (PathKind): TFLP1 or TFLP2.
        grid (Optional[SampleGrid]): transform grid, see default_grid.
        convention (Convention): operator combination for TFLP1.

    Returns:
        IntegrandTransform: the transform.

    Raises:
        RegimeError: when d admits no integrand space for the target.
    """
    regime = regime_of(params, target)
    grid = grid if grid is not None else default_grid(f, params)
    if isinstance(f, ElementaryFunction):
        terms = kernel_terms(params, regime, convention)
        points = grid.points
        values = np.zeros(points.size)
        cells = np.zeros(grid.n_cells)
        for index, coefficient in enumerate(f.coefficients):
            if coefficient == 0:
                continue
            for sign, end in ((1.0, f.breakpoints[index + 1]), (-1.0, f.breakpoints[index])):
                for term in terms:
                    values += sign * coefficient * term.values(params.lam, end - points)
                    cells += sign * coefficient * term.cell_average(
                        params.lam, end - points[1:], end - points[:-1]
                    )
        transformed = GridFunction(grid, values)
    else:
        transformed = _grid_operator(_extend(f, grid), params, regime, convention)
        cells = transformed.cell_averages()
    logger.debug(f"Transformed integrand in regime {regime.name} on {grid.n_cells} cells")
    return IntegrandTransform(regime, transformed, cells, convention)


def inner_product(f: IntegrandTransform, g: IntegrandTransform) -> float:
    """
    L² inner product of two transforms.

    Args:
        f (IntegrandTransform): first transform.
        g (IntegrandTransform): second transform.

    Returns:
        float: ⟨f, g⟩.

    Raises:
        RegimeMismatchError: when the transforms belong to different regimes.
    """
    f._check_compatible(g)
    return float(f.grid.dx * np.dot(f.cell_values, g.cell_values))


def integrate_elementary(f: ElementaryFunction, path: SamplePath) -> float:
    """
    Σ a_i [S(t_{i+1}) - S(t_i)] along a simulated path.

    Args:
        f (ElementaryFunction): step function.
        path (SamplePath): path of a process.

    Returns:
        float: the integral.

    Raises:
        OffGridBreakpointError: when a breakpoint is not a point of the path grid.
    """
    return float(_path_integrals(f, path.grid, path.values))


def _breakpoint_indices(f: ElementaryFunction, grid: SampleGrid) -> np.ndarray:
    indices = []
    for breakpoint in f.breakpoints:
        try:
            indices.append(grid.index_of(breakpoint))
        except GridError:
            raise OffGridBreakpointError(breakpoint)
    return np.asarray(indices)


def _path_integrals(f: Integrand, grid: SampleGrid, values: np.ndarray) -> np.ndarray:
    """Riemann-Stieltjes sums of f along the last axis of path values on grid."""
    if isinstance(f, ElementaryFunction):
        return np.diff(values[..., _breakpoint_indices(f, grid)], axis=-1) @ f.coefficients
    if f.grid != grid:
        raise GridError("Sampled integrand must live on the observation grid of the paths.")
    return np.diff(values, axis=-1) @ f.cell_averages()


def _integral_draw(transform: IntegrandTransform, driver: LevyDriverSpec, seed: int) -> float:
    increments = sample_increments(driver, transform.grid, seed)
    return float(np.dot(transform.cell_values, increments))


def integrate_general(
    f: Integrand,
    params: TemperedParams,
    driver: LevyDriverSpec,
    seed: int = DEFAULT_SEED,
    target: PathKind = PathKind.TFLP2,
    grid: Optional[SampleGrid] = None,
    convention: Convention = Convention.KERNEL,
) -> float:
    """
    One draw of the integral Σ_k F_k ΔL_k against the driving noise.

    With the integration grid of a simulated path and its seed, the draw for
    the indicator of [0, t] equals the path at t up to rounding.

    Args:
        f (Integrand): integrand.
        params (TemperedParams): parameters.
        driver (LevyDriverSpec): driving Lévy process.
        seed (int): seed of the driver increments.
        target (PathKind): TFLP1 or TFLP2.
        grid (Optional[SampleGrid]): transform grid.
        convention (Convention): operator combination for TFLP1.

    Returns:
        float: the draw.
    """
    transform = transform_integrand(f, params, target, grid, convention)
    return _integral_draw(transform, driver, seed)


@dataclass
class IsometryRecord:
    """Monte Carlo check of Var ∫ f dS = EL2 ‖F‖²."""

    estimate: float
    mc_std_error: float
    predicted_variance: float
    mean: float
    mean_std_error: float
    n_draws: int

    @property
    def z_score(self) -> float:
        return (self.estimate - self.predicted_variance) / self.mc_std_error

    def to_dict(self) -> Dict[str, float]:
        return {
            "estimate": self.estimate,
            "mc_std_error": self.mc_std_error,
            "predicted_variance": self.predicted_variance,
            "mean": self.mean,
            "mean_std_error": self.mean_std_error,
            "n_draws": self.n_draws,
        }


def _isometry_record(draws: np.ndarray, predicted_variance: float) -> IsometryRecord:
    """Sample variance with the standard error sqrt((m4 - m2²)/N) of the central moments."""
    n_draws = draws.size
    centered = draws - draws.mean()
    second = float(np.mean(centered ** 2))
    fourth = float(np.mean(centered ** 4))
    return IsometryRecord(
        estimate=second,
        mc_std_error=math.sqrt(max(fourth - second ** 2, 0.0) / n_draws),
        predicted_variance=predicted_variance,
        mean=float(draws.mean()),
        mean_std_error=math.sqrt(second / n_draws),
        n_draws=n_draws,
    )


def monte_carlo_isometry(
    f: Integrand,
    params: TemperedParams,
    driver: LevyDriverSpec,
    n_draws: int,
    target: PathKind = PathKind.TFLP2,
    seed: int = DEFAULT_SEED,
    threads: int = THREADS,
    grid: Optional[SampleGrid] = None,
    convention: Convention = Convention.KERNEL,
) -> IsometryRecord:
    """
    Compare the sample variance of integrate_general draws with EL2 ‖F‖².

    Every draw is Σ_k F_k ΔL_k with the transform F itself, so this checks
    the driver increments and the thread layout. ensemble_isometry checks
    the transform against simulated paths.

    Args:
        f (Integrand): integrand.
        params (TemperedParams): parameters.
        driver (LevyDriverSpec): driving Lévy process.
        n_draws (int): number of draws.
        target (PathKind): TFLP1 or TFLP2.
        seed (int): base seed, draws use derived seeds.
        threads (int): worker count.
        grid (Optional[SampleGrid]): transform grid.
        convention (Convention): operator combination for TFLP1.

    Returns:
        IsometryRecord: estimate, standard errors and prediction.
    """
    if n_draws < 2:
        raise ParameterError(f"Isometry check needs at least two draws, got [{n_draws}].")
    transform = transform_integrand(f, params, target, grid, convention)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        draws = np.fromiter(
            executor.map(
                lambda index: _integral_draw(transform, driver, derive_seed(seed, index)),
                range(n_draws),
            ),
            dtype=float,
            count=n_draws,
        )
    return _isometry_record(draws, driver.second_moment() * transform.norm ** 2)


SIMULATORS = {PathKind.TFLP1: simulate_tflp1, PathKind.TFLP2: simulate_tflp2}


def ensemble_isometry(
    integrands: Sequence[Integrand],
    params: TemperedParams,
    driver: LevyDriverSpec,
    n_paths: int,
    obs_grid: SampleGrid,
    target: PathKind = PathKind.TFLP2,
    seed: int = DEFAULT_SEED,
    threads: int = THREADS,
    refinement: int = REFINEMENT,
    trunc_width: float = 0.0,
) -> List[IsometryRecord]:
    """
    Compare the variance of ∫ f dS over simulated paths with EL2 ‖F‖².

    The integrals are Riemann-Stieltjes sums along an ensemble of simulated
    paths: step functions use the path values at their breakpoints, sampled
    integrands living on the observation grid use their trapezoidal cell
    averages. The prediction transforms every integrand on the integration
    grid of the paths, sampled integrands being interpolated linearly onto it.

    Args:
        integrands (Sequence[Integrand]): integrands supported in [0, t_max].
        params (TemperedParams): parameters.
        driver (LevyDriverSpec): driving Lévy process.
        n_paths (int): ensemble size.
        obs_grid (SampleGrid): observation grid of the paths, starting at 0.
        target (PathKind): TFLP1 or TFLP2.
        seed (int): base seed of the ensemble.
        threads (int): worker count.
        refinement (int): integration cells per observation cell.
        trunc_width (float): truncation width, 0 picks it automatically.

    Returns:
        List[IsometryRecord]: one record per integrand.

    Raises:
        OffGridBreakpointError: when a breakpoint is not a point of obs_grid.
        GridError: when a sampled integrand does not live on obs_grid.
    """
    if n_paths < 2:
        raise ParameterError(f"Isometry check needs at least two paths, got [{n_paths}].")
    regime_of(params, target)
    layout = integration_grid(obs_grid, params, trunc_width, refinement)
    values = simulate_ensemble(
        SIMULATORS[target],
        n_paths,
        seed,
        threads,
        params=params,
        obs_grid=obs_grid,
        driver=driver,
        trunc_width=trunc_width,
        refinement=refinement,
    )
    el2 = driver.second_moment()
    records = []
    for f in integrands:
        draws = _path_integrals(f, obs_grid, values)
        if isinstance(f, GridFunction):
            fine = layout.grid.points
            f = GridFunction(layout.grid, np.interp(fine, f.points, f.values, left=0.0, right=0.0))
        transform = transform_integrand(f, params, target, layout.grid)
        records.append(_isometry_record(draws, el2 * transform.norm ** 2))
    return records


def _step_approximation(f: GridFunction, n_pieces: int) -> Tuple[ElementaryFunction, GridFunction]:
    """Step function of interval averages on grid-aligned pieces, and its samples."""
    edges = np.unique(np.round(np.linspace(0, f.grid.n_cells, n_pieces + 1)).astype(int))
    cell_averages = f.cell_averages()
    sums = np.concatenate([[0.0], np.cumsum(cell_averages)])
    coefficients = (sums[edges[1:]] - sums[edges[:-1]]) / np.diff(edges)
    step = ElementaryFunction(f.points[edges], coefficients)
    samples = np.zeros(f.values.size)
    for index, (start, stop) in enumerate(zip(edges[:-1], edges[1:])):
        samples[start:stop] = coefficients[index]
    samples[-1] = coefficients[-1]
    return step, GridFunction(f.grid, samples)


def refinement_distances(
    f: GridFunction,
    params: TemperedParams,
    target: PathKind = PathKind.TFLP2,
    levels: Sequence[int] = tuple(range(MAX_REFINEMENT_LEVEL + 1)),
    convention: Convention = Convention.KERNEL,
) -> List[Tuple[int, float]]:
    """
    Transform-space distance between f and its dyadic step approximations.

    Args:
        f (GridFunction): sampled integrand.
        params (TemperedParams): parameters.
        target (PathKind): TFLP1 or TFLP2.
        levels (Sequence[int]): dyadic levels, 2^level pieces.
        convention (Convention): operator combination for TFLP1.

    Returns:
        List[Tuple[int, float]]: (number of pieces, distance) per level.
    """
    grid = default_grid(f, params)
    distances = []
    for level in levels:
        n_pieces = min(2 ** level, f.grid.n_cells)
        _, samples = _step_approximation(f, n_pieces)
        residual = GridFunction(f.grid, f.values - samples.values)
        distance = transform_integrand(residual, params, target, grid, convention).norm
        distances.append((n_pieces, distance))
    return distances


def approximate_by_elementary(
    f: Integrand,
    params: TemperedParams,
    target: PathKind = PathKind.TFLP2,
    tolerance: float = 1e-2,
    convention: Convention = Convention.KERNEL,
    max_level: int = MAX_REFINEMENT_LEVEL,
) -> ElementaryFunction:
    """
    Step function within tolerance of f in the transform norm.

    Dyadic partitions of the grid are refined until ‖T(f - f_n)‖ < tolerance.

    Args:
        f (Integrand): sampled integrand, step functions are returned as is.
        params (TemperedParams): parameters.
        target (PathKind): TFLP1 or TFLP2.
        tolerance (float): admissible distance.
        convention (Convention): operator combination for TFLP1.
        max_level (int): last dyadic level tried.

    Returns:
        ElementaryFunction: the approximation.

    Raises:
        NonConvergenceError: when the last level is still too far.
    """
    regime_of(params, target)
    if isinstance(f, ElementaryFunction):
        return f
    grid = default_grid(f, params)
    distance = math.inf
    for level in range(max_level + 1):
        n_pieces = min(2 ** level, f.grid.n_cells)
        step, samples = _step_approximation(f, n_pieces)
        residual = GridFunction(f.grid, f.values - samples.values)
        distance = transform_integrand(residual, params, target, grid, convention).norm
        logger.debug(f"Step approximation with {n_pieces} pieces at distance {distance:.3e}")
        if distance < tolerance:
            return step
        if n_pieces == f.grid.n_cells:
            break
    raise NonConvergenceError(
        f"Step approximation stays at distance [{distance:.3e}] above [{tolerance}]."
    )
