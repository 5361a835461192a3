"""Driving Lévy noise: specifications, moments and increment samplers."""
from dataclasses import dataclass
from enum import Enum, auto
from typing import Any, ClassVar, Dict, Type, Union

import numpy as np
from loguru import logger
from scipy import integrate, special

from .constants import (
    BLOCK_SIZE,
    FALLBACK_ALPHA,
    REJECTION_SHIFT,
    SMALL_JUMP_EPSILON,
)
from .exceptions import GridError, ParameterError, UnsupportedSamplerError
from .helpers.data import blocks

ThetaLike = Union[float, np.ndarray]


@dataclass
class SampleGrid:
    """Uniform grid x_k = x_min + k * dx, k = 0..n_cells."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self) -> None:
        self.x_min = float(self.x_min)
        self.x_max = float(self.x_max)
        if not self.x_min < self.x_max:
            raise GridError(f"Grid needs x_min < x_max, got [{self.x_min}, {self.x_max}].")
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise GridError(f"Grid needs a positive number of cells, got [{self.n_cells}].")
        self.n_cells = int(self.n_cells)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)

    def index_of(self, x: float, tolerance: float = 1e-9) -> int:
        """
        Index of a grid point.

        Args:
            x (float): location expected on the grid.
            tolerance (float): relative tolerance on the fractional index.

        Returns:
            int: k such that x_k = x.

        Raises:
            GridError: when x is not a grid point.
        """
        position = (x - self.x_min) / self.dx
        index = int(round(position))
        if abs(position - index) > tolerance * max(1.0, abs(position)) or not (
            0 <= index <= self.n_cells
        ):
            raise GridError(f"Location [{x}] is not a point of the grid.")
        return index


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """
    Counter-based generator for a (seed, stream) key.

    Args:
        seed (int): non-negative base seed.
        stream (int): stream identifiers, e.g. block index and side.

    Returns:
        np.random.Generator: Philox-backed generator.
    """
    if int(seed) != seed or seed < 0:
        raise ParameterError(f"Seed [{seed}] must be a non-negative integer.")
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), *stream]))
    )


def derive_seed(seed: int, index: int) -> int:
    """
    Seed of the index-th member of an ensemble.

    Args:
        seed (int): ensemble seed.
        index (int): member index.

    Returns:
        int: member seed.
    """
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


class JumpLaw(Enum):
    """Symmetric jump laws of the compound Poisson driver."""

    UNIFORM = auto()
    GAUSSIAN = auto()
    TWO_POINT = auto()


JUMP_LAW_MAPPINGS = {
    "uniform": JumpLaw.UNIFORM,
    "gaussian": JumpLaw.GAUSSIAN,
    "twopoint": JumpLaw.TWO_POINT,
    "two_point": JumpLaw.TWO_POINT,
    JumpLaw.UNIFORM: JumpLaw.UNIFORM,
    JumpLaw.GAUSSIAN: JumpLaw.GAUSSIAN,
    JumpLaw.TWO_POINT: JumpLaw.TWO_POINT,
}


@dataclass
class LevyDriverSpec:
    """
    Centered two-sided Lévy driver with finite second moment.

    Subclasses implement the closed-form moments and a sampler of
    increments L(x_{k+1}) - L(x_k) over the cells of a grid.
    """

    name: ClassVar[str] = "driver"
    config_keys: ClassVar[Dict[str, str]] = {}

    @property
    def outside_condition_l(self) -> bool:
        """Whether the driver has a Brownian component."""
        return False

    def second_moment(self) -> float:
        """E[L(1)^2]."""
        raise NotImplementedError

    def char_exponent(self, theta: ThetaLike) -> Union[complex, np.ndarray]:
        """ψ(θ) with E[exp(iθL(1))] = exp(ψ(θ))."""
        raise NotImplementedError

    def _sample_block(
        self, seed: int, block_index: int, n_cells: int, dx: float
    ) -> np.ndarray:
        raise UnsupportedSamplerError(self.name)

    def sample_increments(self, grid: SampleGrid, seed: int) -> np.ndarray:
        """
        Sample the increments over the cells of a grid.

        Cells are processed in blocks, each with its own generator keyed by
        (seed, block index), so a cell draw depends only on seed and index.

        Args:
            grid (SampleGrid): grid, index 0 anchored at x_min.
            seed (int): non-negative seed.

        Returns:
            np.ndarray: n_cells i.i.d. increments.
        """
        increments = np.empty(grid.n_cells)
        for block_index, (start, stop) in enumerate(blocks(grid.n_cells, BLOCK_SIZE)):
            increments[start:stop] = self._sample_block(
                seed, block_index, stop - start, grid.dx
            )
        return increments

    def to_config(self) -> Dict[str, Any]:
        """
        Flat key=value representation.

        Returns:
            Dict[str, Any]: configuration including the "driver" key.
        """
        config: Dict[str, Any] = {"driver": self.name}
        for key, attribute in self.config_keys.items():
            value = getattr(self, attribute)
            config[key] = value.name.lower() if isinstance(value, Enum) else value
        return config

    @staticmethod
    def from_config(config: Dict[str, Any]) -> "LevyDriverSpec":
        """
        Create a driver from a flat configuration.

        Args:
            config (Dict[str, Any]): settings, "driver" selects the variant,
                unrelated keys are ignored.

        Returns:
            LevyDriverSpec: the driver.
        """
        name = str(config.get("driver", CompoundPoisson.name))
        try:
            driver_class = DRIVER_FACTORY[name]
        except KeyError:
            raise UnsupportedSamplerError(name)
        kwargs = {
            attribute: config[key]
            for key, attribute in driver_class.config_keys.items()
            if config.get(key) is not None
        }
        return driver_class(**kwargs)


@dataclass
class CompoundPoisson(LevyDriverSpec):
    """Compound Poisson driver with symmetric jumps."""

    intensity: float = 1.0
    jump_law: JumpLaw = JumpLaw.UNIFORM
    jump_scale: float = 1.0

    name: ClassVar[str] = "cpois"
    config_keys: ClassVar[Dict[str, str]] = {
        "intensity": "intensity",
        "jumps": "jump_law",
        "a": "jump_scale",
    }

    def __post_init__(self) -> None:
        try:
            self.jump_law = JUMP_LAW_MAPPINGS[self.jump_law]
        except KeyError:
            raise ParameterError(f"Jump law [{self.jump_law}] is not supported.")
        if not self.intensity >= 0:
            raise ParameterError(f"Intensity [{self.intensity}] must be non-negative.")
        if not self.jump_scale > 0:
            raise ParameterError(f"Jump scale [{self.jump_scale}] must be positive.")
        self.intensity = float(self.intensity)
        self.jump_scale = float(self.jump_scale)
        if self.intensity == 0:
            logger.warning("Compound Poisson driver without jumps")

    def jump_second_moment(self) -> float:
        if self.jump_law == JumpLaw.UNIFORM:
            return self.jump_scale ** 2 / 3.0
        return self.jump_scale ** 2

    def second_moment(self) -> float:
        return self.intensity * self.jump_second_moment()

    def char_exponent(self, theta: ThetaLike) -> Union[complex, np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        scaled = self.jump_scale * theta
        if self.jump_law == JumpLaw.UNIFORM:
            jump_cf = np.sinc(scaled / np.pi)
        elif self.jump_law == JumpLaw.GAUSSIAN:
            jump_cf = np.exp(-0.5 * scaled ** 2)
        else:
            jump_cf = np.cos(scaled)
        exponent = (self.intensity * (jump_cf - 1.0)).astype(complex)
        return complex(exponent) if exponent.ndim == 0 else exponent

    def _sample_block(
        self, seed: int, block_index: int, n_cells: int, dx: float
    ) -> np.ndarray:
        rng = make_generator(seed, block_index)
        counts = rng.poisson(self.intensity * dx, n_cells)
        if self.jump_law == JumpLaw.GAUSSIAN:
            return self.jump_scale * np.sqrt(counts) * rng.standard_normal(n_cells)
        if self.jump_law == JumpLaw.TWO_POINT:
            ups = rng.binomial(counts, 0.5)
            return self.jump_scale * (2.0 * ups - counts)
        jumps = rng.uniform(-self.jump_scale, self.jump_scale, int(counts.sum()))
        return np.bincount(
            np.repeat(np.arange(n_cells), counts), weights=jumps, minlength=n_cells
        ).astype(float)


@dataclass
class TemperedStable(LevyDriverSpec):
    """
    Tempered stable driver.

    The Lévy density is scale * |x|^{-1-alpha} * exp(-lambda_noise * |x|) on
    both half lines when symmetric, on the positive one otherwise.
    """

    alpha: float = 1.65
    lambda_noise: float = 0.01
    scale: float = 1.0
    symmetric: bool = True

    name: ClassVar[str] = "tstable"
    config_keys: ClassVar[Dict[str, str]] = {
        "alpha": "alpha",
        "lambda_noise": "lambda_noise",
        "scale": "scale",
        "symmetric": "symmetric",
    }

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 2:
            raise ParameterError(f"Stability index [{self.alpha}] must be in (0, 2).")
        if not self.lambda_noise > 0:
            raise ParameterError(
                f"Noise tempering [{self.lambda_noise}] must be positive."
            )
        if not self.scale > 0:
            raise ParameterError(f"Scale [{self.scale}] must be positive.")
        self.alpha = float(self.alpha)
        self.lambda_noise = float(self.lambda_noise)
        self.scale = float(self.scale)
        self.symmetric = bool(self.symmetric)

    @property
    def sides(self) -> int:
        return 2 if self.symmetric else 1

    @property
    def uses_fallback(self) -> bool:
        """Whether increments come from the truncated compound Poisson sampler."""
        return self.alpha == 1.0 or self.alpha >= FALLBACK_ALPHA

    def second_moment(self) -> float:
        return (
            self.sides
            * self.scale
            * special.gamma(2.0 - self.alpha)
            * self.lambda_noise ** (self.alpha - 2.0)
        )

    def _one_sided_exponent(self, theta: np.ndarray) -> np.ndarray:
        alpha, lam = self.alpha, self.lambda_noise
        shifted = lam - 1j * theta
        if alpha == 1.0:
            return self.scale * (shifted * np.log(shifted / lam) + 1j * theta)
        return (
            self.scale
            * special.gamma(-alpha)
            * (shifted ** alpha - lam ** alpha + 1j * theta * alpha * lam ** (alpha - 1.0))
        )

    def char_exponent(self, theta: ThetaLike) -> Union[complex, np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        exponent = self._one_sided_exponent(theta)
        if self.symmetric:
            exponent = exponent + self._one_sided_exponent(-theta)
        return complex(exponent) if exponent.ndim == 0 else exponent

    def _stable_proposals(
        self, rng: np.random.Generator, sigma: float, size: int
    ) -> np.ndarray:
        """Totally skewed stable variates by the Chambers-Mallows-Stuck method."""
        alpha = self.alpha
        u = np.pi * (rng.random(size) - 0.5)
        w = rng.standard_exponential(size)
        skew = np.arctan(np.tan(np.pi * alpha / 2.0)) / alpha
        t1 = np.sin(alpha * (u + skew)) / (np.cos(alpha * skew) * np.cos(u)) ** (
            1.0 / alpha
        )
        t2 = (np.cos(alpha * skew + (alpha - 1.0) * u) / w) ** ((1.0 - alpha) / alpha)
        return sigma * t1 * t2

    def _tilted_stable(
        self, rng: np.random.Generator, n_cells: int, dx: float
    ) -> np.ndarray:
        """Exponentially tilted stable increments by rejection, centered."""
        alpha, lam, c = self.alpha, self.lambda_noise, self.scale
        gamma_minus_alpha = special.gamma(-alpha)
        sigma = (-c * gamma_minus_alpha * np.cos(np.pi * alpha / 2.0) * dx) ** (
            1.0 / alpha
        )
        threshold = 0.0 if alpha < 1.0 else sigma * REJECTION_SHIFT
        rate = float(
            np.clip(np.exp(c * dx * gamma_minus_alpha * lam ** alpha - lam * threshold), 1e-3, 1.0)
        )
        samples = np.empty(n_cells)
        filled = 0
        while filled < n_cells:
            needed = n_cells - filled
            batch = min(int(np.ceil(1.1 * needed / rate)) + 16, 1 << 22)
            proposals = self._stable_proposals(rng, sigma, batch)
            log_u = np.log(rng.random(batch))
            accepted = proposals[log_u <= -lam * (proposals + threshold)][:needed]
            samples[filled : filled + accepted.size] = accepted
            filled += accepted.size
        mean = c * special.gamma(1.0 - alpha) * lam ** (alpha - 1.0) * dx
        return samples - mean

    def _truncated_compound_poisson(
        self, rng: np.random.Generator, n_cells: int, dx: float
    ) -> np.ndarray:
        """Jumps above a threshold exactly, small jumps by a matched Gaussian."""
        alpha, lam, c = self.alpha, self.lambda_noise, self.scale
        epsilon = SMALL_JUMP_EPSILON
        big_rate = c * integrate.quad(
            lambda x: x ** (-1.0 - alpha) * np.exp(-lam * x), epsilon, np.inf
        )[0]
        big_mean = c * integrate.quad(
            lambda x: x ** (-alpha) * np.exp(-lam * x), epsilon, np.inf
        )[0]
        small_variance = (
            c
            * lam ** (alpha - 2.0)
            * special.gamma(2.0 - alpha)
            * special.gammainc(2.0 - alpha, lam * epsilon)
        )
        counts = rng.poisson(big_rate * dx, n_cells)
        n_jumps = int(counts.sum())
        jumps = np.empty(n_jumps)
        filled = 0
        while filled < n_jumps:
            needed = n_jumps - filled
            # NOTE: Pareto proposals tilted by exp(-lambda (x - epsilon))
            proposals = epsilon * rng.random(2 * needed + 16) ** (-1.0 / alpha)
            keep = rng.random(proposals.size) <= np.exp(-lam * (proposals - epsilon))
            accepted = proposals[keep][:needed]
            jumps[filled : filled + accepted.size] = accepted
            filled += accepted.size
        sums = np.bincount(
            np.repeat(np.arange(n_cells), counts), weights=jumps, minlength=n_cells
        )
        small = np.sqrt(small_variance * dx) * rng.standard_normal(n_cells)
        return sums - big_mean * dx + small

    def _sample_side(
        self, seed: int, block_index: int, side: int, n_cells: int, dx: float
    ) -> np.ndarray:
        rng = make_generator(seed, block_index, side)
        if self.uses_fallback:
            return self._truncated_compound_poisson(rng, n_cells, dx)
        return self._tilted_stable(rng, n_cells, dx)

    def _sample_block(
        self, seed: int, block_index: int, n_cells: int, dx: float
    ) -> np.ndarray:
        increments = self._sample_side(seed, block_index, 0, n_cells, dx)
        if self.symmetric:
            increments = increments - self._sample_side(
                seed, block_index, 1, n_cells, dx
            )
        return increments


@dataclass
class GaussianValidation(LevyDriverSpec):
    """Brownian driver, only meant to cross-check Gaussian formulas."""

    sigma: float = 1.0

    name: ClassVar[str] = "gauss"
    config_keys: ClassVar[Dict[str, str]] = {"sigma": "sigma"}

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ParameterError(f"Sigma [{self.sigma}] must be positive.")
        self.sigma = float(self.sigma)

    @property
    def outside_condition_l(self) -> bool:
        return True

    def second_moment(self) -> float:
        return self.sigma ** 2

    def char_exponent(self, theta: ThetaLike) -> Union[complex, np.ndarray]:
        exponent = (-0.5 * self.sigma ** 2 * np.asarray(theta, dtype=float) ** 2).astype(
            complex
        )
        return complex(exponent) if exponent.ndim == 0 else exponent

    def _sample_block(
        self, seed: int, block_index: int, n_cells: int, dx: float
    ) -> np.ndarray:
        rng = make_generator(seed, block_index)
        return self.sigma * np.sqrt(dx) * rng.standard_normal(n_cells)


DRIVER_FACTORY: Dict[str, Type[LevyDriverSpec]] = {
    CompoundPoisson.name: CompoundPoisson,
    TemperedStable.name: TemperedStable,
    GaussianValidation.name: GaussianValidation,
}


def second_moment(spec: LevyDriverSpec) -> float:
    """
    E[L(1)^2] of a driver.

    Args:
        spec (LevyDriverSpec): driver.

    Returns:
        float: second moment, the integral of x^2 against the Lévy measure.
    """
    return spec.second_moment()


def char_exponent(spec: LevyDriverSpec, theta: ThetaLike) -> Union[complex, np.ndarray]:
    """
    Characteristic exponent of a driver.

    Args:
        spec (LevyDriverSpec): driver.
        theta (ThetaLike): frequency or frequencies.

    Returns:
        Union[complex, np.ndarray]: ψ(θ) = ∫(e^{iθx} - 1 - iθx) ν(dx).
    """
    return spec.char_exponent(theta)


def sample_increments(spec: LevyDriverSpec, grid: SampleGrid, seed: int) -> np.ndarray:
    """
    Sample driver increments over the cells of a grid.

    Args:
        spec (LevyDriverSpec): driver.
        grid (SampleGrid): grid.
        seed (int): non-negative seed.

    Returns:
        np.ndarray: increments, deterministic for a fixed seed.
    """
    logger.debug(f"Sampling {grid.n_cells} increments of {spec} with seed {seed}")
    return spec.sample_increments(grid, seed)
