"""Second-order theory of the processes and their noises, with estimators."""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import integrate, signal, special

from .constants import (
    QUADRATURE_EPSREL,
    QUADRATURE_LIMIT,
    SERIES_THRESHOLD,
)
from .exceptions import DegenerateFitError, LengthError, ParameterError, QuadratureError
from .process_sim import TemperedParams, kernel_g1, kernel_g2_values
from .special_functions import gamma_fn

ArrayLike = Union[float, np.ndarray]

SERIES_TERMS = 30
FOURIER_SPLIT = 60.0


def _as_output(values: np.ndarray) -> ArrayLike:
    return float(values) if np.ndim(values) == 0 else values


def _check_quadrature(value: float, error: float, what: str) -> float:
    if error > 1e-8 * max(1.0, abs(value)):
        raise QuadratureError(f"{what} has quadrature error estimate [{error:.3e}].")
    return value


def _psi_at_zero(nu: float, lam: float) -> float:
    """Limit of |x|^ν K_ν(λ|x|) at x = 0, ν > 0."""
    return special.gamma(nu) * 2.0 ** (nu - 1.0) * lam ** (-nu)


def _psi(nu: float, lam: float, x: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """e^{λ shift} |x|^ν K_ν(λ|x|), exponentially scaled for large arguments."""
    x = np.abs(np.asarray(x, dtype=float))
    positive = x > 0
    safe = np.where(positive, x, 1.0)
    values = safe ** nu * special.kve(nu, lam * safe) * np.exp(-lam * (safe - shift))
    return np.where(positive, values, _psi_at_zero(nu, lam) * np.exp(lam * shift))


def _integer_order_series(n: int, z: np.ndarray) -> np.ndarray:
    """z^n K_n(z) - 2^{n-1}(n-1)! from the logarithmic series of K_n, z > 0."""
    quarter = z ** 2 / 4.0
    finite = np.zeros(z.shape)
    for j in range(1, n):
        finite += 2.0 ** (n - 1) * math.factorial(n - j - 1) / math.factorial(j) * (-quarter) ** j
    k = np.arange(SERIES_TERMS, dtype=float)[:, None]
    weights = (
        0.5 * special.digamma(k + 1.0)
        + 0.5 * special.digamma(k + n + 1.0)
        - np.log(z / 2.0)[None, :]
    )
    logarithmic = (
        quarter[None, :] ** k / (special.factorial(k) * special.factorial(k + n)) * weights
    ).sum(axis=0)
    return finite + (-1.0) ** n * 2.0 ** (-n) * z ** (2 * n) * logarithmic


def _fractional_order_series(params: TemperedParams, sine: float, z: np.ndarray) -> np.ndarray:
    """F(t) from K_ν = (π/2)(I_{-ν} - I_ν)/sin(νπ), ν not an integer."""
    d, lam = params.d, params.lam
    nu = d + 0.5
    prefactor = math.sqrt(math.pi) * special.gamma(1.0 + d) / sine * (2.0 * lam ** 2) ** (-nu)
    k = np.arange(SERIES_TERMS, dtype=float)[:, None]
    # NOTE: z^ν I_{-ν}(z) without its k = 0 term, which cancels A
    negative_order = (
        2.0 ** (nu - 2.0 * k[1:])
        * z[None, :] ** (2.0 * k[1:])
        * special.rgamma(k[1:] - nu + 1.0)
        / special.factorial(k[1:])
    ).sum(axis=0)
    positive_order = (
        2.0 ** (-nu - 2.0 * k)
        * z[None, :] ** (2.0 * k + 2.0 * nu)
        * special.rgamma(k + nu + 1.0)
        / special.factorial(k)
    ).sum(axis=0)
    return -prefactor * (negative_order - positive_order)


def _variance_profile(params: TemperedParams, t: np.ndarray) -> np.ndarray:
    """
    F(t) = |t|^{1+2d} C²_{d,λ,|t|} = A - B |t|^ν K_ν(λ|t|), ν = d + 1/2.

    The difference of near-equal terms is replaced by the series of K_ν
    below λ|t| = SERIES_THRESHOLD, the logarithmic one when ν is an integer.
    """
    d, lam = params.d, params.lam
    nu = d + 0.5
    t = np.abs(np.asarray(t, dtype=float))
    z = lam * t
    a = 2.0 * special.gamma(1.0 + 2.0 * d) * (2.0 * lam) ** (-1.0 - 2.0 * d)
    b = 2.0 * special.gamma(1.0 + d) / math.sqrt(math.pi) * (2.0 * lam) ** (-nu)
    direct = a - b * _psi(nu, lam, t)
    # NOTE: z = 0 only where t = 0, masked below
    small = np.maximum(np.minimum(np.atleast_1d(z), SERIES_THRESHOLD), 1e-300)
    sine = math.sin(nu * math.pi)
    if abs(sine) < 1e-6:
        n = int(round(nu))
        series = -b * lam ** (-n) * _integer_order_series(n, small)
    else:
        series = _fractional_order_series(params, sine, small)
    values = np.where(z < SERIES_THRESHOLD, series.reshape(z.shape), direct)
    return np.where(t > 0, values, 0.0)


def ct_squared(params: TemperedParams, t: ArrayLike) -> ArrayLike:
    """
    The constant C²_{d,λ,|t|} of the covariance of the first kind.

    2Γ(1+2d)/(2λ|t|)^{1+2d} - (2Γ(1+d)/√π)(2λ|t|)^{-1/2-d} K_{1/2+d}(λ|t|),
    with the value 0 at t = 0.

    Args:
        params (TemperedParams): parameters.
        t (ArrayLike): time(s).

    Returns:
        ArrayLike: C².
    """
    t = np.abs(np.asarray(t, dtype=float))
    safe = np.where(t > 0, t, 1.0)
    values = np.where(
        t > 0, _variance_profile(params, t) / safe ** (1.0 + 2.0 * params.d), 0.0
    )
    return _as_output(values)


def cov_tflp1(
    params: TemperedParams, s: ArrayLike, t: ArrayLike, el2: float = 1.0
) -> ArrayLike:
    """
    Covariance of the process of the first kind.

    EL2/(2Γ(1+d)²) {F(t) + F(s) - F(t-s)} with F(t) = |t|^{1+2d} C²_{d,λ,|t|}.

    Args:
        params (TemperedParams): parameters.
        s (ArrayLike): first time(s).
        t (ArrayLike): second time(s).
        el2 (float): second moment E[L(1)²] of the driver.

    Returns:
        ArrayLike: Cov(S(s), S(t)).
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    factor = el2 / (2.0 * special.gamma(1.0 + params.d) ** 2)
    values = factor * (
        _variance_profile(params, t)
        + _variance_profile(params, s)
        - _variance_profile(params, t - s)
    )
    return _as_output(values)


def var_limit_tflp1(params: TemperedParams, el2: float = 1.0) -> float:
    """Large-time limit 2 EL2 Γ(1+2d) / (Γ(1+d)² (2λ)^{1+2d}) of the variance."""
    d, lam = params.d, params.lam
    return float(
        2.0 * el2 * special.gamma(1.0 + 2.0 * d)
        / (special.gamma(1.0 + d) ** 2 * (2.0 * lam) ** (1.0 + 2.0 * d))
    )


def _bessel_profile_integral(params: TemperedParams, x: float) -> float:
    """Φ(X) = 2 ∫_0^X (X - r) r^ν K_ν(λr) dr, ν = d - 1/2, even in X."""
    x = abs(x)
    if x == 0:
        return 0.0
    nu = params.d - 0.5
    lam = params.lam
    order = abs(nu)
    if nu < 0:
        # NOTE: r^ν K_ν(λr) = r^{2ν} (r^{|ν|} K_{|ν|}(λr)), the power goes to the weight
        def regular(r: float) -> float:
            if r == 0:
                return (x - r) * _psi_at_zero(order, lam)
            return (x - r) * r ** order * special.kv(order, lam * r)

        value, error = integrate.quad(
            regular,
            0.0,
            x,
            weight="alg",
            wvar=(2.0 * nu, 0.0),
            epsabs=0.0,
            epsrel=QUADRATURE_EPSREL,
            limit=QUADRATURE_LIMIT,
        )
    else:

        def profile(r: float) -> float:
            if r == 0:
                return x * _psi_at_zero(nu, lam) if nu > 0 else 0.0
            return (x - r) * r ** nu * special.kv(nu, lam * r)

        value, error = integrate.quad(
            profile, 0.0, x, epsabs=0.0, epsrel=QUADRATURE_EPSREL, limit=QUADRATURE_LIMIT
        )
    return 2.0 * _check_quadrature(value, error, f"Bessel profile at [{x}]")


def _tflp2_constant(params: TemperedParams, el2: float) -> float:
    d, lam = params.d, params.lam
    return el2 / (math.sqrt(math.pi) * special.gamma(d) * (2.0 * lam) ** (d - 0.5))


def cov_tflp2(params: TemperedParams, s: float, t: float, el2: float = 1.0) -> float:
    """
    Covariance of the process of the second kind, d > 0.

    c ∫_0^t ∫_0^s |u-v|^{d-1/2} K_{d-1/2}(λ|u-v|) dv du with
    c = EL2/(√π Γ(d) (2λ)^{d-1/2}). The integrand depends on u - v only, so
    the double integral is (Φ(t) + Φ(s) - Φ(t-s))/2 with
    Φ(X) = 2∫_0^X (X-r) r^ν K_ν(λr) dr, the diagonal handled by an algebraic
    weight when d < 1/2.

    Args:
        params (TemperedParams): parameters with d > 0.
        s (float): first time.
        t (float): second time.
        el2 (float): second moment of the driver.

    Returns:
        float: Cov(S(s), S(t)).

    Raises:
        ParameterError: for d <= 0.
        QuadratureError: when the quadrature tolerance is not met.
    """
    if not params.d > 0:
        raise ParameterError(f"Closed covariance of the second kind needs d > 0, got [{params.d}].")
    constant = _tflp2_constant(params, el2)
    return constant * 0.5 * (
        _bessel_profile_integral(params, t)
        + _bessel_profile_integral(params, s)
        - _bessel_profile_integral(params, t - s)
    )


def _kernel_quadrature(kernel, s: float, t: float) -> float:
    """∫ kernel(s, x) kernel(t, x) dx over the real line, split at 0, s and t."""
    breakpoints = sorted({0.0, float(s), float(t)})
    total = 0.0
    pieces = [(-np.inf, breakpoints[0])] + list(zip(breakpoints[:-1], breakpoints[1:]))
    for lower, upper in pieces:
        value, error = integrate.quad(
            lambda x: kernel(s, x) * kernel(t, x),
            lower,
            upper,
            epsabs=0.0,
            epsrel=QUADRATURE_EPSREL,
            limit=QUADRATURE_LIMIT,
        )
        total += _check_quadrature(value, error, f"Kernel product over [{lower}, {upper}]")
    return total


def cov_tflp1_quadrature(params: TemperedParams, s: float, t: float, el2: float = 1.0) -> float:
    """Covariance of the first kind as EL2/Γ(1+d)² ∫ g1(s, x) g1(t, x) dx."""
    norm = special.gamma(1.0 + params.d) ** 2
    return el2 * _kernel_quadrature(lambda time, x: kernel_g1(params, time, x), s, t) / norm


def cov_tflp2_quadrature(params: TemperedParams, s: float, t: float, el2: float = 1.0) -> float:
    """
    Covariance of the second kind as EL2/Γ(1+d)² ∫ g2(s, y) g2(t, y) dy.

    Covers every d > -1/2, d != 0, including the range without a closed form.
    """
    if params.d == 0:
        raise ParameterError("Process of the second kind needs d != 0.")
    norm = special.gamma(1.0 + params.d) ** 2
    return el2 * _kernel_quadrature(lambda time, y: kernel_g2_values(params, time, y), s, t) / norm


def flp_covariance(d: float, s: ArrayLike, t: ArrayLike, el2: float = 1.0) -> ArrayLike:
    """
    Covariance of the untempered fractional Lévy process, |d| < 1/2.

    EL2/(2Γ(2d+2) sin(π(d+1/2))) {|t|^{1+2d} + |s|^{1+2d} - |t-s|^{1+2d}}.

    Args:
        d (float): memory parameter.
        s (ArrayLike): first time(s).
        t (ArrayLike): second time(s).
        el2 (float): second moment of the driver.

    Returns:
        ArrayLike: covariance.
    """
    if not -0.5 < d < 0.5:
        raise ParameterError(f"Untempered process needs |d| < 1/2, got [{d}].")
    s_array = np.asarray(s, dtype=float)
    t_array = np.asarray(t, dtype=float)
    power = 1.0 + 2.0 * d
    factor = el2 / (2.0 * special.gamma(2.0 * d + 2.0) * math.sin(math.pi * (d + 0.5)))
    values = factor * (
        np.abs(t_array) ** power + np.abs(s_array) ** power - np.abs(t_array - s_array) ** power
    )
    return _as_output(values)


def acvf_tfln1(params: TemperedParams, h: ArrayLike, el2: float = 1.0) -> ArrayLike:
    """
    Autocovariance of the noise of the first kind.

    γ(h) = K{F(h+1) - 2F(h) + F(h-1)} with K = EL2/(2Γ(1+d)²). From |h| >= 1
    on the constant part of F cancels and the Bessel terms are evaluated
    scaled by e^{λ|h|}.

    Args:
        params (TemperedParams): parameters.
        h (ArrayLike): lag(s).
        el2 (float): second moment of the driver.

    Returns:
        ArrayLike: γ(h).
    """
    d, lam = params.d, params.lam
    nu = d + 0.5
    h = np.abs(np.asarray(h, dtype=float))
    factor = el2 / (2.0 * special.gamma(1.0 + d) ** 2)
    near = factor * (
        _variance_profile(params, h + 1.0)
        - 2.0 * _variance_profile(params, h)
        + _variance_profile(params, h - 1.0)
    )
    b = 2.0 * special.gamma(1.0 + d) / math.sqrt(math.pi) * (2.0 * lam) ** (-nu)
    far_h = np.maximum(h, 1.0)
    second_difference = (
        _psi(nu, lam, far_h + 1.0, far_h)
        - 2.0 * _psi(nu, lam, far_h, far_h)
        + _psi(nu, lam, far_h - 1.0, far_h)
    )
    far = -factor * b * np.exp(-lam * far_h) * second_difference
    return _as_output(np.where(h < 1.0, near, far))


def acvf_tfln1_asymptotic(
    params: TemperedParams, h: ArrayLike, el2: float = 1.0, corrected: bool = False
) -> ArrayLike:
    """
    Large-lag equivalent C e^{-λh} h^d of the noise autocovariance.

    Args:
        params (TemperedParams): parameters.
        h (ArrayLike): lag(s), positive.
        el2 (float): second moment of the driver.
        corrected (bool): use the exact finite-λ factor 2(cosh λ - 1) in place
            of its small-λ equivalent λ² in C = -EL2 λ² / (Γ(d+1)(2λ)^{d+1}).

    Returns:
        ArrayLike: asymptotic values.
    """
    d, lam = params.d, params.lam
    h = np.abs(np.asarray(h, dtype=float))
    curvature = 2.0 * (math.cosh(lam) - 1.0) if corrected else lam ** 2
    constant = -el2 * curvature / (special.gamma(d + 1.0) * (2.0 * lam) ** (d + 1.0))
    return _as_output(constant * np.exp(-lam * h) * h ** d)


def spec_density_tfln1(
    params: TemperedParams, omega: ArrayLike, el2: Optional[float] = None
) -> ArrayLike:
    """
    Spectral density (1/2π)(1 - cos ω)/(λ² + ω²)^{d+1} of the noise of the first kind.

    Args:
        params (TemperedParams): parameters.
        omega (ArrayLike): frequency(ies).
        el2 (Optional[float]): when given, the density is rescaled to the
            two-sided density 2 EL2 h(ω) whose integral over the real line
            is γ(0).

    Returns:
        ArrayLike: density values.
    """
    omega = np.asarray(omega, dtype=float)
    power = (params.lam ** 2 + omega ** 2) ** (params.d + 1.0)
    values = (1.0 - np.cos(omega)) / (2.0 * math.pi * power)
    if el2 is not None:
        values = 2.0 * el2 * values
    return _as_output(values)


def _window_factor(omega: np.ndarray) -> np.ndarray:
    """(1 - cos ω)/ω², equal to 1/2 at ω = 0."""
    return 0.5 * np.sinc(omega / (2.0 * math.pi)) ** 2


def spec_density_tfln2(
    params: TemperedParams, omega: ArrayLike, el2: Optional[float] = None
) -> ArrayLike:
    """
    Spectral density (1/2π)(1 - cos ω)/(ω²(λ² + ω²)^d) of the noise of the second kind.

    Von Kármán shape (λ² + ω²)^{-d} times the unit window factor, with the
    limit 1/(4πλ^{2d}) at ω = 0.

    Args:
        params (TemperedParams): parameters.
        omega (ArrayLike): frequency(ies).
        el2 (Optional[float]): when given, rescale to 2 EL2 h(ω).

    Returns:
        ArrayLike: density values.
    """
    omega = np.asarray(omega, dtype=float)
    values = _window_factor(omega) / (2.0 * math.pi * (params.lam ** 2 + omega ** 2) ** params.d)
    if el2 is not None:
        values = 2.0 * el2 * values
    return _as_output(values)


def _acvf_tfln2_fourier(params: TemperedParams, h: float, el2: float) -> float:
    """(2EL2/π) ∫_0^∞ (1 - cos ω) cos(hω) / (ω²(λ²+ω²)^d) dω."""
    d, lam = params.d, params.lam
    split = FOURIER_SPLIT + 2.0 * math.pi * math.ceil(abs(h))
    value, error = integrate.quad(
        lambda w: _window_factor(w) * math.cos(h * w) / (lam ** 2 + w ** 2) ** d,
        0.0,
        split,
        epsabs=0.0,
        epsrel=QUADRATURE_EPSREL,
        limit=max(QUADRATURE_LIMIT, int(4 * split)),
    )
    _check_quadrature(value, error, f"Spectral inversion at lag [{h}]")

    def envelope(w: float) -> float:
        return 1.0 / (w ** 2 * (lam ** 2 + w ** 2) ** d)

    # NOTE: (1 - cos ω) cos(hω) = cos(hω) - cos((h+1)ω)/2 - cos((h-1)ω)/2
    for weight, frequency in ((1.0, h), (-0.5, h + 1.0), (-0.5, h - 1.0)):
        frequency = abs(frequency)
        if frequency == 0:
            tail, tail_error = integrate.quad(envelope, split, np.inf, epsabs=1e-14)
        else:
            tail, tail_error = integrate.quad(
                envelope, split, np.inf, weight="cos", wvar=frequency, epsabs=1e-14
            )
        value += weight * _check_quadrature(tail, tail_error, f"Spectral tail at lag [{h}]")
    return 2.0 * el2 * value / math.pi


def _acvf_tfln2_lag(params: TemperedParams, h: float, el2: float) -> float:
    """EL2 ∫_{-1}^{1} (1 - |r|) G(h + r) dr with G the covariance of the noise density."""
    nu = params.d - 0.5
    constant = _tflp2_constant(params, el2)
    order = abs(nu)

    def covariance(x: float) -> float:
        x = abs(x)
        if x == 0:
            return constant * _psi_at_zero(order, params.lam) if nu > 0 else math.inf
        return constant * x ** nu * special.kv(order, params.lam * x)

    points = sorted({p for p in (-h, 0.0) if -1.0 < p < 1.0})
    value, error = integrate.quad(
        lambda r: (1.0 - abs(r)) * covariance(h + r),
        -1.0,
        1.0,
        points=points or None,
        epsabs=0.0,
        epsrel=QUADRATURE_EPSREL,
        limit=QUADRATURE_LIMIT,
    )
    return _check_quadrature(value, error, f"Lag integral at [{h}]")


ACVF2_METHODS = ("auto", "fourier", "lag")


def acvf_tfln2(
    params: TemperedParams, h: ArrayLike, el2: float = 1.0, method: str = "auto"
) -> ArrayLike:
    """
    Autocovariance of the noise of the second kind.

    "fourier" inverts the spectral density and covers every lag. "lag"
    integrates the Bessel covariance of the noise density over a unit lag,
    which needs d > 0 or |h| > 1. "auto" takes the lag integral wherever it
    applies, its relative accuracy holding at large lags where the values
    are exponentially small, and the inversion elsewhere.

    Args:
        params (TemperedParams): parameters with d != 0.
        h (ArrayLike): lag(s).
        el2 (float): second moment of the driver.
        method (str): "auto", "fourier" or "lag".

    Returns:
        ArrayLike: γ(h).

    Raises:
        ParameterError: for d = 0, an unknown method or a lag the lag integral
            does not cover.
    """
    if params.d == 0:
        raise ParameterError("Noise of the second kind needs d != 0.")
    if method not in ACVF2_METHODS:
        raise ParameterError(f"Autocovariance method [{method}] is not supported.")
    lags = np.abs(np.asarray(h, dtype=float))
    values = np.empty(lags.shape)
    for index, lag in np.ndenumerate(lags):
        covered = params.d > 0 or lag > 1.0
        if method == "lag" and not covered:
            raise ParameterError(f"Lag integral needs d > 0 or a lag above 1, got [{lag}].")
        if method == "fourier" or not covered:
            values[index] = _acvf_tfln2_fourier(params, float(lag), el2)
        else:
            values[index] = _acvf_tfln2_lag(params, float(lag), el2)
    return _as_output(values)


def acvf_tfln2_limit_constant(params: TemperedParams, el2: float = 1.0) -> float:
    """Limit of γ(h) e^{λh} h^{1-d}: 2EL2(cosh λ - 1) / (λ² Γ(d) (2λ)^d)."""
    d, lam = params.d, params.lam
    return el2 * 2.0 * (math.cosh(lam) - 1.0) / (lam ** 2 * gamma_fn(d) * (2.0 * lam) ** d)


def acvf_tfln2_asymptotic_band(
    params: TemperedParams,
    h: ArrayLike,
    el2: float = 1.0,
    calibration: Optional[Sequence[float]] = None,
) -> Tuple[ArrayLike, ArrayLike]:
    """
    Two-sided bound C1 e^{-λh} h^{d-1} <= γ(h) <= C2 e^{-λh} h^{d-1}.

    C1 and C2 bracket the ratio γ(h) e^{λh} h^{1-d} on the calibration lags
    together with its large-lag limit.

    Args:
        params (TemperedParams): parameters with d != 0.
        h (ArrayLike): lag(s), positive.
        el2 (float): second moment of the driver.
        calibration (Optional[Sequence[float]]): lags, default 16 lags in [1, 10/λ].

    Returns:
        Tuple[ArrayLike, ArrayLike]: lower and upper bounds.
    """
    d, lam = params.d, params.lam
    lags = (
        np.asarray(calibration, dtype=float)
        if calibration is not None
        else np.geomspace(1.0, max(10.0 / lam, 2.0), 16)
    )
    ratios = np.asarray(acvf_tfln2(params, lags, el2)) * np.exp(lam * lags) * lags ** (1.0 - d)
    ratios = np.append(ratios, acvf_tfln2_limit_constant(params, el2))
    lower_constant, upper_constant = float(ratios.min()), float(ratios.max())
    logger.debug(f"Band constants [{lower_constant:.6g}, {upper_constant:.6g}]")
    h = np.asarray(h, dtype=float)
    shape = np.exp(-lam * h) * h ** (d - 1.0)
    return _as_output(lower_constant * shape), _as_output(upper_constant * shape)


def empirical_acvf(samples: np.ndarray, max_lag: int) -> np.ndarray:
    """
    Biased sample autocovariance at lags 0..max_lag.

    Args:
        samples (np.ndarray): series.
        max_lag (int): last lag.

    Returns:
        np.ndarray: (1/N) Σ (x_t - x̄)(x_{t+h} - x̄).

    Raises:
        LengthError: when the series is not longer than max_lag.
    """
    samples = np.asarray(samples, dtype=float)
    if max_lag < 0 or samples.size <= max_lag:
        raise LengthError(f"Series of length [{samples.size}] is too short for lag [{max_lag}].")
    centered = samples - samples.mean()
    spectrum = np.fft.rfft(centered, 2 * samples.size)
    acvf = np.fft.irfft(np.abs(spectrum) ** 2, 2 * samples.size)[: max_lag + 1]
    return acvf / samples.size


def periodogram(samples: np.ndarray, segment_length: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Welch-averaged periodogram on [0, π).

    Two-sided density per unit angular frequency, so a unit-variance white
    noise has the flat level 1/(2π).

    Args:
        samples (np.ndarray): series.
        segment_length (int): segment length, a power of two.

    Returns:
        Tuple[np.ndarray, np.ndarray]: frequencies and power.

    Raises:
        LengthError: for a segment longer than the series or not a power of two.
    """
    samples = np.asarray(samples, dtype=float)
    if segment_length < 2 or segment_length & (segment_length - 1):
        raise LengthError(f"Segment length [{segment_length}] must be a power of two.")
    if segment_length > samples.size:
        raise LengthError(
            f"Segment length [{segment_length}] exceeds the series length [{samples.size}]."
        )
    omega, power = signal.welch(
        samples, fs=2.0 * math.pi, nperseg=segment_length, return_onesided=False
    )
    keep = omega >= 0
    order = np.argsort(omega[keep])
    return omega[keep][order], power[keep][order]


@dataclass
class SemiLrdFit:
    """Fit of log|γ(h)| = log c - λh + δ log h."""

    lambda_hat: float
    delta_hat: float
    c_hat: float
    fit_range: Tuple[float, float]
    residual_rms: float
    sign: int = 1
    converged: bool = True


def fit_semi_lrd(h: np.ndarray, gamma: Optional[np.ndarray] = None) -> SemiLrdFit:
    """
    Least-squares fit of log |γ(h)| = log c + δ log h - λh.

    Args:
        h (np.ndarray): positive lags, or an (n, 2) array of (h, γ) pairs
            when gamma is omitted.
        gamma (Optional[np.ndarray]): autocovariances, their modulus is fitted.

    Returns:
        SemiLrdFit: estimates, the sign is the one of the majority of values.

    Raises:
        ParameterError: when pairs are not given as an (n, 2) array.
        DegenerateFitError: with fewer than three distinct usable lags.
    """
    if gamma is None:
        pairs = np.asarray(h, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ParameterError(f"Expected (h, gamma) pairs, got shape [{pairs.shape}].")
        h, gamma = pairs[:, 0], pairs[:, 1]
    h = np.asarray(h, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    usable = (h > 0) & (gamma != 0) & np.isfinite(gamma)
    if np.unique(h[usable]).size < 3:
        raise DegenerateFitError("Semi-long-range fit needs at least three distinct lags.")
    signs = np.sign(gamma[usable])
    sign = 1 if signs.sum() >= 0 else -1
    if np.any(signs != sign):
        logger.warning("Autocovariance changes sign over the fit range, fitting its modulus")
    lags = h[usable]
    design = np.column_stack([np.ones_like(lags), -lags, np.log(lags)])
    target = np.log(np.abs(gamma[usable]))
    coefficients, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < 3:
        raise DegenerateFitError("Semi-long-range design matrix is rank deficient.")
    residual = target - design @ coefficients
    log_c, lambda_hat, delta_hat = (float(value) for value in coefficients)
    return SemiLrdFit(
        lambda_hat=lambda_hat,
        delta_hat=delta_hat,
        c_hat=math.exp(log_c),
        fit_range=(float(lags.min()), float(lags.max())),
        residual_rms=float(np.sqrt(np.mean(residual ** 2))),
        sign=sign,
        converged=lambda_hat > 0 and delta_hat > -1.5,
    )
