"""Gamma and modified Bessel functions of the second kind."""
from typing import Union

import numpy as np
from scipy import integrate, special

from .exceptions import DomainError, GammaOverflowError, GammaPoleError

ArrayLike = Union[float, np.ndarray]


def _as_output(values: np.ndarray) -> ArrayLike:
    """Return a Python float for zero-dimensional results."""
    return float(values) if values.ndim == 0 else values


def gamma_fn(x: ArrayLike) -> ArrayLike:
    """
    Gamma function.

    Args:
        x (ArrayLike): argument(s), anything but zero or negative integers.

    Returns:
        ArrayLike: Γ(x).

    Raises:
        GammaPoleError: at zero or negative integers.
        GammaOverflowError: when the value is not representable.
    """
    x_array = np.asarray(x, dtype=float)
    poles = (x_array <= 0) & (x_array == np.floor(x_array))
    if np.any(poles):
        raise GammaPoleError(x_array[poles].flat[0])
    values = special.gamma(x_array)
    if not np.all(np.isfinite(values)):
        raise GammaOverflowError(x_array[~np.isfinite(values)].flat[0])
    return _as_output(values)


def _check_positive_argument(z: ArrayLike) -> np.ndarray:
    z_array = np.asarray(z, dtype=float)
    if np.any(~(z_array > 0)):
        raise DomainError(f"Bessel K requires z > 0, got [{z}].")
    return z_array


def bessel_k(nu: ArrayLike, z: ArrayLike) -> ArrayLike:
    """
    Modified Bessel function of the second kind K_ν(z).

    Evaluated with the AMOS routines behind scipy.special.kv, which split
    between the Temme series for small z and the continued fraction for
    large z. K is even in the order.

    Args:
        nu (ArrayLike): order(s), any real.
        z (ArrayLike): argument(s), strictly positive.

    Returns:
        ArrayLike: K_ν(z).

    Raises:
        DomainError: for z <= 0.
    """
    z_array = _check_positive_argument(z)
    return _as_output(special.kv(np.abs(np.asarray(nu, dtype=float)), z_array))


def bessel_k_scaled(nu: ArrayLike, z: ArrayLike) -> ArrayLike:
    """
    Exponentially scaled Bessel function e^{z} K_ν(z).

    Args:
        nu (ArrayLike): order(s), any real.
        z (ArrayLike): argument(s), strictly positive.

    Returns:
        ArrayLike: e^{z} K_ν(z).

    Raises:
        DomainError: for z <= 0.
    """
    z_array = _check_positive_argument(z)
    return _as_output(special.kve(np.abs(np.asarray(nu, dtype=float)), z_array))


def bessel_k_integral(nu: float, z: float, epsrel: float = 1e-12) -> float:
    """
    Reference value of K_ν(z) from ∫_0^∞ e^{-z cosh t} cosh(νt) dt.

    Slow, meant for validation. The integrand is shifted by its maximum in
    log space so that neither large orders nor large arguments overflow.

    Args:
        nu (float): order.
        z (float): argument, strictly positive.
        epsrel (float): relative tolerance of the quadrature.

    Returns:
        float: K_ν(z).

    Raises:
        DomainError: for z <= 0.
    """
    _check_positive_argument(z)
    order = abs(nu)
    # NOTE: cosh(νt) = e^{νt}(1 + e^{-2νt}) / 2, the exponent peaks at t_peak
    t_peak = float(np.arcsinh(order / z))

    def log_envelope(t: float) -> float:
        return -z * (np.cosh(t) - 1.0) + order * t

    shift = log_envelope(t_peak)

    def integrand(t: float) -> float:
        return 0.5 * np.exp(log_envelope(t) - shift) * (1.0 + np.exp(-2.0 * order * t))

    t_upper = t_peak + 1.0
    while log_envelope(t_upper) - shift > -745.0:
        t_upper = t_peak + 2.0 * (t_upper - t_peak)
    value = 0.0
    for lower, upper in ((0.0, t_peak), (t_peak, t_upper)):
        if upper > lower:
            value += integrate.quad(
                integrand, lower, upper, epsabs=0.0, epsrel=epsrel, limit=200
            )[0]
    return float(value * np.exp(shift - z))
