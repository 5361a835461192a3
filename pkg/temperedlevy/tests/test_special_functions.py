"""Testing special function utilities."""
import math

import numpy as np
import pytest

from ..exceptions import DomainError, GammaOverflowError, GammaPoleError
from ..special_functions import bessel_k, bessel_k_integral, bessel_k_scaled, gamma_fn


def test_gamma_fn_values():
    """Testing classical values of the gamma function."""
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)
    np.testing.assert_allclose(gamma_fn(np.array([2.0, 3.0, 4.0])), [1.0, 2.0, 6.0])


def test_gamma_fn_reflection():
    """Testing the reflection formula away from the poles."""
    x = np.linspace(-4.7, 4.7, 20)
    np.testing.assert_allclose(
        gamma_fn(x) * gamma_fn(1.0 - x), np.pi / np.sin(np.pi * x), rtol=1e-12
    )


def test_gamma_fn_errors():
    """Testing poles and overflow of the gamma function."""
    for pole in (0.0, -1.0, -7.0):
        with pytest.raises(GammaPoleError):
            gamma_fn(pole)
    with pytest.raises(GammaPoleError):
        gamma_fn(np.array([0.5, -2.0]))
    with pytest.raises(GammaOverflowError):
        gamma_fn(200.0)


def test_bessel_k_closed_form():
    """Testing the half-integer closed form and the symmetry in the order."""
    assert bessel_k(0.5, 1.0) == pytest.approx(
        math.sqrt(math.pi / 2.0) * math.exp(-1.0), rel=1e-12
    )
    assert bessel_k(-0.75, 2.0) == pytest.approx(bessel_k(0.75, 2.0), rel=1e-12)


def test_bessel_k_integral_oracle():
    """Testing bessel_k against quadrature of the integral definition."""
    assert bessel_k(0.8, 1.3) == pytest.approx(bessel_k_integral(0.8, 1.3), rel=1e-10)
    for nu in np.linspace(-4.0, 4.0, 10):
        for z in (0.05, 0.5, 1.3, 5.0, 20.0):
            assert bessel_k(nu, z) == pytest.approx(bessel_k_integral(nu, z), rel=1e-9)


def test_bessel_k_recurrence():
    """Testing the three-term recurrence in the order."""
    for nu in (0.3, 1.0, 2.5):
        for z in (0.1, 1.0, 10.0):
            assert bessel_k(nu + 1.0, z) == pytest.approx(
                bessel_k(nu - 1.0, z) + 2.0 * nu / z * bessel_k(nu, z), rel=1e-9
            )


def test_bessel_k_large_argument():
    """Testing the large-argument law."""
    for z, tolerance in ((50.0, 0.05), (100.0, 0.02), (200.0, 0.01)):
        ratio = bessel_k(0.8, z) / (math.sqrt(math.pi / (2.0 * z)) * math.exp(-z))
        assert abs(ratio - 1.0) < tolerance


def test_bessel_k_scaled():
    """Testing the scaled variant, finite where K underflows."""
    assert bessel_k_scaled(0.3, 2.0) == pytest.approx(
        math.exp(2.0) * bessel_k(0.3, 2.0), rel=1e-12
    )
    assert bessel_k(0.5, 800.0) == 0.0
    assert bessel_k_scaled(0.5, 800.0) == pytest.approx(
        math.sqrt(math.pi / 1600.0), rel=1e-12
    )


def test_bessel_k_domain():
    """Testing the domain error for non-positive arguments."""
    for z in (0.0, -1.0):
        with pytest.raises(DomainError):
            bessel_k(0.5, z)
        with pytest.raises(DomainError):
            bessel_k_scaled(0.5, z)
        with pytest.raises(DomainError):
            bessel_k_integral(0.5, z)
