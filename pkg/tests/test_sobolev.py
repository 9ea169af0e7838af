import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ohara import spectral
from ohara.curve import make_circle
from ohara.sobolev import (SobolevOrder, c_coefficient, fractional_laplacian,
                           seminorm_double_integral, seminorm_fourier, sobolev_norm, tail_seminorm)
from oracles import c_reference


@pytest.mark.parametrize("k", [1, 2, 5, 17])
@pytest.mark.parametrize("s", [0.2, 0.5, 0.75, 0.95])
def test_c_coefficient_against_series(k, s):
    assert abs(c_coefficient(k, s) - c_reference(k, s)) < 1e-10 * c_reference(k, s)


def test_single_mode_seminorm():
    u = np.arange(64) / 64
    f = np.cos(2 * np.pi * 3 * u)
    # |f_hat(+-3)|^2 = 1/4 each
    want = np.sqrt(0.5 * c_reference(3, 0.4))
    assert abs(seminorm_fourier(spectral.coefficients(f), 0.4) - want) < 1e-10 * want
    assert abs(seminorm_double_integral(f, 0.4) - want) < 1e-4 * want


@given(st.integers(1, 12), st.floats(0.1, 0.9))
@settings(max_examples=20, deadline=None)
def test_double_integral_agrees_with_fourier(k, s):
    u = np.arange(256) / 256
    f = np.column_stack([np.sin(2 * np.pi * k * u), np.exp(np.cos(2 * np.pi * u))])
    a = seminorm_double_integral(f, s)
    b = seminorm_fourier(spectral.coefficients(f), s)
    assert abs(a - b) < 1e-4 * b


def test_fractional_laplacian_inverse_and_mean_handling():
    rng = np.random.default_rng(3)
    c = spectral.coefficients(rng.standard_normal(64))
    c[0] = 0.0
    back = fractional_laplacian(fractional_laplacian(c, 0.7), -0.7)
    np.testing.assert_allclose(back, c, atol=1e-14)
    c[0] = 1.0
    with pytest.raises(ValueError):
        fractional_laplacian(c, -0.5)
    assert fractional_laplacian(c, 0.0)[0] == 1.0
    assert fractional_laplacian(c, 0.5)[0] == 0.0


def test_fractional_laplacian_of_second_order_is_minus_second_derivative():
    u = np.arange(64) / 64
    f = np.sin(2 * np.pi * 4 * u)
    got = np.fft.ifft(fractional_laplacian(spectral.coefficients(f), 2.0) * 64).real
    np.testing.assert_allclose(got, -spectral.derivative(f, 2), atol=1e-9)


def test_tail_seminorm_limits():
    c = make_circle(256)
    full = seminorm_double_integral(np.array(c.derivative), 0.75)
    assert abs(tail_seminorm(c, 0.5, 2.5) - full) < 1e-12 * full
    vals = [tail_seminorm(c, e, 2.5) for e in (0.3, 0.1, 0.01, 0.003, 1e-3, 1e-4)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_sobolev_order_and_norm():
    assert SobolevOrder.from_real(1.75) == SobolevOrder(1, 0.75)
    assert SobolevOrder.from_real(2.0) == SobolevOrder(2, None)
    with pytest.raises(ValueError):
        SobolevOrder(0, 1.0)
    u = np.arange(64) / 64
    f = np.cos(2 * np.pi * u)
    # L2 norm plus L2 norm of the derivative
    assert abs(sobolev_norm(f, 1.0) - (np.sqrt(0.5) + 2 * np.pi * np.sqrt(0.5))) < 1e-12
