import numpy as np
from hypothesis import given, settings, strategies as st

from ohara import spectral


def trig(u, k, phase=0.3):
    return np.cos(2 * np.pi * k * u + phase)


@given(st.integers(1, 20), st.floats(-1.0, 1.0))
@settings(max_examples=30, deadline=None)
def test_shift_matches_closed_form(k, w):
    u = np.arange(64) / 64
    f = trig(u, k)[:, None]
    got = spectral.shifted(f, np.array([w]))[0, :, 0]
    np.testing.assert_allclose(got, trig(u + w, k), atol=1e-12)


def test_difference_is_cancellation_free():
    u = np.arange(128) / 128
    f = trig(u, 3)[:, None]
    w = 1e-9
    got = spectral.shifted(f, np.array([w]), difference=True)[0, :, 0]
    exact = -2 * np.sin(np.pi * 3 * w) * np.sin(2 * np.pi * 3 * (u + w / 2) + 0.3)
    np.testing.assert_allclose(got, exact, rtol=1e-7, atol=1e-22)


def test_derivative_of_sine():
    u = np.arange(32) / 32
    d = spectral.derivative(np.sin(2 * np.pi * 5 * u))
    np.testing.assert_allclose(d, 10 * np.pi * np.cos(2 * np.pi * 5 * u), atol=1e-10)


def test_evaluate_off_grid_and_truncation():
    u = np.arange(64) / 64
    f = np.column_stack([trig(u, 2), trig(u, 7, 1.1)])
    x = np.linspace(0, 1, 17) + 0.013
    want = np.column_stack([trig(x, 2), trig(x, 7, 1.1)])
    np.testing.assert_allclose(spectral.evaluate(f, x), want, atol=1e-12)
    np.testing.assert_allclose(spectral.evaluate(f, x, max_mode=7), want, atol=1e-12)


def test_periodic_antiderivative_roundtrip():
    u = np.arange(64) / 64
    f = 2.0 + trig(u, 3)
    mean, g = spectral.periodic_antiderivative(f)
    assert abs(mean - 2.0) < 1e-14
    np.testing.assert_allclose(spectral.derivative(g) + mean, f, atol=1e-12)


def test_effective_bandwidth():
    u = np.arange(128) / 128
    assert spectral.effective_bandwidth(trig(u, 9) + 1e-3 * trig(u, 20)) == 20
    assert spectral.effective_bandwidth(5.0 + 0 * u) == 0
    assert spectral.effective_bandwidth(5.0 + 1e-9 * trig(u, 4), include_mean=True) == 4
