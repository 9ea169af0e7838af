import numpy as np
import pytest

from ohara.curve import (CurveError, SampledCurve, ellipse, intrinsic_distance, make_circle,
                         perturbed_circle)
from ohara.energy import EnergyParams, energy
from ohara.variation import (Direction, d_length_variation, finite_difference_energy,
                             first_variation_arclength, first_variation_general,
                             half_length_offset, l2_gradient, length_variation,
                             stationarity_residual, test_family)
from conftest import band_limited

P = EnergyParams(alpha=2.5)


def test_circle_radial_variation_closed_form():
    # E(r gamma) = r^(2-alpha) E, so dE(gamma; gamma) = (2 - alpha) E exactly
    c = make_circle(256)
    rep = first_variation_arclength(c, np.array(c.samples), P)
    E = energy(c, P).value
    assert abs(rep.dE - (2 - P.alpha) * E) < 1e-8 * E
    assert abs(rep.dLength - 1.0) < 1e-12


def test_gradient_of_circle_is_radial_and_uniform():
    c = make_circle(256)
    g = l2_gradient(c, P)
    pts = np.array(c.samples)
    radial = np.einsum("ji,ji->j", g, pts) / np.sqrt((pts ** 2).sum(axis=1))
    tangential = g - radial[:, None] * pts / np.sqrt((pts ** 2).sum(axis=1))[:, None]
    # pointwise fields carry rounding from the cancelling cutoff terms; the
    # tangential part also passes through a spectral derivative
    assert np.ptp(radial) < 1e-7 * abs(radial).max()
    assert np.abs(tangential).max() < 1e-6 * abs(radial).max()
    # mean <g, gamma> = (2 - alpha) E and |gamma| = 1/(2 pi)
    want = (2 - P.alpha) * energy(c, P).value * 2 * np.pi
    assert abs(radial.mean() - want) < 1e-8 * abs(want)


def test_gradient_pairing_matches_directional_derivative(curves256):
    c = curves256["trefoil"]
    p = EnergyParams(alpha=2.4, lam=0.7)
    h = band_limited(256, 3, seed=5)
    rep = first_variation_arclength(c, h, p)
    g = l2_gradient(c, p)
    paired = float(np.einsum("ji,ji->", g, h) / 256)
    assert abs(paired - rep.residual_total) < 1e-8 * (1 + abs(paired))


def test_general_formula_matches_arclength_formula(curves256):
    c = curves256["ellipse"]
    h = band_limited(256, 2, seed=1)
    a = first_variation_arclength(c, h, P).dE
    b = first_variation_general(c, h, P).dE
    assert abs(a - b) < 1e-6 * (1 + abs(a))


def test_general_formula_on_non_constant_speed():
    c = ellipse(256)
    h = band_limited(256, 2, seed=2)
    dE = first_variation_general(c, h, P).dE
    fd = finite_difference_energy(c, h, P)
    assert abs(dE - fd) < 1e-5 * (1 + abs(dE))
    with pytest.raises(CurveError, match="arc length"):
        first_variation_arclength(c, h, P)


def test_length_variation_by_finite_difference():
    c = perturbed_circle(128)
    h = band_limited(128, 2, seed=3)
    tau = 1e-6
    from ohara.curve import length
    fd = (length(SampledCurve(c.samples + tau * h)) - length(SampledCurve(c.samples - tau * h))) / (2 * tau)
    assert abs(length_variation(c, h) - fd) < 1e-8


@pytest.mark.parametrize("w", [0.1, -0.3, 0.45, -0.49])
def test_distance_derivative_by_finite_difference(w):
    c = perturbed_circle(128, amplitude=0.3)
    h = band_limited(128, 2, seed=4)
    u = np.array([0.05, 0.4, 0.77])
    tau = 1e-6
    plus = intrinsic_distance(SampledCurve(c.samples + tau * h), u, w)
    minus = intrinsic_distance(SampledCurve(c.samples - tau * h), u, w)
    np.testing.assert_allclose(d_length_variation(c, h, u, w), (plus - minus) / (2 * tau),
                               atol=1e-7)


def test_half_length_offset_on_circle_and_ellipse():
    np.testing.assert_allclose(half_length_offset(make_circle(64)), 0.5, atol=1e-14)
    # symmetric ellipse: antipodal angle splits the length in half
    np.testing.assert_allclose(half_length_offset(ellipse(64)), 0.5, atol=1e-12)


def test_direction_validation():
    c = make_circle(64)
    with pytest.raises(CurveError):
        Direction.for_curve(c, np.zeros((32, 2)))
    with pytest.raises(CurveError):
        Direction(np.full((64, 2), np.nan))
    assert finite_difference_energy(c, np.zeros((64, 2)), P) == 0.0


def test_family_size_and_stationarity_scaling():
    fam = list(test_family(64, 2, 4))
    assert len(fam) == 2 * (1 + 2 * 4)
    c = make_circle(256)
    lam = (P.alpha - 2) * energy(c, P).value
    assert stationarity_residual(c, EnergyParams(alpha=2.5, lam=lam), 4) < 1e-8


def test_alpha_two_is_rejected_for_variation():
    with pytest.raises(ValueError):
        first_variation_arclength(make_circle(64), np.zeros((64, 2)), EnergyParams(alpha=2.0))
