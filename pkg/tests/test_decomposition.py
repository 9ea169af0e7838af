import numpy as np
import pytest

from ohara import spectral
from ohara.curve import analyze, make_circle, make_fourier_curve, trefoil_coefficients
from ohara.decomposition import (G_beta, KernelParams, Q_form, Q_fourier, R_form_direct,
                                 R_form_kernel, decompose, kernel_g, lower_order_diagnostic,
                                 q_coefficients)
from ohara.energy import EnergyParams
from conftest import band_limited
from oracles import q_reference

P = EnergyParams(alpha=2.5)


@pytest.mark.parametrize("alpha", [2.1, 2.5, 2.9])
def test_q_against_series_oracle(alpha):
    sp = q_coefficients(EnergyParams(alpha=alpha), 40)
    for k in (1, 3, 10, 40):
        assert abs(sp.q[k] - q_reference(k, alpha)) < 1e-10 * q_reference(k, alpha)


def test_q_from_quadratic_form_on_modes():
    u = np.arange(128) / 128
    sp = q_coefficients(P, 8)
    for k in (1, 4, 7):
        e = np.exp(2j * np.pi * k * u)
        val = Q_form(e, e, P)
        assert abs(val.imag) < 1e-10 * abs(val)
        assert abs(val.real / k ** 3.5 - sp.q[k]) < 1e-7 * sp.q[k]


def test_fourier_form_matches_direct_form():
    c = make_fourier_curve(trefoil_coefficients(), 128)
    h = band_limited(128, 3, K=5, seed=9)
    sp = q_coefficients(P, 8)
    direct = Q_form(c, h, P)
    via_modes = Q_fourier(spectral.coefficients(np.array(c.samples)), spectral.coefficients(h), P, sp)
    assert abs(direct - via_modes) < 1e-7 * abs(direct)
    assert abs(Q_fourier(trefoil_coefficients(), analyze(c, 8), P, sp)
               - Q_fourier(trefoil_coefficients(), trefoil_coefficients(), P, sp)) < 1e-9
    with pytest.raises(ValueError, match="beyond K"):
        Q_fourier(spectral.coefficients(band_limited(128, 3, K=12)), spectral.coefficients(h), P, sp)


@pytest.mark.parametrize("beta", [2.5, 3.0, 4.5])
def test_G_beta_values(beta):
    assert abs(G_beta(1.0, beta) - beta / 4) < 1e-15
    r = 0.7
    assert abs(G_beta(r, beta) - (1 - r ** beta) / (2 * r ** beta * (1 - r * r))) < 1e-14
    z = np.array([[0.6, 0.8, 0.0], [0.3, 0.4, 0.0]])
    np.testing.assert_allclose(G_beta(z, beta), [beta / 4, G_beta(0.5, beta)], rtol=1e-14)
    with pytest.raises(ValueError):
        G_beta(0.0, beta)


def test_kernel_on_circle_vanishes_for_equal_tangent_nodes():
    c = make_circle(64)
    assert np.all(kernel_g(c, 0.1, 0.2, 2.5, KernelParams(4.5, 0.3, 0.4, 0.4)) == 0)
    g = kernel_g(c, 0.0, 0.25, 2.5, KernelParams(4.5, 0.0, 0.0, 1.0))
    # unit-speed circle: T(0) = (0, 1), |T(0) - T(1/4)|^2 = 2, |dg/w| = (sqrt 2 / (2 pi)) / (1/4)
    z = np.sqrt(2) / (2 * np.pi) * 4
    want = G_beta(z, 4.5) * 2 / 0.25 ** 2.5
    np.testing.assert_allclose(g, [0.0, want], atol=1e-12 * want)
    with pytest.raises(ValueError):
        KernelParams(4.5, 1.5, 0.0, 0.0)


def test_decomposition_identity_and_kernel_form(curves256):
    c = curves256["trefoil"]
    h = band_limited(256, 3, seed=11)
    rep = decompose(c, h, P, with_kernel=True)
    assert rep.identity_residual < 1e-8 * (1 + abs(rep.dE))
    assert abs(rep.R - rep.R_kernel) < 1e-6 * abs(rep.R)
    assert abs(R_form_direct(c, h, P) - rep.R) == 0.0
    assert abs(R_form_kernel(c, h, P, quad_nodes=12) - rep.R) < 1e-6 * abs(rep.R)


def test_remainder_is_orthogonal_to_translations(curves256):
    c = curves256["ellipse"]
    assert abs(R_form_direct(c, np.ones((256, 2)), P)) < 1e-8


def test_lower_order_table(curves256):
    tab = lower_order_diagnostic(curves256["ellipse"], P, 32)
    assert [r.k for r in tab.rows] == [2, 4, 8, 16, 32]
    assert all(r.rho >= 0 for r in tab.rows)
    assert tab.decreasing


def test_remainder_does_not_depend_on_the_last_cutoff(curves256):
    short = EnergyParams(alpha=2.5, eps_schedule=tuple(2.0 ** -m for m in range(3, 9)))
    for c in curves256.values():
        h = band_limited(256, c.dim, seed=3)
        a, b = R_form_direct(c, h, short), R_form_direct(c, h, P)
        assert abs(a - b) < 1e-6 * abs(b)
