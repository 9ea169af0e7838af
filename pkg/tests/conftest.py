import numpy as np
import pytest

from ohara.curve import (ellipse, make_fourier_curve, perturbed_circle, reparametrize_arclength,
                         trefoil_coefficients)


def band_limited(n_samples, dim, K=6, seed=0):
    """Random smooth direction with modes |k| <= K and decaying amplitudes."""
    rng = np.random.default_rng(seed)
    u = np.arange(n_samples) / n_samples
    h = np.zeros((n_samples, dim))
    for k in range(K + 1):
        a, b = rng.standard_normal((2, dim)) / (1.0 + k) ** 2
        h += np.outer(np.cos(2 * np.pi * k * u), a) + np.outer(np.sin(2 * np.pi * k * u), b)
    return h


def fixture_curves(n=512):
    return {
        "perturbed_circle": reparametrize_arclength(perturbed_circle(n)),
        "ellipse": reparametrize_arclength(ellipse(n)),
        "trefoil": reparametrize_arclength(make_fourier_curve(trefoil_coefficients(), n)),
    }


@pytest.fixture(scope="session")
def curves512():
    return fixture_curves(512)


@pytest.fixture(scope="session")
def curves256():
    return fixture_curves(256)
