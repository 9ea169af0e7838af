import os
import subprocess
import sys

import numpy as np

from ohara import _kernels as K
from ohara.curve import cumulative_arclength, length, make_fourier_curve, trefoil_coefficients


def test_chord_powers_agree():
    dg = np.random.default_rng(0).standard_normal((8, 32, 3)) + 1.5
    for a, b in zip(K.chord_powers_numba(dg, 2.3), K.chord_powers_numpy(dg, 2.3)):
        np.testing.assert_allclose(a, b, rtol=1e-14)


def test_bilipschitz_scan_agrees():
    c = make_fourier_curve(trefoil_coefficients(), 64)
    pts = np.ascontiguousarray(c.samples)
    cum = cumulative_arclength(c, c.params)
    a = K.bilipschitz_scan_numba(pts, cum, length(c))
    b = K.bilipschitz_scan_numpy(pts, cum, length(c))
    assert abs(a[0] - b[0]) < 1e-14 * a[0] and a[1:] == b[1:]


def test_g_beta_agrees():
    r = np.concatenate([np.linspace(0.2, 3.0, 101), 1 + np.linspace(-1e-4, 1e-4, 21)])
    np.testing.assert_allclose(K.g_beta_numba(r, 3.7, K.SERIES_RADIUS), K.g_beta_numpy(r, 3.7),
                               rtol=1e-13)


def test_env_flag_selects_numpy_path():
    code = ("from ohara import _backend, _kernels; "
            "print(_backend.USE_NUMBA, _kernels.chord_powers is _kernels.chord_powers_numpy)")
    for flag, want in (("0", "False True"), ("1", "True False")):
        env = dict(os.environ, OHARA_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True).stdout.strip()
        assert out == want
