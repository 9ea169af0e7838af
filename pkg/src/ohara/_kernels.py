"""Inner loops shared by the energy, variation and embeddedness code.

Every kernel exists twice: a numba-compiled loop and a vectorized numpy
version with identical semantics.  ``ohara._backend.USE_NUMBA`` picks the one
exported under the public name.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import USE_NUMBA, njit

SERIES_RADIUS = 1e-4


# -- chord powers --------------------------------------------------------------

def chord_powers_numpy(dg: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    r2 = np.einsum("...i,...i->...", dg, dg)
    p = r2 ** (-0.5 * alpha)
    return p, p / r2


@njit
def chord_powers_numba(dg, alpha):
    m, n, d = dg.shape
    p = np.empty((m, n))
    q = np.empty((m, n))
    half = -0.5 * alpha
    for i in range(m):
        for j in range(n):
            r2 = 0.0
            for a in range(d):
                r2 += dg[i, j, a] * dg[i, j, a]
            v = r2 ** half
            p[i, j] = v
            q[i, j] = v / r2
    return p, q


# -- bi-Lipschitz scan -----------------------------------------------------------

def bilipschitz_scan_numpy(points: np.ndarray, cum: np.ndarray, length: float):
    n = points.shape[0]
    best = np.inf
    at = (0, 1)
    offs = np.arange(n)
    m = np.where(offs > n // 2, offs - n, offs)
    absw = np.abs(m) / n
    for i in range(n):
        j = (i + offs) % n
        chord = np.sqrt(((points[j] - points[i]) ** 2).sum(axis=1))
        s = np.mod(cum[j] - cum[i], length)
        d = np.minimum(s, length - s)
        ratio = np.full(n, np.inf)
        ratio[1:] = np.minimum(chord[1:], d[1:]) / absw[1:]
        k = int(np.argmin(ratio))
        if ratio[k] < best:
            best = float(ratio[k])
            at = (i, int(m[k]))
    return best, at[0], at[1]


@njit
def bilipschitz_scan_numba(points, cum, length):
    n, dim = points.shape
    best = np.inf
    bi = 0
    bm = 1
    for i in range(n):
        for off in range(1, n):
            j = (i + off) % n
            m = off - n if off > n // 2 else off
            chord2 = 0.0
            for a in range(dim):
                t = points[j, a] - points[i, a]
                chord2 += t * t
            chord = math.sqrt(chord2)
            s = (cum[j] - cum[i]) % length
            d = min(s, length - s)
            r = min(chord, d) / (abs(m) / n)
            if r < best:
                best = r
                bi = i
                bm = m
    return best, bi, bm


# -- G^(beta) ------------------------------------------------------------------

def _binom(b: float, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= (b - i) / (i + 1)
    return out


def g_beta_numpy(r: np.ndarray, beta: float, switch: float = SERIES_RADIUS) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    near = np.abs(r - 1.0) <= switch
    far = ~near
    rf = r[far]
    rb = rf ** beta
    out[far] = (1.0 - rb) / (2.0 * rb * (1.0 - rf * rf))
    t = r[near] ** 2 - 1.0
    h = 0.5 * beta
    series = h + t * (_binom(h, 2) + t * (_binom(h, 3) + t * (_binom(h, 4) + t * _binom(h, 5))))
    out[near] = series / (2.0 * (1.0 + t) ** h)
    return out


@njit
def g_beta_numba(r, beta, switch):
    flat = r.ravel()
    out = np.empty(flat.size)
    h = 0.5 * beta
    c2 = h * (h - 1.0) / 2.0
    c3 = c2 * (h - 2.0) / 3.0
    c4 = c3 * (h - 3.0) / 4.0
    c5 = c4 * (h - 4.0) / 5.0
    for i in range(flat.size):
        x = flat[i]
        if abs(x - 1.0) > switch:
            xb = x ** beta
            out[i] = (1.0 - xb) / (2.0 * xb * (1.0 - x * x))
        else:
            t = x * x - 1.0
            s = h + t * (c2 + t * (c3 + t * (c4 + t * c5)))
            out[i] = s / (2.0 * (1.0 + t) ** h)
    return out.reshape(r.shape)


if USE_NUMBA:
    chord_powers = chord_powers_numba
    bilipschitz_scan = bilipschitz_scan_numba

    def g_beta(r, beta, switch=SERIES_RADIUS):
        return g_beta_numba(np.ascontiguousarray(r, dtype=float), float(beta), float(switch))
else:
    chord_powers = chord_powers_numpy
    bilipschitz_scan = bilipschitz_scan_numpy
    g_beta = g_beta_numpy
