"""Fourier helpers for periodic samples on the uniform grid u_j = j/N.

All routines use numpy's FFT ordering.  The Nyquist mode of an even-length
grid is treated as a cosine so that real samples stay real under shifts and
off-grid evaluation.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 16


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order (Nyquist is -n/2)."""
    return np.fft.fftfreq(n, 1.0 / n)


def coefficients(f: np.ndarray) -> np.ndarray:
    """Normalized Fourier coefficients f_hat(k) = (1/N) sum_j f_j exp(-2 pi i k u_j)."""
    return np.fft.fft(f, axis=0) / f.shape[0]


def derivative(f: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative in u; the Nyquist mode is dropped."""
    n = f.shape[0]
    k = wavenumbers(n)
    mult = (2j * np.pi * k) ** order
    mult[n // 2] = 0.0
    mult = mult.reshape((n,) + (1,) * (f.ndim - 1))
    out = np.fft.ifft(mult * np.fft.fft(f, axis=0), axis=0)
    return out.real if np.isrealobj(f) else out


def periodic_antiderivative(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split f = mean + g' with g periodic; returns (mean, samples of g)."""
    n = f.shape[0]
    k = wavenumbers(n)
    fh = np.fft.fft(f, axis=0)
    mean = fh[0] / n
    mult = np.zeros(n, dtype=complex)
    nz = (k != 0) & (np.abs(k) < n // 2)
    mult[nz] = 1.0 / (2j * np.pi * k[nz])
    mult = mult.reshape((n,) + (1,) * (f.ndim - 1))
    g = np.fft.ifft(mult * fh, axis=0)
    if np.isrealobj(f):
        return mean.real, g.real
    return mean, g


def _shift_multipliers(n: int, w: np.ndarray, minus_one: bool) -> np.ndarray:
    k = wavenumbers(n)
    theta = 2.0 * np.pi * np.outer(w, k)
    if minus_one:
        half = 0.5 * theta
        s = np.sin(half)
        mult = -2.0 * s * s + 1j * np.sin(theta)
        mult[:, n // 2] = -2.0 * np.sin(half[:, n // 2]) ** 2
    else:
        mult = np.exp(1j * theta)
        mult[:, n // 2] = np.cos(theta[:, n // 2])
    return mult


def shifted(f: np.ndarray, w: np.ndarray, *, difference: bool = False,
            fhat: np.ndarray | None = None) -> np.ndarray:
    """Trigonometric interpolant of f evaluated at u_j + w_m for every node w_m.

    Returns shape (len(w), N) + f.shape[1:].  With ``difference=True`` the
    result is f(u_j + w_m) - f(u_j), computed without cancellation for small w.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    n = f.shape[0]
    if fhat is None:
        fhat = np.fft.fft(f, axis=0)
    mult = _shift_multipliers(n, w, difference)
    mult = mult.reshape(mult.shape + (1,) * (f.ndim - 1))
    out = np.fft.ifft(mult * fhat[None], axis=1)
    return out.real if np.isrealobj(f) else out


def evaluate(f: np.ndarray, x: np.ndarray, fhat: np.ndarray | None = None,
             max_mode: int | None = None) -> np.ndarray:
    """Trigonometric interpolant of grid samples f at arbitrary points x.

    ``max_mode`` drops modes |k| > max_mode, which is exact for band-limited
    data and cheaper for many points.
    """
    x = np.asarray(x, dtype=float)
    n = f.shape[0]
    if fhat is None:
        fhat = np.fft.fft(f, axis=0) / n
    k = wavenumbers(n)
    fh = fhat.reshape(n, -1)
    nyq = n // 2
    if max_mode is not None and max_mode < nyq:
        keep = np.abs(k) <= max_mode
        k, fh, nyq = k[keep], fh[keep], None
    flat = x.reshape(-1)
    tail = f.shape[1:]
    out = np.empty((flat.size,) + tail, dtype=complex)
    chunk = max(1, _CHUNK // k.size)
    for start in range(0, flat.size, chunk):
        xs = flat[start:start + chunk]
        theta = 2.0 * np.pi * np.outer(xs, k)
        e = np.exp(1j * theta)
        if nyq is not None:
            e[:, nyq] = np.cos(theta[:, nyq])
        out[start:start + xs.size] = (e @ fh).reshape((xs.size,) + tail)
    out = out.reshape(x.shape + tail)
    return out.real if np.isrealobj(f) else out


def effective_bandwidth(f: np.ndarray, rtol: float = 1e-13, include_mean: bool = False) -> int:
    """Largest |k| whose coefficient exceeds rtol times the largest one.

    The mean is ignored for the reference size unless ``include_mean``.
    """
    n = f.shape[0]
    fh = np.abs(np.fft.fft(f, axis=0)).reshape(n, -1).max(axis=1)
    if include_mean:
        top = fh.max()
        fh[0] = 0.0
        return int(np.abs(wavenumbers(n))[fh > rtol * top].max(initial=0))
    fh[0] = 0.0
    top = fh.max()
    if top == 0.0:
        return 0
    k = np.abs(wavenumbers(n))
    return int(k[fh > rtol * top].max())
