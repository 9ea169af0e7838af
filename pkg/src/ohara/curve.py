"""Closed curves sampled on the uniform parameter grid of R/Z."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import spectral
from ._kernels import bilipschitz_scan

REGULARITY_FLOOR = 1e-12


class CurveError(ValueError):
    """Invalid or degenerate curve input."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _check_grid_size(n: int) -> None:
    if not _is_power_of_two(n) or n < 16:
        raise CurveError(f"sample count must be a power of two >= 16, got {n}")


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """N samples gamma(j/N), j = 0..N-1, of a closed curve in R^n.

    The endpoint is not repeated; index arithmetic is mod N.
    """

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise CurveError("samples must have shape (N, n) with n >= 2")
        _check_grid_size(arr.shape[0])
        if not np.all(np.isfinite(arr)):
            raise CurveError("samples contain non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def params(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.n_samples

    @cached_property
    def derivative(self) -> np.ndarray:
        d = spectral.derivative(self.samples)
        d.setflags(write=False)
        return d

    @cached_property
    def speed(self) -> np.ndarray:
        s = np.sqrt((self.derivative ** 2).sum(axis=1))
        s.setflags(write=False)
        return s

    @cached_property
    def _arclength_parts(self) -> tuple[float, np.ndarray]:
        return spectral.periodic_antiderivative(np.array(self.speed))

    def transformed(self, rotation=None, shift=None, scale: float = 1.0) -> "SampledCurve":
        pts = self.samples * scale
        if rotation is not None:
            pts = pts @ np.asarray(rotation).T
        if shift is not None:
            pts = pts + np.asarray(shift)
        return SampledCurve(pts)


@dataclass(frozen=True, eq=False)
class FourierCurve:
    """Coefficients gamma_hat(k), k = -K..K, stored row-wise in that order."""

    coeffs: np.ndarray
    tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] % 2 != 1 or c.shape[1] < 2:
            raise CurveError("coeffs must have shape (2K+1, n) with n >= 2")
        scale = max(1.0, float(np.abs(c).max(initial=0.0)))
        if np.abs(c - np.conj(c[::-1])).max(initial=0.0) > self.tol * scale:
            raise CurveError("coefficients violate the reality condition")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    def __getitem__(self, k: int) -> np.ndarray:
        if abs(k) > self.K:
            return np.zeros(self.dim, dtype=complex)
        return self.coeffs[k + self.K]

    @classmethod
    def from_modes(cls, modes: dict, dim: int) -> "FourierCurve":
        """Build from {k: vector} for k >= 0; negative modes are filled by symmetry."""
        K = max(modes) if modes else 0
        c = np.zeros((2 * K + 1, dim), dtype=complex)
        for k, v in modes.items():
            v = np.asarray(v, dtype=complex)
            if k == 0:
                c[K] = v.real
            else:
                c[K + k] = v
                c[K - k] = np.conj(v)
        return cls(c)


@dataclass(frozen=True)
class EmbeddednessReport:
    c_bilip: float
    c_reg: float
    attained_at: tuple[float, float]


# -- constructors ----------------------------------------------------------------

def make_circle(n_samples: int, length: float = 1.0) -> SampledCurve:
    """Round planar circle of circumference ``length``, constant speed."""
    _check_grid_size(n_samples)
    if not length > 0:
        raise CurveError("length must be positive")
    r = length / (2 * np.pi)
    t = 2 * np.pi * np.arange(n_samples) / n_samples
    return SampledCurve(np.column_stack([r * np.cos(t), r * np.sin(t)]))


def make_fourier_curve(fc: FourierCurve, n_samples: int | None = None) -> SampledCurve:
    """Synthesize samples from coefficients on a grid of at least 4K points."""
    if n_samples is None:
        n_samples = 16
        while n_samples < 4 * fc.K:
            n_samples *= 2
    _check_grid_size(n_samples)
    if n_samples < 2 * fc.K + 1:
        raise CurveError("grid too coarse for the requested modes")
    u = np.arange(n_samples) / n_samples
    k = np.arange(-fc.K, fc.K + 1)
    basis = np.exp(2j * np.pi * np.outer(u, k))
    return SampledCurve((basis @ fc.coeffs).real)


def analyze(curve: SampledCurve, K: int) -> FourierCurve:
    """Fourier coefficients |k| <= K of the sampled curve (inverse of synthesis)."""
    if 2 * K >= curve.n_samples:
        raise CurveError("K must be below N/2")
    fh = spectral.coefficients(curve.samples)
    k = np.arange(-K, K + 1)
    c = fh[k % curve.n_samples]
    c = 0.5 * (c + np.conj(c[::-1]))
    return FourierCurve(c)


def ellipse(n_samples: int, a: float = 2.0, b: float = 1.0) -> SampledCurve:
    """Ellipse sampled at uniform angle (not constant speed)."""
    t = 2 * np.pi * np.arange(n_samples) / n_samples
    return SampledCurve(np.column_stack([a * np.cos(t), b * np.sin(t)]))


def trefoil_coefficients(scale: float = 1.0) -> FourierCurve:
    """(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t), t = 2 pi u."""
    s = scale
    return FourierCurve.from_modes({
        1: s * np.array([-0.5j, 0.5, 0.0]),
        2: s * np.array([-1.0j, -1.0, 0.0]),
        3: s * np.array([0.0, 0.0, 0.5j]),
    }, dim=3)


def perturbed_circle(n_samples: int, amplitude: float = 0.05, mode: int = 3,
                     length: float = 1.0) -> SampledCurve:
    """Circle of nominal circumference ``length`` with a radial cos(mode t) bump."""
    r = length / (2 * np.pi)
    t = 2 * np.pi * np.arange(n_samples) / n_samples
    rad = r * (1.0 + amplitude * np.cos(mode * t))
    return SampledCurve(np.column_stack([rad * np.cos(t), rad * np.sin(t)]))


# -- geometry ----------------------------------------------------------------------

def spectral_derivative(curve: SampledCurve) -> np.ndarray:
    return curve.derivative


def require_regular(curve: SampledCurve) -> None:
    scale = max(1.0, float(np.abs(curve.samples).max()))
    if curve.speed.min() <= REGULARITY_FLOOR * scale:
        raise CurveError("curve is not regular (vanishing speed)")


def length(curve: SampledCurve) -> float:
    """Length as the grid mean of |gamma'| (spectrally accurate, exact for constant speed)."""
    return float(curve.speed.mean())


def cumulative_arclength(curve: SampledCurve, x) -> np.ndarray:
    """Arc length C(x) from parameter 0 to x along the curve (x may exceed 1)."""
    mean, g = curve._arclength_parts
    x = np.asarray(x, dtype=float)
    return mean * x + spectral.evaluate(g, x) - g[0]


def segment_length(curve: SampledCurve, u, w) -> np.ndarray:
    """Signed arc length from u to u + w."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    return cumulative_arclength(curve, u + w) - cumulative_arclength(curve, u)


def intrinsic_distance(curve: SampledCurve, u, w):
    """Shorter arc length between gamma(u + w) and gamma(u), |w| <= 1/2."""
    w_arr = np.asarray(w, dtype=float)
    if np.any(np.abs(w_arr) > 0.5):
        raise CurveError("|w| must not exceed 1/2")
    L = length(curve)
    s = np.abs(segment_length(curve, u, w_arr))
    d = np.minimum(s, L - s)
    return float(d) if d.ndim == 0 else d


def is_arclength(curve: SampledCurve, rtol: float = 1e-6) -> bool:
    sp = curve.speed
    return bool(np.abs(sp - sp.mean()).max() <= rtol * sp.mean())


def reparametrize_arclength(curve: SampledCurve, n_out: int | None = None) -> SampledCurve:
    """Constant-speed resampling: inverts the cumulative arc length by Newton's method."""
    require_regular(curve)
    n_out = curve.n_samples if n_out is None else n_out
    _check_grid_size(n_out)
    L = length(curve)
    target = L * np.arange(n_out) / n_out
    x = target / L
    speed = np.array(curve.speed)
    for _ in range(60):
        resid = cumulative_arclength(curve, x) - target
        step = resid / spectral.evaluate(speed, x)
        x = x - step
        if np.abs(step).max() < 1e-15:
            break
    return SampledCurve(spectral.evaluate(np.array(curve.samples), x))


def embeddedness_constants(curve: SampledCurve) -> EmbeddednessReport:
    """Grid scan of min(|chord|, d)/|w| over all sample pairs, and min speed."""
    c_reg = float(curve.speed.min())
    scale = max(1.0, float(np.abs(curve.samples).max()))
    if c_reg <= REGULARITY_FLOOR * scale:
        raise CurveError("degenerate curve: c_reg = 0")
    n = curve.n_samples
    cum = cumulative_arclength(curve, curve.params)
    best, i, m = bilipschitz_scan(np.ascontiguousarray(curve.samples), cum, length(curve))
    return EmbeddednessReport(float(best), c_reg, (i / n, m / n))
