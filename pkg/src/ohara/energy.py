"""O'Hara energies E^(alpha) and their cutoff truncations E_eps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature, spectral
from ._kernels import chord_powers
from .curve import CurveError, SampledCurve, embeddedness_constants, length, require_regular

SELF_INTERSECTION_TOL = 1e-12
EMBEDDED_TOL = 1e-8


@dataclass(frozen=True)
class EnergyParams:
    """Exponent, length multiplier and cutoff schedule.

    ``lam`` is the multiplier of the length term in E + lam * L.
    ``quad_N`` resamples the curve to that many points before integrating.
    """

    alpha: float = 2.5
    lam: float = 0.0
    eps_schedule: tuple = quadrature.DEFAULT_SCHEDULE
    quad_N: int | None = None
    richardson_terms: int = 3

    def __post_init__(self):
        if not 2.0 <= self.alpha < 3.0:
            raise ValueError(f"alpha must lie in [2, 3), got {self.alpha}")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        eps = tuple(float(e) for e in self.eps_schedule)
        if len(eps) < 2 or any(not 0.0 < e < 0.5 for e in eps):
            raise ValueError("eps_schedule needs at least two cutoffs in (0, 1/2)")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps_schedule must be strictly decreasing")
        object.__setattr__(self, "eps_schedule", eps)

    def for_gradient(self) -> "EnergyParams":
        if not 2.0 < self.alpha < 3.0:
            raise ValueError("variation formulas need alpha in (2, 3)")
        return self


@dataclass(frozen=True)
class EnergyValue:
    value: float
    eps_used: float
    error_estimate: float
    per_eps: tuple = ()


def prepare(curve: SampledCurve, params: EnergyParams) -> SampledCurve:
    if params.quad_N is None or params.quad_N == curve.n_samples:
        return curve
    x = np.arange(params.quad_N) / params.quad_N
    return SampledCurve(spectral.evaluate(np.array(curve.samples), x))


def _antiderivative(s: np.ndarray, L: float, alpha: float) -> np.ndarray:
    """Antiderivative of min(s, L - s)^-alpha on (0, L)."""
    a1 = alpha - 1.0
    half = 0.5 * L
    near = -s ** -a1 / a1
    far = -half ** -a1 / a1 + ((L - s) ** -a1 - half ** -a1) / a1
    return np.where(s <= half, near, far)


def bandwidth(curve: SampledCurve, *extra) -> int:
    """Significant Fourier range of the curve, its speed and any extra fields."""
    k = max(spectral.effective_bandwidth(np.array(curve.samples)),
            spectral.effective_bandwidth(np.array(curve.speed), include_mean=True),
            *(spectral.effective_bandwidth(np.asarray(e)) for e in extra))
    return max(4, k)


def distance_part(curve: SampledCurve, eps, alpha: float) -> np.ndarray:
    """Per-u integral of d^-alpha |gamma'(u+w)| over |w| in [eps, 1/2] for each eps.

    Substituting the signed arc length s for w turns the integral into one
    of min(|s|, L - |s|)^-alpha, which has a closed-form antiderivative.
    Shape (len(eps), N).
    """
    eps = np.asarray(eps, dtype=float)
    L = length(curve)
    mean, g = curve._arclength_parts
    offs = np.concatenate([eps, -eps, [0.5, -0.5]])
    S = mean * offs[:, None] + spectral.shifted(g, offs, difference=True)
    k = eps.size
    pos_lo, neg_lo = S[:k], np.abs(S[k:2 * k])
    pos_hi, neg_hi = S[2 * k], np.abs(S[2 * k + 1])
    A = lambda s: _antiderivative(s, L, alpha)  # noqa: E731
    return (A(pos_hi) - A(pos_lo)) + (A(neg_hi) - A(neg_lo))


def chord_table(curve: SampledCurve, w: np.ndarray) -> np.ndarray:
    """Chords gamma(u_j + w_m) - gamma(u_j), shape (M, N, n), with a self-contact guard."""
    samples = np.array(curve.samples)
    dg = spectral.shifted(samples, w, difference=True)
    scale = max(1.0, float(np.abs(samples).max()))
    if np.sqrt(np.einsum("mji,mji->mj", dg, dg).min()) < SELF_INTERSECTION_TOL * scale:
        raise CurveError("self-intersection detected (vanishing chord)")
    return dg


def require_embedded(curve: SampledCurve) -> None:
    """Reject curves whose grid bi-Lipschitz constant has collapsed (double points)."""
    rep = embeddedness_constants(curve)
    if rep.c_bilip <= EMBEDDED_TOL * length(curve):
        u, w = rep.attained_at
        raise CurveError(f"self-intersection detected near u={u:.6g}, u+w={u + w:.6g}")


def symmetric_nodes(rule: quadrature.BandRule) -> np.ndarray:
    """The rule's offsets followed by their mirror images."""
    return np.concatenate([rule.w, -rule.w])


def truncated_energies(curve: SampledCurve, alpha: float, eps) -> np.ndarray:
    """E_eps for each cutoff in the decreasing sequence ``eps``."""
    require_regular(curve)
    speed = np.array(curve.speed)
    rule = quadrature.band_rule(eps, bandwidth(curve))
    w = symmetric_nodes(rule)
    dg = chord_table(curve, w)
    p, _ = chord_powers(dg, alpha)
    sp_shift = spectral.shifted(speed, w)
    vals = (p * sp_shift * speed[None, :]).mean(axis=1)
    m = rule.w.size
    chord = rule.cumulative(quadrature.band_sums(rule, vals[:m] + vals[m:]))
    dist = (distance_part(curve, rule.eps, alpha) * speed[None, :]).mean(axis=1)
    return chord - dist


def energy(curve: SampledCurve, params: EnergyParams) -> EnergyValue:
    """E^(alpha) by extrapolating E_eps along the cutoff schedule."""
    curve = prepare(curve, params)
    require_embedded(curve)
    eps = params.eps_schedule
    vals = truncated_energies(curve, params.alpha, eps)
    value, err = quadrature.extrapolate(eps, vals, params.alpha, params.richardson_terms)
    return EnergyValue(float(value), eps[-1], float(err), tuple(zip(eps, vals.tolist())))


def energy_truncated(curve: SampledCurve, params: EnergyParams, eps: float) -> EnergyValue:
    """E_eps: the same integral restricted to |w| >= eps."""
    if not 0.0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if eps == 0.5:
        return EnergyValue(0.0, 0.5, 0.0)
    curve = prepare(curve, params)
    require_embedded(curve)
    val = float(truncated_energies(curve, params.alpha, [eps])[0])
    return EnergyValue(val, eps, 0.0, ((eps, val),))


def energy_plus_length(curve: SampledCurve, params: EnergyParams) -> float:
    return energy(curve, params).value + params.lam * length(curve)
