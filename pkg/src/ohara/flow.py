"""Preconditioned gradient descent on E^(alpha) + lambda L over band-limited closed curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .curve import (CurveError, SampledCurve, embeddedness_constants, is_arclength, length,
                    reparametrize_arclength)
from .energy import EnergyParams, energy
from .quadrature import ConvergenceError
from .variation import ARCLENGTH_RTOL, l2_gradient


class FlowStall(ConvergenceError):
    """The line search found no admissible decrease."""


@dataclass(frozen=True)
class FlowConfig:
    params: EnergyParams
    K: int = 16
    step0: float = 1.0
    shrink: float = 0.5
    grow: float = 1.25
    tol_residual: float = 1e-3
    max_iter: int = 500
    renorm_every: int = 1
    max_backtracks: int = 30
    bilip_floor: float = 1e-3

    def __post_init__(self):
        self.params.for_gradient()
        if not 0.0 < self.shrink < 1.0 < self.grow:
            raise ValueError("need 0 < shrink < 1 < grow")
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be positive")
        if self.K < 1 or self.max_iter < 0 or self.renorm_every < 1 or self.step0 <= 0:
            raise ValueError("K, step0 and renorm_every must be positive, max_iter nonnegative")


@dataclass(frozen=True)
class FlowState:
    curve: SampledCurve
    energy: float
    length: float
    grad_norm: float
    step: float
    iter: int
    gradient: np.ndarray = field(repr=False, compare=False, default=None)

    def objective(self, lam: float) -> float:
        return self.energy + lam * self.length


@dataclass(frozen=True)
class FlowResult:
    state: FlowState
    trajectory: tuple
    converged: bool
    reason: str


# -- gradient in the real Fourier basis ------------------------------------------------

def _basis(n_samples: int, K: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.arange(n_samples) / n_samples
    k = np.arange(K + 1)
    arg = 2.0 * np.pi * np.outer(u, k)
    return np.cos(arg), np.sin(arg)


def assemble_gradient(curve: SampledCurve, params: EnergyParams, K: int) -> np.ndarray:
    """Components dE(e) + lam dL(e) for e = cos/sin(2 pi k u) on each axis, k <= K.

    Shape (K+1, 2, n): index [k, 0] is the cosine mode, [k, 1] the sine mode
    (zero at k = 0).  The curve must be parametrized proportionally to arc length.
    """
    if 2 * K >= curve.n_samples:
        raise ValueError("K must be below N/2")
    g = l2_gradient(curve, params)
    c, s = _basis(curve.n_samples, K)
    n = curve.n_samples
    out = np.empty((K + 1, 2, curve.dim))
    out[:, 0] = c.T @ g / n
    out[:, 1] = s.T @ g / n
    out[0, 1] = 0.0
    return out


def preconditioner(K: int, alpha: float) -> np.ndarray:
    k = np.arange(K + 1)
    return 1.0 / (1.0 + (2.0 * np.pi * k) ** (alpha + 1.0))


def precondition(gradient: np.ndarray, params: EnergyParams) -> np.ndarray:
    """Multiply mode k by (1 + (2 pi |k|)^(alpha+1))^-1."""
    K = gradient.shape[0] - 1
    return gradient * preconditioner(K, params.alpha)[:, None, None]


def gradient_norm(gradient: np.ndarray, params: EnergyParams) -> float:
    """sqrt(sum_k P_k |g_k|^2), the norm dual to the preconditioned metric."""
    return float(np.sqrt(np.sum(precondition(gradient, params) * gradient)))


def synthesize(modes: np.ndarray, n_samples: int) -> np.ndarray:
    """Grid field sum_k modes[k,0] cos(2 pi k u) + modes[k,1] sin(2 pi k u)."""
    c, s = _basis(n_samples, modes.shape[0] - 1)
    return c @ modes[:, 0] + s @ modes[:, 1]


# -- descent -------------------------------------------------------------------------------

def _normalize(curve: SampledCurve, reproject: bool) -> SampledCurve:
    if reproject:
        curve = reparametrize_arclength(curve)
    pts = np.array(curve.samples)
    return SampledCurve(pts - pts.mean(axis=0))


def make_state(curve: SampledCurve, config: FlowConfig, step: float, it: int) -> FlowState:
    p = config.params
    e = energy(curve, p).value
    g = assemble_gradient(curve, p, config.K)
    return FlowState(curve, e, length(curve), gradient_norm(g, p), step, it, g)


def _admissible(curve: SampledCurve, floor: float) -> bool:
    try:
        rep = embeddedness_constants(curve)
    except CurveError:
        return False
    return rep.c_bilip > floor * length(curve)


def flow_step(state: FlowState, config: FlowConfig) -> FlowState:
    """One backtracking step along the preconditioned negative gradient."""
    p = config.params
    g = state.gradient
    if g is None:
        g = assemble_gradient(state.curve, p, config.K)
    direction = -synthesize(precondition(g, p), state.curve.n_samples)
    base = np.array(state.curve.samples)
    f_old = state.objective(p.lam)
    floor = 64.0 * np.finfo(float).eps * max(1.0, abs(f_old))
    step = state.step
    for attempt in range(config.max_backtracks + 1):
        try:
            cand = SampledCurve(base + step * direction)
            # the gradient formula needs constant speed, so off-cadence steps
            # still reproject once the speed drifts
            due = (state.iter + 1) % config.renorm_every == 0
            cand = _normalize(cand, due or not is_arclength(cand, ARCLENGTH_RTOL))
            if _admissible(cand, config.bilip_floor):
                e = energy(cand, p).value
                f_new = e + p.lam * length(cand)
                if f_new < f_old or (f_new <= f_old + floor and state.grad_norm <= config.tol_residual):
                    new_step = step * config.grow if attempt == 0 else step
                    gnew = assemble_gradient(cand, p, config.K)
                    return FlowState(cand, e, length(cand), gradient_norm(gnew, p), new_step,
                                     state.iter + 1, gnew)
        except CurveError:
            pass
        step *= config.shrink
    raise FlowStall(f"line search failed after {config.max_backtracks} backtracks "
                    f"at iteration {state.iter}")


def log_line(state: FlowState) -> str:
    return (f"{state.iter} {state.energy:.12g} {state.length:.12g} "
            f"{state.grad_norm:.12g} {state.step:.12g}")


def minimize(initial: SampledCurve, config: FlowConfig) -> FlowResult:
    """Iterate flow_step until grad_norm <= tol_residual or max_iter steps."""
    state = make_state(_normalize(initial, True), config, config.step0, 0)
    traj = [state]
    while True:
        if state.grad_norm <= config.tol_residual:
            return FlowResult(state, tuple(traj), True, "tolerance reached")
        if state.iter >= config.max_iter:
            return FlowResult(state, tuple(traj), False,
                              f"max_iter={config.max_iter} reached with grad_norm={state.grad_norm:.3e}")
        try:
            state = flow_step(state, config)
        except FlowStall as exc:
            return FlowResult(state, tuple(traj), False, str(exc))
        traj.append(state)


def trajectory_text(result: FlowResult) -> str:
    return "".join(log_line(s) + "\n" for s in result.trajectory)


# -- diagnostics ----------------------------------------------------------------------------

def radius_variation(curve: SampledCurve) -> tuple[float, float]:
    """Mean distance from the centroid and its variance."""
    pts = np.array(curve.samples)
    r = np.sqrt(((pts - pts.mean(axis=0)) ** 2).sum(axis=1))
    return float(r.mean()), float(r.var())


def smoothness_indicator(state: FlowState, K: int, floor: float = 1e-12) -> float:
    """Decay exponent m from a least-squares fit log|gamma_hat(k)| ~ -m log k, k in [K/4, K].

    Returns inf ("floor") when every coefficient in the window is below
    ``floor`` times the largest non-mean coefficient.
    """
    curve = state.curve if isinstance(state, FlowState) else state
    n = curve.n_samples
    if K < 4 or 2 * K >= n:
        raise ValueError("need 4 <= K < N/2")
    c = spectral.coefficients(np.array(curve.samples))
    k = np.arange(max(1, K // 4), K + 1)
    amp = np.sqrt((np.abs(c[k]) ** 2 + np.abs(c[-k]) ** 2).sum(axis=1))
    ref = float(np.sqrt((np.abs(c) ** 2).sum(axis=1))[1:].max())
    keep = amp > floor * ref
    if not np.any(keep):
        return float("inf")
    if keep.sum() < 2:
        raise ValueError("insufficient distinct modes above the floor")
    slope = np.polyfit(np.log(k[keep]), np.log(amp[keep]), 1)[0]
    return float(-slope)
