"""First variation of E^(alpha), the intrinsic-distance derivative and stationarity checks.

For a constant-speed curve (speed L) the derivative in direction h is the
principal value

    dE(gamma; h) = lim_{eps->0} int_{U_eps} (alpha-2) L^-alpha <gamma',h'>/|w|^alpha
                   + 2 <gamma',h'>/|dg|^alpha - alpha L^2 <dg,dh>/|dg|^(alpha+2),

with dg = gamma(u+w) - gamma(u).  Collecting the w-integrals per u gives
dE_eps = mean_u(a_eps <gamma',h'> + <b_eps, h>), and summation by parts turns
this into the pairing with the L^2 field G_eps = -(a_eps gamma')' + b_eps.
The individually divergent parts of a_eps and b_eps cancel inside G_eps, so the
per-cutoff values approach the limit like eps^(3-alpha) and are extrapolated.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import quadrature, spectral
from ._kernels import chord_powers
from .curve import (CurveError, SampledCurve, cumulative_arclength, is_arclength, length,
                    require_regular, segment_length)
from .energy import (EnergyParams, bandwidth, chord_table, distance_part, energy,
                     symmetric_nodes)
from .sobolev import sobolev_norm

ARCLENGTH_RTOL = 1e-6

_FIELD_CACHE: "weakref.WeakKeyDictionary[SampledCurve, dict]" = weakref.WeakKeyDictionary()


@dataclass(frozen=True, eq=False)
class Direction:
    """Displacement field h sampled on the curve's grid, shape (N, n)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2:
            raise CurveError("direction must have shape (N, n)")
        if not np.all(np.isfinite(arr)):
            raise CurveError("direction contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @cached_property
    def derivative(self) -> np.ndarray:
        d = spectral.derivative(self.values)
        d.setflags(write=False)
        return d

    @classmethod
    def for_curve(cls, curve: SampledCurve, h) -> "Direction":
        if isinstance(h, SampledCurve):
            h = h.samples
        d = h if isinstance(h, Direction) else cls(h)
        if d.values.shape != curve.samples.shape:
            raise CurveError(f"direction shape {d.values.shape} does not match "
                             f"curve shape {curve.samples.shape}")
        return d


@dataclass(frozen=True)
class VariationReport:
    dE: float
    per_eps: tuple
    extrapolated: float
    dLength: float
    residual_total: float
    error_estimate: float = 0.0


def _prepared(curve: SampledCurve, h, params: EnergyParams):
    h = Direction.for_curve(curve, h)
    if params.quad_N is None or params.quad_N == curve.n_samples:
        return curve, h
    x = np.arange(params.quad_N) / params.quad_N
    return (SampledCurve(spectral.evaluate(np.array(curve.samples), x)),
            Direction(spectral.evaluate(np.array(h.values), x)))


def _require_arclength(curve: SampledCurve) -> None:
    require_regular(curve)
    if not is_arclength(curve, ARCLENGTH_RTOL):
        raise CurveError("curve is not parametrized proportionally to arc length "
                         "(reparametrize first or use the general formula)")


def tangent(curve: SampledCurve) -> np.ndarray:
    return np.array(curve.derivative) / np.array(curve.speed)[:, None]


def length_variation(curve: SampledCurve, h) -> float:
    """d/dtau L(gamma + tau h) = int <gamma'/|gamma'|, h'>."""
    h = Direction.for_curve(curve, h)
    return float(np.einsum("ji,ji->", tangent(curve), h.derivative) / curve.n_samples)


# -- arc-length formula -------------------------------------------------------------

def gradient_fields(curve: SampledCurve, alpha: float, eps, part: str = "full") -> np.ndarray:
    """L^2 fields G_eps for every cutoff, shape (len(eps), N, n).

    dE_eps(gamma; h) = mean_u <G_eps(u), h(u)> for all h.  With
    ``part="remainder"`` the flat-metric powers (L|w|)^-alpha and
    (L|w|)^-(alpha+2) are subtracted from the chord powers, which leaves the
    absolutely integrable remainder of the decomposition dE = alpha L^-alpha Q + R.
    Cached per curve.
    """
    if part not in ("full", "remainder"):
        raise ValueError(f"unknown part {part!r}")
    eps = tuple(float(e) for e in eps)
    per_curve = _FIELD_CACHE.setdefault(curve, {})
    key = (float(alpha), eps, part)
    if key in per_curve:
        return per_curve[key]
    L = length(curve)
    rule = quadrature.band_rule(eps, bandwidth(curve))
    m = rule.w.size
    dg = chord_table(curve, symmetric_nodes(rule))
    p, p2 = chord_powers(dg, alpha)
    e = np.asarray(rule.eps)
    if part == "remainder":
        lw = L * rule.w[:, None]
        flat_a, flat_b = lw ** -alpha, lw ** (-alpha - 2.0)
        a_nodes = 2.0 * ((p[:m] - flat_a) + (p[m:] - flat_a))
        b_nodes = dg[:m] * (p2[:m] - flat_b)[:, :, None] + dg[m:] * (p2[m:] - flat_b)[:, :, None]
        flat = np.zeros_like(e)
    else:
        a_nodes = 2.0 * (p[:m] + p[m:])
        b_nodes = dg[:m] * p2[:m, :, None] + dg[m:] * p2[m:, :, None]
        flat = 2.0 * (alpha - 2.0) * L ** -alpha * (e ** (1 - alpha) - 2.0 ** (alpha - 1)) / (alpha - 1)
    a = rule.cumulative(quadrature.band_sums(rule, a_nodes)) + flat[:, None]
    b = 2.0 * alpha * L * L * rule.cumulative(quadrature.band_sums(rule, b_nodes))
    d1 = np.array(curve.derivative)
    G = np.stack([b[i] - spectral.derivative(a[i][:, None] * d1) for i in range(len(e))])
    G.setflags(write=False)
    per_curve[key] = G
    return G


def _pairing(G: np.ndarray, h: np.ndarray) -> np.ndarray:
    """mean_u <G_m, h> with the complex pairing sum_i a_i conj(b_i)."""
    out = np.einsum("mji,ji->m", G, np.conj(h)) / h.shape[0]
    return out.real if np.isrealobj(out) else out


def _tail_floor(G: np.ndarray, h: np.ndarray) -> float:
    # rounding level of the pairing: the fields carry eps^(1-alpha)-sized
    # parts that cancel only in the sum
    return 1e-10 * float(np.abs(G[-1]).sum(axis=1).mean() * np.abs(h).max(initial=0.0)) + 1e-14


def first_variation_arclength(curve: SampledCurve, h, params: EnergyParams) -> VariationReport:
    """dE(gamma; h) for a constant-speed curve, extrapolated along the cutoff schedule."""
    params.for_gradient()
    curve, h = _prepared(curve, h, params)
    _require_arclength(curve)
    eps = params.eps_schedule
    G = gradient_fields(curve, params.alpha, eps)
    vals = _pairing(G, h.values)
    quadrature.check_tail(eps, vals, _tail_floor(G, h.values), "the variation")
    dE, err = quadrature.extrapolate(eps, vals, params.alpha, params.richardson_terms)
    dL = length_variation(curve, h)
    return VariationReport(float(dE), tuple(zip(eps, vals.tolist())), float(dE), dL,
                           float(dE) + params.lam * dL, float(err))


def l2_gradient(curve: SampledCurve, params: EnergyParams) -> np.ndarray:
    """Field g with dE(h) + lam dL(h) = mean_u <g, h> for every h (arc-length curves)."""
    params.for_gradient()
    _require_arclength(curve)
    eps = params.eps_schedule
    G = gradient_fields(curve, params.alpha, eps)
    exps = quadrature.cutoff_exponents(params.alpha, min(params.richardson_terms, len(eps) - 1))
    g = quadrature.richardson(eps, G, exps)
    return g - params.lam * spectral.derivative(tangent(curve))


# -- general parametrization --------------------------------------------------------

def half_length_offset(curve: SampledCurve) -> np.ndarray:
    """w*(u_j) in (0, 1) with L(gamma|[u_j, u_j + w*]) = L/2, by Newton's method."""
    L = length(curve)
    u = curve.params
    speed = np.array(curve.speed)
    c0 = cumulative_arclength(curve, u)
    w = np.full_like(u, 0.5)
    for _ in range(60):
        resid = cumulative_arclength(curve, u + w) - c0 - 0.5 * L
        step = resid / spectral.evaluate(speed, u + w)
        w = np.clip(w - step, 1e-6, 1.0 - 1e-6)
        if np.abs(step).max() < 1e-14:
            break
    return w


class _ArcData:
    """Arc length C and F = int <T, h'> as mean slope plus periodic part."""

    def __init__(self, curve: SampledCurve, h: Direction):
        self.L = length(curve)
        self.speed = np.array(curve.speed)
        self.Fp = np.einsum("ji,ji->j", tangent(curve), h.derivative)
        self.dL = float(self.Fp.mean())
        self.c_mean, self.gC = curve._arclength_parts
        _, self.gF = spectral.periodic_antiderivative(self.Fp)
        self.bw = max(spectral.effective_bandwidth(self.speed, include_mean=True),
                      spectral.effective_bandwidth(self.gF), 4)

    def along(self, u_index: np.ndarray, w: np.ndarray):
        """Signed arc length, signed F increment and speed at u_j + w.

        ``u_index`` holds grid indices j broadcastable against ``w``.
        """
        u = u_index / self.speed.size
        stacked = np.column_stack([self.gC, self.gF, self.speed])
        vals = spectral.evaluate(stacked, u + w, max_mode=self.bw)
        dC = self.c_mean * w + vals[..., 0] - self.gC[u_index]
        dF = self.dL * w + vals[..., 1] - self.gF[u_index]
        return dC, dF, vals[..., 2]


def _branch(dC, dF, w, L, dL):
    """(d, D) from signed segment data; ties take the complementary arc."""
    sgn = np.sign(w)
    S = np.abs(dC)
    dS = sgn * dF
    short = S < 0.5 * L
    return np.where(short, S, L - S), np.where(short, dS, dL - dS)


def _outer_part(curve: SampledCurve, arc: _ArcData, alpha: float, wc: float,
                wstar: np.ndarray, nodes: int = quadrature.GL_NODES) -> np.ndarray:
    """Per-u integral of D d^(-alpha-1) |gamma'(u+w)| over wc <= |w| <= 1/2.

    The integrand jumps where the segment reaches half the length, so each
    side is split there (w* on the positive side, w* - 1 on the negative).
    """
    n = curve.n_samples
    kp = np.where(wstar < 0.5, wstar, 0.5)
    kn = np.where(wstar > 0.5, wstar - 1.0, -0.5)
    ends = [(np.full(n, wc), kp), (kp, np.full(n, 0.5)),
            (np.full(n, -0.5), kn), (kn, np.full(n, -wc))]
    panels = max(1, int(np.ceil((0.5 - wc) * arc.bw)))
    x, wt = quadrature.gauss_legendre(nodes)
    t = (np.arange(panels)[:, None] + x[None, :]).ravel() / panels
    tw = np.tile(wt, panels) / panels
    ws = np.concatenate([lo[:, None] + (hi - lo)[:, None] * t[None, :] for lo, hi in ends], axis=1)
    wts = np.concatenate([(hi - lo)[:, None] * tw[None, :] for lo, hi in ends], axis=1)
    idx = np.broadcast_to(np.arange(n)[:, None], ws.shape)
    dC, dF, sp = arc.along(idx, ws)
    d, D = _branch(dC, dF, ws, arc.L, arc.dL)
    return (wts * D * d ** (-alpha - 1.0) * sp).sum(axis=1)


def first_variation_general(curve: SampledCurve, h, params: EnergyParams) -> VariationReport:
    """dE(gamma; h) for any regular parametrization, including the d_gamma derivative."""
    params.for_gradient()
    curve, h = _prepared(curve, h, params)
    require_regular(curve)
    alpha = params.alpha
    eps = params.eps_schedule
    arc = _ArcData(curve, h)
    sig = arc.speed
    hv = np.array(h.values)

    rule = quadrature.band_rule(eps, bandwidth(curve, hv))
    m = rule.w.size
    w = symmetric_nodes(rule)
    dg = chord_table(curve, w)
    dh = spectral.shifted(hv, w, difference=True)
    p, p2 = chord_powers(dg, alpha)
    sig_w = spectral.shifted(sig, w)
    fold = lambda v: rule.cumulative(quadrature.band_sums(rule, v[:m] + v[m:]))  # noqa: E731
    chord_speed = fold(p * sig_w)
    dist = distance_part(curve, eps, alpha)
    t12 = 2.0 * ((chord_speed - dist) * arc.Fp).mean(axis=1)
    t3 = -alpha * (fold(np.einsum("mji,mji->mj", dg, dh) * p2 * sig_w) * sig).mean(axis=1)

    wstar = half_length_offset(curve)
    wc = min(0.25, 0.9 * float(min(wstar.min(), (1.0 - wstar).min())))
    if wc <= eps[0]:
        raise CurveError("parametrization too uneven for the cutoff schedule "
                         f"(half-length offset {wc:.3g} below eps {eps[0]:.3g})")
    inner = quadrature.band_rule(eps, bandwidth(curve, hv), upper=wc)
    mi = inner.w.size
    wi = symmetric_nodes(inner)
    dC = arc.c_mean * wi[:, None] + spectral.shifted(arc.gC, wi, difference=True)
    dF = arc.dL * wi[:, None] + spectral.shifted(arc.gF, wi, difference=True)
    d, D = _branch(dC, dF, wi[:, None], arc.L, arc.dL)
    v4 = D * d ** (-alpha - 1.0) * spectral.shifted(sig, wi)
    near = inner.cumulative(quadrature.band_sums(inner, v4[:mi] + v4[mi:]))
    far = _outer_part(curve, arc, alpha, wc, wstar)
    t4 = alpha * ((near + far[None, :]) * sig).mean(axis=1)

    vals = t12 + t3 + t4
    scale = float(np.abs(t12).max() + np.abs(t3).max() + np.abs(t4).max())
    quadrature.check_tail(eps, vals, 1e-12 * scale + 1e-14, "the variation")
    dE, err = quadrature.extrapolate(eps, vals, alpha, params.richardson_terms)
    return VariationReport(float(dE), tuple(zip(eps, vals.tolist())), float(dE), arc.dL,
                           float(dE) + params.lam * arc.dL, float(err))


def d_length_variation(curve: SampledCurve, h, u, w):
    """D(gamma; h)(u, w): derivative of the intrinsic distance d_gamma(u+w, u).

    On the complementary branch the total length moves as well, so
    D = dL - dS there, where dS is the derivative of the segment length.
    """
    w_arr = np.asarray(w, dtype=float)
    if np.any(np.abs(w_arr) > 0.5):
        raise CurveError("|w| must not exceed 1/2")
    h = Direction.for_curve(curve, h)
    arc = _ArcData(curve, h)
    u_arr = np.asarray(u, dtype=float)
    u_arr, w_arr = np.broadcast_arrays(u_arr, w_arr)
    S = segment_length(curve, u_arr, w_arr)
    x = u_arr + w_arr
    F = lambda t: arc.dL * t + spectral.evaluate(arc.gF, t)  # noqa: E731
    dS = np.sign(w_arr) * (F(x) - F(u_arr))
    D = np.where(np.abs(S) < 0.5 * arc.L, dS, arc.dL - dS)
    return float(D) if D.ndim == 0 else D


# -- oracles and residuals ----------------------------------------------------------

def finite_difference_energy(curve: SampledCurve, h, params: EnergyParams,
                             tau: float = 1e-4) -> float:
    """(E(gamma + tau h) - E(gamma - tau h)) / (2 tau)."""
    h = Direction.for_curve(curve, h)
    if not np.any(h.values):
        return 0.0
    pts = np.array(curve.samples)
    try:
        plus = energy(SampledCurve(pts + tau * h.values), params).value
        minus = energy(SampledCurve(pts - tau * h.values), params).value
    except CurveError as exc:
        raise CurveError(f"perturbed curve is not admissible at tau={tau:g}: {exc}") from exc
    return (plus - minus) / (2.0 * tau)


def test_family(n_samples: int, dim: int, K: int):
    """Real test directions: constants and cos/sin modes k <= K on each axis."""
    u = np.arange(n_samples) / n_samples
    for axis in range(dim):
        for k in range(K + 1):
            for kind, f in (("cos", np.cos), ("sin", np.sin)):
                if k == 0 and kind == "sin":
                    continue
                h = np.zeros((n_samples, dim))
                h[:, axis] = f(2.0 * np.pi * k * u)
                yield axis, k, kind, h


test_family.__test__ = False  # not a pytest test


def stationarity_residual(curve: SampledCurve, params: EnergyParams, K_test: int) -> float:
    """max over the test family of |dE(h) + lam dL(h)| / ||h||_{H^((1+alpha)/2)}."""
    params.for_gradient()
    if params.quad_N is not None and params.quad_N != curve.n_samples:
        x = np.arange(params.quad_N) / params.quad_N
        curve = SampledCurve(spectral.evaluate(np.array(curve.samples), x))
    g = l2_gradient(curve, params)
    order = 0.5 * (1.0 + params.alpha)
    worst = 0.0
    for _, _, _, h in test_family(curve.n_samples, curve.dim, K_test):
        r = abs(float(np.einsum("ji,ji->", g, h)) / curve.n_samples)
        worst = max(worst, r / sobolev_norm(h, order))
    return worst
