"""Splitting of the first variation into a leading principal-value form Q and a remainder R.

For a unit-speed curve

    Q(gamma, h) = pv int int <gamma',h'>/|w|^alpha - <dg, dh>/|w|^(alpha+2),
    R(gamma, h) = int int 2 <gamma',h'>(|dg|^-alpha - |w|^-alpha)
                          - alpha <dg, dh>(|dg|^-(alpha+2) - |w|^-(alpha+2)),

and dE = alpha Q + R.  For speed L the identity reads dE = alpha L^-alpha Q + R,
with R built from the powers of L|w|.  Q is diagonal in Fourier modes with
symbol q_k |k|^(alpha+1); R is absolutely integrable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import quadrature, spectral
from ._kernels import g_beta
from .curve import CurveError, FourierCurve, SampledCurve, length
from .energy import EnergyParams, bandwidth, symmetric_nodes
from .sobolev import _as_coefficients
from .variation import (Direction, _pairing, _prepared, _require_arclength,
                        first_variation_arclength, gradient_fields)

SERIES_CUT = 0.25  # q_k integrand is summed as a power series below this x


@dataclass(frozen=True)
class SpectrumReport:
    alpha: float
    q: dict
    tail_flatness: float
    positivity_ok: bool

    @property
    def K(self) -> int:
        return max(self.q)

    def q_array(self) -> np.ndarray:
        return np.array([self.q[k] for k in range(1, self.K + 1)])

    def gaps(self) -> np.ndarray:
        return np.diff(self.q_array())


@dataclass(frozen=True)
class KernelParams:
    """Inner node values for the kernel g^(alpha,beta)_{s1,tau1,tau2}."""

    beta: float
    s1: float
    tau1: float
    tau2: float

    def __post_init__(self):
        for name in ("s1", "tau1", "tau2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class DecompositionReport:
    dE: float
    alpha_Q: float
    R: float
    identity_residual: float
    R_kernel: float | None = None


@dataclass(frozen=True)
class LowerOrderRow:
    k: int
    R: float
    leading: float
    rho: float


@dataclass(frozen=True)
class LowerOrderTable:
    rows: tuple
    decreasing: bool


# -- Q -------------------------------------------------------------------------------

def _grid_array(x) -> np.ndarray:
    if isinstance(x, (SampledCurve, Direction)):
        x = x.samples if isinstance(x, SampledCurve) else x.values
    arr = np.asarray(x)
    return arr[:, None] if arr.ndim == 1 else arr


def Q_truncated(gamma, h, alpha: float, eps) -> np.ndarray:
    """Q_eps for each cutoff; arguments are grid samples (real or complex).

    The u-mean of <dg, dh> at offset w is sum_k <g_hat(k), h_hat(k)> 4 sin^2(pi k w),
    which is the trapezoid rule in u evaluated exactly for grid functions.
    """
    g = _grid_array(gamma)
    hv = _grid_array(h)
    if g.shape != hv.shape:
        raise CurveError("Q needs two fields on the same grid")
    n = g.shape[0]
    gh = spectral.coefficients(g)
    hh = spectral.coefficients(hv)
    P = np.einsum("ki,ki->k", gh, np.conj(hh))
    k = spectral.wavenumbers(n)
    k_d = k.copy()
    k_d[n // 2] = 0.0
    tangential = np.sum(P * (2.0 * np.pi * k_d) ** 2)
    bw = max(4, spectral.effective_bandwidth(g), spectral.effective_bandwidth(hv))
    rule = quadrature.band_rule(eps, bw)
    diff2 = 4.0 * np.sin(np.pi * np.outer(rule.w, k)) ** 2 @ P
    nodes = diff2 * rule.w ** (-alpha - 2.0)
    e = np.asarray(rule.eps)
    flat = 2.0 * (e ** (1.0 - alpha) - 2.0 ** (alpha - 1.0)) / (alpha - 1.0)
    out = tangential * flat - 2.0 * rule.cumulative(quadrature.band_sums(rule, nodes))
    return out.real if np.isrealobj(g) and np.isrealobj(hv) else out


def Q_form(curve, h, params: EnergyParams):
    """Principal value Q(gamma, h) by cutoff extrapolation.

    Returns a float for real inputs and a complex number otherwise.
    """
    params.for_gradient()
    eps = params.eps_schedule
    vals = Q_truncated(curve, h, params.alpha, eps)
    if np.iscomplexobj(vals):
        re, _ = quadrature.extrapolate(eps, vals.real, params.alpha, params.richardson_terms)
        im, _ = quadrature.extrapolate(eps, vals.imag, params.alpha, params.richardson_terms)
        return complex(re, im)
    val, _ = quadrature.extrapolate(eps, vals, params.alpha, params.richardson_terms)
    return float(val)


def _series_part(alpha: float, x0: float, tol: float = 1e-18) -> float:
    # int_0^x0 4((pi x)^2 - sin^2(pi x)) x^-(alpha+2) dx term by term, using
    # y^2 - sin^2 y = sum_{n>=2} (-1)^n 2^(2n-1) y^(2n) / (2n)!
    total = 0.0
    term_n = 2
    coef = 1.0
    while True:
        coef = (-1.0) ** term_n * 2.0 ** (2 * term_n - 1) * np.pi ** (2 * term_n) / _factorial(2 * term_n)
        p = 2 * term_n - alpha - 1.0
        t = 4.0 * coef * x0 ** p / p
        total += t
        if abs(t) < tol * abs(total) or term_n > 60:
            return total
        term_n += 1


def _factorial(m: int) -> float:
    return float(np.prod(np.arange(1, m + 1, dtype=float)))


def _q_integrand(x: float, alpha: float) -> float:
    y = np.pi * x
    return 4.0 * (y * y - np.sin(y) ** 2) * x ** (-alpha - 2.0)


@lru_cache(maxsize=None)
def _q_increments(alpha: float, K: int) -> tuple:
    """q_1..q_K as cumulative sums of half-unit increments."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        first = _series_part(alpha, SERIES_CUT) + integrate.quad(
            _q_integrand, SERIES_CUT, 0.5, args=(alpha,), epsabs=0.0, epsrel=1e-13)[0]
        pieces = [first]
        for j in range(1, K):
            pieces.append(integrate.quad(_q_integrand, 0.5 * j, 0.5 * (j + 1), args=(alpha,),
                                         epsabs=0.0, epsrel=1e-13)[0])
    return tuple((2.0 * np.cumsum(pieces)).tolist())


def q_coefficients(params: EnergyParams, K: int) -> SpectrumReport:
    """q_k = Q(e_k, e_k) / |k|^(alpha+1) for k = 1..K via the exact one-dimensional reduction

        q_k = 2 int_0^(k/2) 4((pi x)^2 - sin^2(pi x)) / x^(alpha+2) dx.
    """
    params.for_gradient()
    if K < 8:
        raise ValueError("K must be at least 8")
    vals = _q_increments(float(params.alpha), int(K))
    q = {k: vals[k - 1] for k in range(1, K + 1)}
    arr = np.array(vals)
    start = (3 * K) // 4
    tail = float(np.abs(np.diff(arr[start - 1:])).max())
    return SpectrumReport(float(params.alpha), q, tail, bool(np.all(arr > 0)))


def _common_length(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero-pad two FFT-ordered coefficient arrays to the same number of rows."""
    if a.shape[1:] != b.shape[1:]:
        raise ValueError("coefficient arrays must have the same dimension")
    n = max(a.shape[0], b.shape[0])
    out = []
    for arr in (a, b):
        if arr.shape[0] == n:
            out.append(arr)
            continue
        k = spectral.wavenumbers(arr.shape[0]).astype(int)
        if arr.shape[0] % 2 == 0 and np.any(arr[arr.shape[0] // 2] != 0):
            raise ValueError("cannot pad coefficients with an active Nyquist mode")
        big = np.zeros((n,) + arr.shape[1:], dtype=complex)
        big[k % n] = arr
        out.append(big)
    return out[0], out[1]


def Q_fourier(curve_hat, h_hat, params: EnergyParams, spectrum: SpectrumReport) -> float:
    """sum_k q_|k| |k|^(alpha+1) Re <gamma_hat(k), h_hat(k)>.

    Inputs are FourierCurve values or coefficient arrays in FFT order.
    """
    if params.alpha != spectrum.alpha:
        raise ValueError("spectrum was computed for a different alpha")
    g, hv = _common_length(_as_coefficients(curve_hat), _as_coefficients(h_hat))
    k = spectral.wavenumbers(g.shape[0]).astype(int)
    beyond = np.abs(k) > spectrum.K
    for arr in (g, hv):
        if np.abs(arr[beyond]).max(initial=0.0) > 1e-12 * np.abs(arr).max(initial=0.0):
            raise ValueError(f"modes beyond K={spectrum.K} present")
    total = 0.0
    for j in np.argsort(np.abs(k), kind="stable"):
        kk = abs(int(k[j]))
        if kk == 0 or kk > spectrum.K:
            continue
        pair = np.sum(g[j] * np.conj(hv[j]))
        total += spectrum.q[kk] * kk ** (params.alpha + 1.0) * pair.real
    return float(total)


# -- G^(beta) and R -------------------------------------------------------------------

def G_beta(z, beta: float):
    """G^(beta)(z) = (1 - |z|^beta) / (2 |z|^beta (1 - |z|^2)); z has shape (..., n) or is scalar |z|."""
    z = np.asarray(z, dtype=float)
    r = np.abs(z) if z.ndim == 0 else np.sqrt((z * z).sum(axis=-1))
    if np.any(r == 0.0):
        raise ValueError("G^(beta) is undefined at z = 0")
    out = g_beta(np.atleast_1d(r).astype(float), float(beta))
    return float(out[0]) if np.ndim(r) == 0 else out.reshape(np.shape(r))


def _remainder_values(curve: SampledCurve, h: np.ndarray, params: EnergyParams) -> np.ndarray:
    G = gradient_fields(curve, params.alpha, params.eps_schedule, part="remainder")
    return _pairing(G, h)


def R_truncated(curve: SampledCurve, h, params: EnergyParams) -> np.ndarray:
    """R restricted to |w| >= eps for each cutoff (direct chord-minus-flat form)."""
    params.for_gradient()
    curve, hd = _prepared(curve, h, params)
    _require_arclength(curve)
    return _remainder_values(curve, np.array(hd.values), params)


def R_form_direct(curve: SampledCurve, h, params: EnergyParams) -> float:
    """R over U_0.  The integrand is integrable; the missing strip |w| < eps is
    O(eps^(3-alpha)) and is removed by the same extrapolation as for dE."""
    eps = params.eps_schedule
    vals = R_truncated(curve, h, params)
    val, _ = quadrature.extrapolate(eps, vals, params.alpha, params.richardson_terms)
    return float(val)


def _composite(nodes: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    x, wt = quadrature.gauss_legendre(nodes)
    xs = ((np.arange(panels)[:, None] + x[None, :]) / panels).ravel()
    return xs, np.tile(wt, panels) / panels


def _kernel_values(g1: np.ndarray, d1: np.ndarray, hd: np.ndarray, w: np.ndarray,
                   alpha: float, x: np.ndarray, wt: np.ndarray) -> np.ndarray:
    """u-means of the kernel integrand at the offsets w (unit-speed data)."""
    t_shift = np.stack([spectral.shifted(d1, xi * w) for xi in x])   # (q, M, N, n)
    h_mean = np.einsum("q,qmji->mji", wt, np.stack([spectral.shifted(hd, xi * w) for xi in x]))
    t_mean = np.einsum("q,qmji->mji", wt, t_shift)
    # sum_ab wt_a wt_b |t_a - t_b|^2 = 2 sum_a wt_a |t_a - t_mean|^2
    dev = t_shift - t_mean[None]
    T = 2.0 * np.einsum("q,qmji->mj", wt, dev * dev)
    z = spectral.shifted(g1, w, difference=True) / w[:, None, None]
    r = np.sqrt((z * z).sum(axis=-1))
    ga = g_beta(r.ravel(), alpha).reshape(r.shape)
    gb = g_beta(r.ravel(), alpha + 2.0).reshape(r.shape)
    base = T * np.abs(w)[:, None] ** -alpha
    term1 = 2.0 * ga * base * np.einsum("ji,ji->j", d1, hd)[None, :]
    term2 = -alpha * gb * base * np.einsum("mji,mji->mj", t_mean, h_mean)
    return (term1 + term2).mean(axis=1)


def R_form_kernel(curve: SampledCurve, h, params: EnergyParams, quad_nodes: int = 8) -> float:
    """R from the kernel form with G^(alpha), G^(alpha+2) and Gauss-Legendre inner nodes.

    Uses 1 - |z|^2 = (1/2) int int |gamma'(u + t1 w) - gamma'(u + t2 w)|^2 for unit
    speed, z = (gamma(u+w) - gamma(u))/w, so that chord-minus-flat differences become
    G^(beta)(z) times that spread.  The inner variables use ``quad_nodes`` nodes per
    panel, with enough panels that each spans about one oscillation of the
    tangent.  Computed on gamma/L and rescaled by L^(1-alpha).
    """
    params.for_gradient()
    curve, hdir = _prepared(curve, h, params)
    _require_arclength(curve)
    L = length(curve)
    g1 = np.array(curve.samples) / L
    d1 = np.array(curve.derivative) / L
    hv = np.array(hdir.values)
    hd = np.array(hdir.derivative)
    alpha = params.alpha
    eps = params.eps_schedule
    kb = max(1, spectral.effective_bandwidth(d1, rtol=1e-10), spectral.effective_bandwidth(hd, rtol=1e-10))
    rule = quadrature.band_rule(eps, bandwidth(curve, hv))
    w = symmetric_nodes(rule)
    order = np.argsort(np.abs(w), kind="stable")
    vals = np.empty(w.size)
    block = max(1, 4096 // curve.n_samples)
    for start in range(0, w.size, block):
        idx = order[start:start + block]
        panels = max(1, int(np.ceil(np.abs(w[idx]).max() * kb * 1.0 / quad_nodes)))
        x, wt = _composite(quad_nodes, panels)
        vals[idx] = _kernel_values(g1, d1, hd, w[idx], alpha, x, wt)
    m = rule.w.size
    per_eps = rule.cumulative(quadrature.band_sums(rule, vals[:m] + vals[m:]))
    val, _ = quadrature.extrapolate(eps, per_eps, alpha, params.richardson_terms)
    return float(L ** (1.0 - alpha) * val)


def kernel_g(curve: SampledCurve, u: float, w: float, alpha: float, kp: KernelParams) -> np.ndarray:
    """g^(alpha,beta)_{s1,tau1,tau2}(u, w) = G^(beta)(dg/w) |T(u+tau1 w) - T(u+tau2 w)|^2 / |w|^alpha * T(u+s1 w)

    for the unit-speed rescaling gamma/L (T = gamma'/L).
    """
    if w == 0.0:
        raise ValueError("w must be nonzero")
    L = length(curve)
    g1 = np.array(curve.samples) / L
    d1 = np.array(curve.derivative) / L
    pts = spectral.evaluate(g1, np.array([u, u + w]))
    tang = spectral.evaluate(d1, np.array([u + kp.tau1 * w, u + kp.tau2 * w, u + kp.s1 * w]))
    z = (pts[1] - pts[0]) / w
    spread = float(((tang[0] - tang[1]) ** 2).sum())
    return G_beta(z, kp.beta) * spread / abs(w) ** alpha * tang[2]


# -- reports ---------------------------------------------------------------------------

def decompose(curve: SampledCurve, h, params: EnergyParams, with_kernel: bool = False,
              quad_nodes: int = 8) -> DecompositionReport:
    """dE, its leading part alpha L^-alpha Q and the remainder R for one direction."""
    rep = first_variation_arclength(curve, h, params)
    L = length(curve)
    hv = Direction.for_curve(curve, h).values
    aq = params.alpha * L ** -params.alpha * Q_form(curve, hv, params)
    R = R_form_direct(curve, hv, params)
    rk = R_form_kernel(curve, hv, params, quad_nodes) if with_kernel else None
    return DecompositionReport(rep.dE, float(aq), R, abs(rep.dE - (aq + R)), rk)


def lower_order_diagnostic(curve: SampledCurve, params: EnergyParams, K: int) -> LowerOrderTable:
    """rho_k = max over axes |R(gamma; e_k axis)| / (q_k k^(alpha+1)) for k = 2, 4, 8, ..., K.

    On a round circle R(gamma; e_k) vanishes for |k| != 1 by symmetry, so the
    table is informative only for non-circular curves.
    """
    params.for_gradient()
    _require_arclength(curve)
    if K < 2:
        raise ValueError("K must be at least 2")
    ks = []
    k = 2
    while k <= K:
        ks.append(k)
        k *= 2
    spectrum = q_coefficients(params, max(8, K))
    G = gradient_fields(curve, params.alpha, params.eps_schedule, part="remainder")
    exps = quadrature.cutoff_exponents(params.alpha, min(params.richardson_terms,
                                                        len(params.eps_schedule) - 1))
    g0 = quadrature.richardson(params.eps_schedule, G, exps)
    ghat = spectral.coefficients(g0)
    n = curve.n_samples
    rows = []
    for k in ks:
        # mean_u <g0, e_k axis> = conj of the k-th coefficient of that coordinate
        R = float(np.abs(ghat[k % n]).max())
        lead = spectrum.q[k] * k ** (params.alpha + 1.0)
        rows.append(LowerOrderRow(k, R, lead, R / lead))
    rho = [r.rho for r in rows]
    return LowerOrderTable(tuple(rows), bool(all(b < a for a, b in zip(rho, rho[1:]))))
