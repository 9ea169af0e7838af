"""Near-diagonal quadrature in the offset variable w and cutoff extrapolation.

Integrals over U_eps = R/Z x ([-1/2, -eps] u [eps, 1/2]) are split into bands
delimited by the cutoff schedule.  Each band is covered by Gauss-Legendre
panels; the panels never straddle a cutoff, so the truncated integral for
every cutoff in the schedule is a partial sum of band totals.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

GL_NODES = 16


class ConvergenceError(RuntimeError):
    """The cutoff sequence does not settle toward its limit."""


DEFAULT_SCHEDULE = tuple(2.0 ** -m for m in range(3, 10))


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, wt = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * wt


@dataclass(frozen=True)
class BandRule:
    """Positive offsets ``w`` with weights, tagged by band.

    Band 0 is [eps_max, upper]; band i >= 1 is [eps_i, eps_{i-1}] for the
    decreasing schedule eps_0 > eps_1 > ...  Mirror nodes -w carry the same
    weights; callers evaluate both signs.
    """

    eps: np.ndarray
    w: np.ndarray
    weight: np.ndarray
    band: np.ndarray

    @property
    def n_bands(self) -> int:
        return len(self.eps)

    def cumulative(self, band_totals: np.ndarray) -> np.ndarray:
        """Truncated integral at each cutoff from per-band totals (axis 0)."""
        return np.cumsum(band_totals, axis=0)


def _split(a: float, b: float, max_width: float) -> list[tuple[float, float]]:
    pieces = [(a, b)]
    # geometric splitting first: keep panel ratio <= 2 so the 1/w^alpha
    # behaviour near the lower end is resolved
    out = []
    for lo, hi in pieces:
        while hi > 2.0 * lo:
            out.append((hi / 2.0, hi))
            hi = hi / 2.0
        out.append((lo, hi))
    final = []
    for lo, hi in out:
        m = max(1, int(np.ceil((hi - lo) / max_width)))
        edges = np.linspace(lo, hi, m + 1)
        final.extend(zip(edges[:-1], edges[1:]))
    return sorted(final)


def band_rule(schedule, bandwidth: int = 0, upper: float = 0.5,
              nodes: int = GL_NODES) -> BandRule:
    """Panels for a decreasing cutoff schedule up to ``upper``.

    ``bandwidth`` is the highest significant Fourier mode of the integrand
    data; panels are narrowed so each spans at most half an oscillation.
    """
    eps = np.asarray(sorted(schedule, reverse=True), dtype=float)
    if eps.size == 0 or np.any(eps <= 0.0) or eps[0] >= upper:
        raise ValueError("cutoffs must lie in (0, upper)")
    if np.any(np.diff(eps) >= 0.0):
        raise ValueError("cutoff schedule must be strictly decreasing")
    max_width = 0.5 / max(bandwidth, 1)
    x, wt = gauss_legendre(nodes)
    bounds = [(eps[0], upper)] + [(eps[i], eps[i - 1]) for i in range(1, eps.size)]
    ws, wts, tags = [], [], []
    for tag, (lo, hi) in enumerate(bounds):
        for a, b in _split(lo, hi, max_width):
            ws.append(a + (b - a) * x)
            wts.append((b - a) * wt)
            tags.append(np.full(nodes, tag))
    return BandRule(eps, np.concatenate(ws), np.concatenate(wts), np.concatenate(tags))


def band_sums(rule: BandRule, values: np.ndarray) -> np.ndarray:
    """Weighted per-band sums of node values (node axis first)."""
    weighted = values * rule.weight.reshape((-1,) + (1,) * (values.ndim - 1))
    out = np.zeros((rule.n_bands,) + values.shape[1:], dtype=values.dtype)
    np.add.at(out, rule.band, weighted)
    return out


def cutoff_exponents(alpha: float, terms: int) -> np.ndarray:
    """Exponents of the near-diagonal remainder: eps^(2j+1-alpha), j = 1..terms."""
    return np.array([2 * j + 1 - alpha for j in range(1, terms + 1)])


def richardson(eps, values, exponents) -> float:
    """Limit as eps -> 0 of values fitted by a + sum_j c_j eps^p_j.

    Uses exactly len(exponents) + 1 points (the trailing ones).
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values)
    m = len(exponents) + 1
    if eps.size < m:
        raise ValueError(f"need {m} cutoffs for {len(exponents)} correction terms")
    e = eps[-m:]
    v = values[-m:]
    scale = e[0]
    mat = np.column_stack([np.ones(m)] + [(e / scale) ** p for p in exponents])
    sol = np.linalg.solve(mat, v.reshape(m, -1))
    return sol[0].reshape(v.shape[1:]) if v.ndim > 1 else sol[0, 0]


def check_tail(eps, values, floor: float = 0.0, label: str = "") -> None:
    """Require the last successive gap not to exceed the one before it.

    Gaps below ``floor`` count as converged (rounding level).
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return
    g1, g2 = abs(v[-2] - v[-3]), abs(v[-1] - v[-2])
    if g2 > g1 and g2 > floor:
        where = f" for {label}" if label else ""
        raise ConvergenceError(
            f"cutoff sequence not contracting at eps={float(eps[-1]):.6g}{where}: "
            f"gaps {g1:.3e} then {g2:.3e}")


def extrapolate(eps, values, alpha: float, terms: int = 3) -> tuple[float, float]:
    """Extrapolated limit and an error estimate from dropping one term."""
    terms = min(terms, len(eps) - 1)
    best = richardson(eps, values, cutoff_exponents(alpha, terms))
    if terms >= 2:
        prev = richardson(eps, values, cutoff_exponents(alpha, terms - 1))
    else:
        prev = values[-1]
    return best, np.abs(best - prev)
