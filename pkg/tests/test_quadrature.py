import numpy as np
import pytest

from ohara import quadrature as q


def test_band_rule_integrates_power_per_band():
    sched = (0.125, 0.0625, 0.03125)
    rule = q.band_rule(sched, bandwidth=8)
    vals = rule.w ** -1.5
    got = rule.cumulative(q.band_sums(rule, vals))
    exact = [(e ** -0.5 - 0.5 ** -0.5) * 2 for e in sched]
    np.testing.assert_allclose(got, exact, rtol=1e-12)


def test_panels_respect_bandwidth():
    rule = q.band_rule((0.25, 0.125), bandwidth=64)
    assert np.all(np.diff(np.sort(rule.w)) < 0.5 / 64)


def test_richardson_recovers_model_exactly():
    alpha = 2.5
    eps = np.array([2.0 ** -m for m in range(3, 10)])
    p = q.cutoff_exponents(alpha, 3)
    vals = 7.0 + 2 * eps ** p[0] - 3 * eps ** p[1] + 0.5 * eps ** p[2]
    assert abs(q.richardson(eps, vals, p) - 7.0) < 1e-11
    best, err = q.extrapolate(eps, vals, alpha)
    assert abs(best - 7.0) < 1e-11 and err > 0


def test_check_tail_raises_on_growing_gaps():
    with pytest.raises(q.ConvergenceError, match="eps=0.25"):
        q.check_tail([1.0, 0.5, 0.25], [0.0, 1.0, 3.0])
    q.check_tail([1.0, 0.5, 0.25], [0.0, 1.0, 1.5])
    q.check_tail([1.0, 0.5, 0.25], [0.0, 1e-17, 3e-17], floor=1e-15)


def test_bad_schedules():
    with pytest.raises(ValueError):
        q.band_rule((0.1, 0.1))
    with pytest.raises(ValueError):
        q.band_rule((0.6,))
