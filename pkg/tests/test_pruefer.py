"""
Lifted angle, the floor-formula zero count and its agreement with direct
sign changes.
"""
# pylint: disable=invalid-name
import math
import numpy as np
import pytest
from selfsim.Errors import RangeError, RegimeError
from selfsim.Params import derive_params
from selfsim.Shooting import left_probe
from selfsim.Pruefer import (count_zeros, count_zeros_values, right_anchor, theta_at,
                             theta_rhs, theta_ode, left_trace)
from selfsim.Oracle import count_zeros_direct


def test_floor_formula():
    assert count_zeros_values(math.pi, 0.0) == 1
    assert count_zeros_values(math.pi, -math.pi) == 2
    assert count_zeros_values(0.4, 0.1) == 0
    assert count_zeros_values(math.pi, math.pi) == 0


def test_constant_has_one_zero(p37):
    probe = left_probe(p37, p37.b0)
    trace = probe.trace
    assert abs(trace.theta[0] - math.pi) < 0.1
    assert trace.zero_count == 1
    lo, hi = trace.span
    assert count_zeros(trace, lo, hi) == 1
    assert count_zeros(trace, lo, 0.7) == 0
    assert count_zeros(trace, 0.72, hi) == 0


def test_angle_never_increases_through_zeros(p37):
    trace = left_probe(p37, 50.0).trace
    crossings = np.floor(trace.theta / math.pi - 0.5)
    assert np.all(np.diff(crossings) <= 0)


def test_agreement_with_direct_count():
    rng = np.random.default_rng(7)
    cases = []
    for N, p in ((3, 7.0), (4, 4.0)):
        params = derive_params(N, p)
        for c in (0.5, 2.0, 10.0, 100.0, 1000.0):
            cases.append((params, left_probe(params, c)))
    for _ in range(100):
        params, probe = cases[int(rng.integers(len(cases)))]
        lo, hi = probe.trace.span
        r1, r2 = np.sort(rng.uniform(lo, hi, 2))
        assert count_zeros(probe.trace, r1, r2) == count_zeros_direct(params, probe.traj, r1, r2)


def test_zero_count_grows_with_c(p37):
    counts = [left_probe(p37, c).zero_count for c in (10.0, 100.0, 1000.0)]
    assert counts == sorted(counts)
    assert counts[-1] >= 2


@pytest.mark.slow
def test_zero_count_reaches_four(p37):
    counts = [left_probe(p37, c).zero_count for c in (10.0, 100.0, 1000.0, 1e4)]
    assert counts == sorted(counts)
    assert counts[-1] >= 4


def test_count_range_checks(p37):
    trace = left_probe(p37, 2.0).trace
    lo, hi = trace.span
    with pytest.raises(RangeError):
        count_zeros(trace, lo, hi + 0.5)
    with pytest.raises(RangeError):
        count_zeros(trace, 0.6, 0.5)
    assert count_zeros(trace, 0.0, 2.0, clamp=True) == trace.zero_count


def test_right_anchor(p37, p53):
    assert right_anchor(p37, 0.5 * p37.b_inf) == math.pi
    assert right_anchor(p37, 0.5 * (p37.b_inf + p37.b0)) == 0.0
    assert right_anchor(p53, -2.0) == 1.5 * math.pi
    assert right_anchor(p53, -1.0) == 0.5 * math.pi
    with pytest.raises(RegimeError):
        right_anchor(derive_params(5, 4), 1.0)


def test_theta_rhs_series_band_is_continuous(p37):
    for v in (1 - 2e-6, 1 - 5e-7, 1 + 5e-7, 1 + 2e-6):
        near = theta_rhs(p37, 0.5, 0.3, v)
        ref = theta_rhs(p37, 0.5, 0.3, 1 - 1e-3 * (1 - v) / abs(1 - v))
        assert near == pytest.approx(ref, rel=1e-2)
    assert theta_rhs(p37, 0.5, 0.3, 1 - 5e-7) == pytest.approx(
        theta_rhs(p37, 0.5, 0.3, 1 - 2e-6), rel=1e-5)


def test_theta_ode_follows_lift(p37):
    probe = left_probe(p37, 2.0)
    trace = left_trace(p37, probe.traj)
    sol = theta_ode(p37, probe.traj, 0.2, 0.8, theta_at(trace, 0.2), 1e-11)
    assert float(sol(0.8)[0]) == pytest.approx(theta_at(trace, 0.8), abs=1e-6)
