"""
Adaptive integration against closed forms, the oracle and the guards.
"""
# pylint: disable=invalid-name
import math
import numpy as np
import pytest
from selfsim.Errors import ChartError, RangeError
from selfsim.Models import (LogState, RHO_CHART, LOG_CHART, COMPLETED, BLOWUP_GUARD,
                            W_SIGN, GUARD)
from selfsim.Params import cubic_closed_form
from selfsim.OdeCore import to_log, w_and_rho_dw
from selfsim.BoundarySeries import init_at_origin, right_seed, TOWARD_INFINITY
from selfsim.Integrator import integrate, integrate_log, estimate_blowup_radius, Guards
from selfsim.Oracle import reference_integrate


def test_closed_form_reproduced(p53):
    c = cubic_closed_form(p53, 0.0)[0]
    seed = init_at_origin(p53, c, 1e-4)
    traj = integrate(p53, seed, 0.99, 1e-11)
    assert traj.status == COMPLETED
    assert traj.chart == RHO_CHART
    keep = traj.rho >= 0.01
    exact = cubic_closed_form(p53, traj.rho[keep])[0]
    assert np.max(np.abs(traj.u[keep] - exact)) < 1e-8


def test_closed_form_with_rk45(p53):
    c = cubic_closed_form(p53, 0.0)[0]
    traj = integrate(p53, init_at_origin(p53, c, 1e-4), 0.99, 1e-10, method='RK45')
    assert traj.status == COMPLETED
    keep = traj.rho >= 0.01
    exact = cubic_closed_form(p53, traj.rho[keep])[0]
    assert np.max(np.abs(traj.u[keep] - exact)) < 1e-7


def test_exterior_closed_form_in_log_chart(p53):
    seed = to_log(right_seed(p53, -3 * math.sqrt(2) / 2, 1e-5, TOWARD_INFINITY))
    traj = integrate_log(p53, seed, math.log(5.0), 1e-11)
    assert traj.chart == LOG_CHART
    exact = cubic_closed_form(p53, traj.rho)[0]
    assert np.max(np.abs(traj.u - exact)) < 1e-8


def test_constant_solution_stays_put(p37):
    seed = init_at_origin(p37, p37.b0, 1e-4)
    traj = integrate(p37, seed, 0.999, 1e-10)
    assert np.max(np.abs(traj.u - p37.b0)) < 1e-10


def test_charts_agree_past_one(p37):
    b = 0.9 * p37.b_inf
    st = right_seed(p37, b, 1e-5, TOWARD_INFINITY)
    rho_traj = integrate(p37, st, 3.0, 1e-11)
    log_traj = integrate_log(p37, to_log(st), math.log(3.0), 1e-11)
    assert rho_traj.u[-1] == pytest.approx(log_traj.u[-1], abs=1e-8)
    assert rho_traj.du[-1] == pytest.approx(log_traj.du_rho[-1], abs=1e-8)


def test_agrees_with_oracle(p37):
    seed = init_at_origin(p37, 2.0, 1e-3)
    mid = integrate(p37, seed, 0.1, 1e-12).states()[-1]
    ref = reference_integrate(p37, mid, 0.4)
    traj = integrate(p37, mid, 0.4, 1e-12)
    assert ref.error_estimate < 1e-12
    assert traj.u[-1] == pytest.approx(ref.value.u, abs=1e-9)
    assert traj.du[-1] == pytest.approx(ref.value.du, abs=1e-9)


@pytest.mark.slow
def test_agrees_with_oracle_on_random_seeds(p37, p53):
    rng = np.random.default_rng(7)
    for k in range(50):
        params, c = (p37, rng.uniform(0.2, 2.0)) if k % 2 else (p53, rng.uniform(0.5, 6.0))
        start = float(rng.uniform(0.1, 0.5))
        mid = integrate(params, init_at_origin(params, c, 1e-3), start, 1e-12).states()[-1]
        ref = reference_integrate(params, mid, start + 0.1)
        traj = integrate(params, mid, start + 0.1, 1e-12)
        scale = 1e-9 * max(1.0, abs(ref.value.u))
        assert traj.u[-1] == pytest.approx(ref.value.u, abs=scale), (params.tag(), c, start)
        assert traj.du[-1] == pytest.approx(ref.value.du, abs=scale), (params.tag(), c, start)


def test_w_events_are_zeros(p37):
    traj = integrate(p37, init_at_origin(p37, 10.0, 1e-4), 0.99, 1e-10)
    w_events = [e for e in traj.events if e.kind == W_SIGN]
    assert w_events
    for ev in w_events:
        u, du = traj.rho_at(ev.location)
        w, _ = w_and_rho_dw(p37, ev.location, u, du)
        assert abs(w) < 1e-8
        assert ev.value_before * ev.value_after < 0
    locs = [e.location for e in traj.events]
    assert locs == sorted(locs)


def test_blowup_guard(p37):
    seed = to_log(right_seed(p37, 1.2 * p37.b0, 1e-5, TOWARD_INFINITY))
    traj = integrate_log(p37, seed, 25.0, 1e-10, Guards(u_max=1e4))
    assert traj.status == BLOWUP_GUARD
    assert traj.events[-1].kind == GUARD
    assert abs(traj.u[-1]) == pytest.approx(1e4, rel=1e-6)
    rho_plus, resid = estimate_blowup_radius(p37, traj)
    assert rho_plus >= traj.rho[-1]
    assert math.isfinite(resid)


def test_guards_and_ranges(p37):
    seed = init_at_origin(p37, 1.0, 1e-3)
    with pytest.raises(RangeError):
        integrate(p37, seed, 0.5, 1e-3)
    with pytest.raises(ChartError):
        integrate(p37, seed, 1.5)
    with pytest.raises(ChartError):
        integrate(p37, seed, 1 - 1e-9)
    with pytest.raises(ChartError):
        integrate_log(p37, LogState(0.0, 1.0, 0.0), 2.0)
    with pytest.raises(ChartError):
        integrate_log(p37, LogState(1.0, 1.0, 0.0), -1.0)
