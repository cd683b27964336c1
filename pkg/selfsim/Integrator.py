#!/usr/bin/env python3
"""
Adaptive integration of the profile ODE in the rho chart and the exterior
log chart, built on scipy's embedded Runge-Kutta pairs with dense output.

Sign changes of w, u and u' are located after the run from the accepted
samples and the dense interpolant; only the |u| > u_max guard stops the
integrator early.
"""
# pylint: disable=invalid-name,too-many-arguments,too-many-locals
import sys
import math
from dataclasses import dataclass
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from .Errors import ChartError, RangeError, IntegrationError
from .Models import (Trajectory, Event, RHO_CHART, LOG_CHART, COMPLETED,
                     BLOWUP_GUARD, STEP_UNDERFLOW, W_SIGN, U_SIGN, DU_SIGN, GUARD)
from .OdeCore import make_rho_fun, make_log_fun, DELTA_MIN
from .RotatingLogger import RotatingLogger

_dataclass_kwargs = {'slots': True} if sys.version_info >= (3, 10) else {}

lg = RotatingLogger('selfsim')

TOL_RANGE = (1e-13, 1e-6)
_UNDERFLOW_MSG = 'less than spacing'


@dataclass(**_dataclass_kwargs)
class Guards:
    """ Stop/forbid thresholds for one integration """
    u_max: float = 1e8
    delta_min: float = DELTA_MIN


def _check_tol(tol):
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise RangeError(f'tol={tol:g} outside [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]')


def _check_rho_path(rho_a, rho_b, delta_min):
    # origin offsets shrink like c^-(p-1)/2, so only rho=1 carries the delta_min guard
    for rho in (rho_a, rho_b):
        if rho <= 0 or abs(rho - 1) < delta_min:
            raise ChartError(f'rho={rho!r} lies inside a singular guard ({delta_min:g})')
    if (rho_a - 1) * (rho_b - 1) < 0:
        raise ChartError(f'path {rho_a!r} -> {rho_b!r} crosses rho=1')


def _guard_event(u_max):
    def guard(_t, y):
        return abs(y[0]) - u_max
    guard.terminal = True
    guard.direction = 1
    return guard


def _value_functions(params, chart):
    """ Sign-tracked quantities as functions of (x, u, du) in the given chart """
    a, b_inf = params.alpha, params.b_inf
    funcs = {U_SIGN: lambda x, u, du: u, DU_SIGN: lambda x, u, du: du}
    if math.isfinite(b_inf):
        if chart == LOG_CHART:
            funcs[W_SIGN] = lambda x, u, du: np.exp(a * x) * u / b_inf - 1
        else:
            funcs[W_SIGN] = lambda x, u, du: x**a * u / b_inf - 1
    return funcs


def locate_events(params, traj):
    """ Events for every strict sign change between adjacent samples """
    if len(traj) < 2:
        return []
    events = []
    for kind, fn in _value_functions(params, traj.chart).items():
        vals = fn(traj.x, traj.u, traj.du)
        idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
        for i in idx:
            lo, hi = traj.x[i], traj.x[i + 1]
            loc = 0.5 * (lo + hi)
            if traj.dense is not None:
                def g(x, fn=fn):
                    y = traj.dense(x)
                    return fn(x, y[0], y[1])
                try:
                    loc = brentq(g, min(lo, hi), max(lo, hi), xtol=1e-15, rtol=4e-16)
                except ValueError:
                    pass    # interpolant disagrees with samples at roundoff level
            events.append(Event(kind=kind, location=float(loc),
                                value_before=float(vals[i]), value_after=float(vals[i + 1])))
    events.sort(key=lambda e: e.location if traj.x[-1] >= traj.x[0] else -e.location)
    return events


def _run(params, fun, chart, x0, y0, x1, tol, guards, method, first_step):
    sol = solve_ivp(fun, (x0, x1), y0, method=method, rtol=tol, atol=tol,
                    dense_output=True, events=[_guard_event(guards.u_max)],
                    first_step=first_step)
    status, status_at = COMPLETED, math.nan
    if sol.status == 1:
        status, status_at = BLOWUP_GUARD, float(sol.t[-1])
    elif sol.status == -1:
        if _UNDERFLOW_MSG not in sol.message:
            lg.err(f'integration failed in {chart} at x={sol.t[-1]!r}: {sol.message}')
            raise IntegrationError(sol.message)
        status, status_at = STEP_UNDERFLOW, float(sol.t[-1])
    traj = Trajectory(chart=chart, x=sol.t, u=sol.y[0], du=sol.y[1],
                      status=status, status_at=status_at, dense=sol.sol)
    if not np.all(np.isfinite(sol.y)):
        raise IntegrationError(f'non-finite samples in {chart} before x={sol.t[-1]!r}')
    traj.events = locate_events(params, traj)
    if status != COMPLETED:
        traj.events.append(Event(kind=GUARD, location=status_at,
                                 value_before=float(sol.y[0][-2]) if len(sol.t) > 1 else math.nan,
                                 value_after=float(sol.y[0][-1])))
        lg.put('GUARD', f'{chart} {status} at x={status_at!r} u={sol.y[0][-1]!r}')
    return traj


def integrate(params, seed, target_rho, tol=1e-10, guards=None, method='DOP853'):
    """
    Integrate from a rho-chart seed State to target_rho on the same side of
    rho=1, never entering the guards around 0 and 1.
    """
    guards = guards or Guards()
    _check_tol(tol)
    _check_rho_path(seed.rho, target_rho, guards.delta_min)
    span = abs(target_rho - seed.rho)
    near = min(seed.rho, abs(1 - seed.rho))
    first_step = max(min(0.1 * near, 0.5 * span), 1e-300)
    return _run(params, make_rho_fun(params), RHO_CHART, seed.rho,
                [seed.u, seed.du], target_rho, tol, guards, method, first_step)


def integrate_log(params, seed, target_s, tol=1e-10, guards=None, method='DOP853'):
    """ Integrate a LogState seed (s > 0) forward or backward to target_s > 0 """
    guards = guards or Guards()
    _check_tol(tol)
    if seed.s <= 0 or target_s <= 0:
        raise ChartError(f'log chart needs s > 0 (seed {seed.s!r}, target {target_s!r})')
    first_step = max(min(0.1 * seed.s, 0.5 * abs(target_s - seed.s)), 1e-300)
    return _run(params, make_log_fun(params), LOG_CHART, seed.s,
                [seed.z, seed.dz], target_s, tol, guards, method, first_step)


def estimate_blowup_radius(params, traj):
    """
    Fit u ~ K (rho_+ - rho)^-alpha over the last decade of |u|; returns
    (rho_plus, relative rms residual). |u|^(-1/alpha) is linear in rho there.
    """
    rho = traj.rho
    mag = np.abs(traj.u)
    keep = mag >= mag[-1] / 10
    if keep.sum() < 4:
        keep = np.zeros_like(mag, dtype=bool)
        keep[-min(6, len(mag)):] = True
    x, y = rho[keep], mag[keep]**(-1 / params.alpha)
    slope, icpt = np.polyfit(x, y, 1)
    if slope >= 0:
        return float(rho[-1]), math.inf
    rho_plus = max(-icpt / slope, float(rho[-1]))
    fit = slope * x + icpt
    resid = float(np.sqrt(np.mean((fit - y)**2)) / max(np.max(np.abs(y)), 1e-300))
    return float(rho_plus), resid
