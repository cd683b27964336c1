#!/usr/bin/env python3
"""
Polar (Pruefer) coordinates of w = v-1 against the singular solution:

    w = R cos(Theta),   rho w' = R sin(Theta)

Theta is lifted continuously along a trajectory. Each crossing of
pi/2 + k*pi (always downward) is one zero of w, i.e. one intersection of the
profile with u_inf.
"""
# pylint: disable=invalid-name,too-many-locals
import math
import numpy as np
from scipy.integrate import solve_ivp
from .Errors import LiftingError, RangeError, RegimeError
from .Models import PrueferTrace
from .OdeCore import w_and_rho_dw
from .Params import Regime

R_MIN = 1e-300
SERIES_BAND = 1e-6
MAX_REFINE = 40

LEFT = 'left'
RIGHT = 'right'


def _angles(params, traj, rho):
    u, du = traj.rho_at(rho)
    w, rdw = w_and_rho_dw(params, rho, u, du)
    return np.arctan2(rdw, w), np.hypot(w, rdw)


def _wrap(d):
    return (d + math.pi) % (2 * math.pi) - math.pi


def _refined_grid(params, traj):
    """ Increasing rho grid on which adjacent raw angles differ by < pi/2 """
    rho = np.sort(np.asarray(traj.rho, dtype=float))
    rho = rho[np.concatenate(([True], np.diff(rho) > 0))]
    if traj.dense is None:
        raise LiftingError('trajectory has no dense output to refine the angle on')
    for _ in range(MAX_REFINE):
        ang, _ = _angles(params, traj, rho)
        bad = np.nonzero(np.abs(_wrap(np.diff(ang))) >= math.pi / 2)[0]
        if not len(bad):
            return rho
        mids = 0.5 * (rho[bad] + rho[bad + 1])
        rho = np.sort(np.concatenate((rho, mids)))
    raise LiftingError('angle increments stay >= pi/2 after refinement')


def theta_trace(params, traj, init):
    """
    Lifted Theta along traj. init is {'angle': target, 'at': rho}: the whole
    lift is shifted by a multiple of 2 pi so that Theta(at) is the branch
    nearest to target.
    """
    rho = _refined_grid(params, traj)
    at = float(init['at'])
    if not rho[0] - 1e-12 <= at <= rho[-1] + 1e-12:
        raise RangeError(f'anchor rho={at!r} outside trace span [{rho[0]!r}, {rho[-1]!r}]')
    raw, R = _angles(params, traj, rho)
    if np.any(R < R_MIN):
        raise LiftingError('R vanished: trajectory coincides with u_inf')
    theta = np.unwrap(raw)
    at_val = float(np.interp(at, rho, theta))
    shift = 2 * math.pi * round((float(init['angle']) - at_val) / (2 * math.pi))
    theta = theta + shift

    def angle_fn(r):
        r = np.asarray(r, dtype=float)
        a, _ = _angles(params, traj, r)
        guess = np.interp(r, rho, theta)
        return a + 2 * math.pi * np.round((guess - a) / (2 * math.pi))

    zeros = count_zeros_values(theta[0], theta[-1])
    return PrueferTrace(rho=rho, theta=theta, R=R, zero_count=zeros,
                        branch_origin=float(init['angle']), angle_fn=angle_fn)


def left_trace(params, traj):
    """ Left family: Theta = pi at the first sample (w -> -1 at the origin) """
    return theta_trace(params, traj, {'angle': math.pi, 'at': float(np.min(traj.rho))})


def right_anchor(params, right_param):
    """ Branch target for the right family at rho -> 1 """
    if params.regime == Regime.SUBCRITICAL:
        return math.pi if right_param < params.b_inf else 0.0
    if params.regime == Regime.CRITICAL:
        return 1.5 * math.pi if right_param < -params.alpha * params.b0 else 0.5 * math.pi
    raise RegimeError(f'no right family for regime {params.regime.value}')


def right_trace(params, traj, right_param):
    """ Right family anchored at the sample nearest rho=1 """
    return theta_trace(params, traj, {'angle': right_anchor(params, right_param),
                                      'at': float(np.max(traj.rho))})


def count_zeros_values(theta1, theta2):
    """ floor(Theta1/pi - 1/2) - floor(Theta2/pi - 1/2) """
    return int(math.floor(theta1 / math.pi - 0.5) - math.floor(theta2 / math.pi - 0.5))


def theta_at(trace, rho):
    """ Theta at rho, from the dense angle when available """
    if trace.angle_fn is not None:
        return float(trace.angle_fn(rho))
    return float(np.interp(rho, trace.rho, trace.theta))


def count_zeros(trace, rho1, rho2, clamp=False):
    """ Zeros of w on [rho1, rho2) from the lifted angle """
    lo, hi = trace.span
    if clamp:
        rho1, rho2 = min(max(rho1, lo), hi), min(max(rho2, lo), hi)
    slack = 1e-12 * max(1.0, hi)
    if not (lo - slack <= rho1 <= rho2 <= hi + slack):
        raise RangeError(f'[{rho1!r}, {rho2!r}) not inside trace span [{lo!r}, {hi!r}]')
    return count_zeros_values(theta_at(trace, rho1), theta_at(trace, rho2))


def theta_rhs(params, rho, theta, v):
    """ Theta' = -(1/rho)[sin^2 + B sin cos + C cos^2] along a solution with value v """
    one_m = 1 - rho * rho
    B = (params.N - 2 - 2 * params.alpha - rho * rho) / one_m
    p = params.p
    x = 1 - v
    if abs(x) < SERIES_BAND:
        ratio = (p - 1) - x * (p - 1) * p / 2
    else:
        ratio = v * (1 - abs(v)**(p - 1)) / x
    C = params.k_inf * ratio / one_m
    s, c = math.sin(theta), math.cos(theta)
    return -(s * s + B * s * c + C * c * c) / rho


def theta_ode(params, traj, rho1, rho2, theta1, tol=1e-10):
    """ Integrate theta_rhs from (rho1, theta1) to rho2 with v from traj """
    a, b_inf = params.alpha, params.b_inf

    def fun(rho, y):
        u, _ = traj.rho_at(rho)
        return [theta_rhs(params, rho, y[0], rho**a * float(u) / b_inf)]
    sol = solve_ivp(fun, (rho1, rho2), [theta1], method='DOP853', rtol=tol, atol=tol,
                    dense_output=True)
    if sol.status != 0:
        raise LiftingError(f'theta ODE failed: {sol.message}')
    return sol.sol
