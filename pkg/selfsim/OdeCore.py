#!/usr/bin/env python3
"""
Right-hand sides of the similarity-profile ODE

    (1-rho^2) u'' + ((N-1)/rho - 2(alpha+1) rho) u' - alpha(alpha+1) u + |u|^(p-1) u = 0

in the rho chart and in the exterior log chart s = log(rho), plus the
transformed variables v = u/u_inf, w = v-1 and the Lyapunov functionals.

The validated functions (rhs_rho, rhs_log, ...) take Models.State/LogState;
the make_*_fun() factories return float-only closures for scipy's solve_ivp.
"""
# pylint: disable=invalid-name
import math
import numpy as np
from .Errors import SingularityError
from .Models import State, LogState, Diagnostics

DELTA_MIN = 1e-8


def power_signed(u, p):
    """ sign(u)|u|^p with u=0 -> 0; works on floats and arrays """
    if np.ndim(u) == 0:
        return math.copysign(abs(u)**p, u) if u else 0.0
    return np.sign(u) * np.abs(u)**p


def source(params, u):
    """ g(u) = alpha(alpha+1) u - |u|^(p-1) u, the zeroth-order term moved right """
    return u * (params.b0_pm1 - np.abs(u)**(params.p - 1))


def residual(params, rho, u, du, ddu):
    """ Left-hand side of the profile ODE at rho """
    a = params.alpha
    return ((1 - rho * rho) * ddu
            + ((params.N - 1) / rho - 2 * (a + 1) * rho) * du
            - a * (a + 1) * u + power_signed(u, params.p))


def rhs_rho(params, state, delta_min=DELTA_MIN):
    """ (u', u'') at state; refuses rho inside the guards around 0 and 1 """
    rho, u, du = state.rho, state.u, state.du
    if abs(rho) < delta_min or abs(rho - 1) < delta_min:
        raise SingularityError(f'rho={rho!r} inside singular guard {delta_min:g}')
    a = params.alpha
    ddu = (a * (a + 1) * u - power_signed(u, params.p)
           - ((params.N - 1) / rho - 2 * (a + 1) * rho) * du) / (1 - rho * rho)
    return du, ddu


def rhs_log(params, lstate):
    """ (z', z'') in the exterior chart s = log(rho) > 0 """
    s, z, dz = lstate.s, lstate.z, lstate.dz
    if s <= 0:
        raise SingularityError(f's={s!r} must be > 0 in the log chart')
    e2 = math.exp(-2 * s)
    ddz = (((params.N - 2) * e2 - (2 * params.alpha + 1)) * dz
           + (abs(z)**(params.p - 1) - params.b0_pm1) * z) / (1 - e2)
    return dz, ddz


def make_rho_fun(params):
    """ Float-only u-chart rhs for solve_ivp, y = [u, u'] """
    a1, p, Nm1 = 2 * (params.alpha + 1), params.p, params.N - 1
    b0pm1 = params.b0_pm1

    def fun(rho, y):
        u, du = y[0], y[1]
        ddu = (u * (b0pm1 - abs(u)**(p - 1)) - (Nm1 / rho - a1 * rho) * du) / (1 - rho * rho)
        return [du, ddu]
    return fun


def make_log_fun(params):
    """ Float-only log-chart rhs for solve_ivp, y = [z, z'] """
    Nm2, c1, p = params.N - 2, 2 * params.alpha + 1, params.p
    b0pm1 = params.b0_pm1

    def fun(s, y):
        z, dz = y[0], y[1]
        e2 = math.exp(-2 * s)
        ddz = ((Nm2 * e2 - c1) * dz + (abs(z)**(p - 1) - b0pm1) * z) / (1 - e2)
        return [dz, ddz]
    return fun


def to_log(state):
    """ rho-chart state -> log-chart state """
    return LogState(s=math.log(state.rho), z=state.u, dz=state.rho * state.du)


def to_rho(lstate):
    """ log-chart state -> rho-chart state """
    rho = math.exp(lstate.s)
    return State(rho=rho, u=lstate.z, du=lstate.dz / rho)


def v_and_dv(params, rho, u, du):
    """ v = rho^alpha u / b_inf and v' (arrays welcome) """
    a = params.alpha
    ra = rho**a / params.b_inf
    return ra * u, ra * (du + a * u / rho)


def w_and_rho_dw(params, rho, u, du):
    """ w = v-1 and rho w' = rho^alpha (rho u' + alpha u) / b_inf """
    a = params.alpha
    ra = rho**a / params.b_inf
    return ra * u - 1, ra * (rho * du + a * u)


def lyapunov_H(params, state):
    """ H = (1-rho^2) u'^2/2 + |u|^(p+1)/(p+1) - (p+1)/(p-1)^2 u^2 """
    rho, u, du = state.rho, state.u, state.du
    p = params.p
    return ((1 - rho * rho) * du * du / 2 + np.abs(u)**(p + 1) / (p + 1)
            - (p + 1) / (p - 1)**2 * u * u)


def lyapunov_Hv(params, state):
    """ H_v = rho^2 (1-rho^2) v'^2/2 - alpha(N-2-alpha) (v^2/2 - |v|^(p+1)/(p+1)) """
    rho = state.rho
    v, dv = v_and_dv(params, rho, state.u, state.du)
    p = params.p
    return (rho * rho * (1 - rho * rho) * dv * dv / 2
            - params.k_inf * (v * v / 2 - np.abs(v)**(p + 1) / (p + 1)))


def diagnostics(params, state):
    """ H, H_v, v, w at a state (H_v is reported for rho <= 1 only) """
    v, _ = v_and_dv(params, state.rho, state.u, state.du)
    Hv = lyapunov_Hv(params, state) if state.rho <= 1 else math.nan
    return Diagnostics(H=lyapunov_H(params, state), Hv=Hv, v=v, w=v - 1)


def diagnostic_columns(params, rho, u, du):
    """ Vectorized H, H_v, v, w over sample arrays; H_v is NaN beyond rho=1 """
    rho, u, du = (np.asarray(x, dtype=float) for x in (rho, u, du))
    st = State(rho=rho, u=u, du=du)
    v, _ = v_and_dv(params, rho, u, du)
    Hv = np.where(rho <= 1, lyapunov_Hv(params, st), np.nan)
    return {'H': lyapunov_H(params, st), 'Hv': Hv, 'v': v, 'w': v - 1}
