#!/usr/bin/env python3
"""
Brute-force reference computations for the test suite: a fixed-step RK4
march verified by step halving, and zero counting by direct sign changes.
Nothing in the solve path calls into this module.
"""
# pylint: disable=invalid-name
import math
import numpy as np
from scipy.optimize import bisect
from .Errors import ChartError, RangeError, IntegrationError
from .Models import State, OracleResult
from .OdeCore import make_rho_fun, w_and_rho_dw, DELTA_MIN

H_MAX = 1e-4
REFINE = 10


def _rk4(fun, x0, y0, x1, h, u_max):
    n = max(1, int(math.ceil(abs(x1 - x0) / h - 1e-9)))
    step = (x1 - x0) / n
    y = np.array(y0, dtype=float)
    x = x0
    for i in range(n):
        k1 = np.asarray(fun(x, y))
        k2 = np.asarray(fun(x + step / 2, y + step / 2 * k1))
        k3 = np.asarray(fun(x + step / 2, y + step / 2 * k2))
        k4 = np.asarray(fun(x + step, y + step * k3))
        y = y + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        x = x0 + (i + 1) * step
        if not abs(y[0]) <= u_max:
            raise IntegrationError(f'oracle overflow |u|>{u_max:g} at rho={x!r}')
    return y


def reference_integrate(params, seed, target, h=H_MAX, u_max=1e8):
    """ RK4 at h and h/2 from seed to target; error estimate |y_h - y_h/2|/15 """
    if not 0 < h <= H_MAX:
        raise RangeError(f'oracle step must lie in (0, {H_MAX:g}], got {h!r}')
    for rho in (seed.rho, target):
        if rho < DELTA_MIN or abs(rho - 1) < DELTA_MIN:
            raise ChartError(f'rho={rho!r} inside a singular guard')
    if (seed.rho - 1) * (target - 1) < 0:
        raise ChartError('oracle path crosses rho=1')
    fun = make_rho_fun(params)
    y0 = [seed.u, seed.du]
    coarse = _rk4(fun, seed.rho, y0, target, h, u_max)
    fine = _rk4(fun, seed.rho, y0, target, h / 2, u_max)
    err = float(np.max(np.abs(coarse - fine)) / 15)
    return OracleResult(value=State(rho=float(target), u=float(fine[0]), du=float(fine[1])),
                        error_estimate=err)


def _w_at(params, traj, rho):
    u, du = traj.rho_at(rho)
    return w_and_rho_dw(params, rho, u, du)[0]


def zeros_direct(params, traj, rho1, rho2):
    """ Locations of strict sign changes of w on [rho1, rho2], each to width 1e-12 """
    lo, hi = float(np.min(traj.rho)), float(np.max(traj.rho))
    if not lo - 1e-12 <= rho1 <= rho2 <= hi + 1e-12:
        raise RangeError(f'[{rho1!r}, {rho2!r}] outside trajectory span [{lo!r}, {hi!r}]')
    rho1, rho2 = max(rho1, lo), min(rho2, hi)
    knots = np.unique(np.concatenate(([rho1, rho2], traj.rho[(traj.rho > rho1) & (traj.rho < rho2)])))
    grid = np.unique(np.concatenate([np.linspace(a, b, REFINE + 1)
                                     for a, b in zip(knots[:-1], knots[1:])] or [knots]))
    w = np.asarray(_w_at(params, traj, grid), dtype=float)
    nz = np.nonzero(w)[0]
    roots = []
    for i, j in zip(nz[:-1], nz[1:]):
        if w[i] * w[j] < 0:
            a, b = grid[i], grid[j]
            try:
                roots.append(bisect(lambda r: float(_w_at(params, traj, r)), a, b, xtol=1e-12))
            except ValueError:
                roots.append(0.5 * (a + b))
    return roots


def count_zeros_direct(params, traj, rho1, rho2):
    """ Number of strict sign changes of w on [rho1, rho2] """
    return len(zeros_direct(params, traj, rho1, rho2))
