#!/usr/bin/env python3
"""
The rescaled limit of the left family for large c: the radial solution Q of

    Q'' + (N-1)/r Q' + |Q|^(p-1) Q = 0,   Q(0)=1, Q'(0)=0

with V = r^alpha Q / b_inf and the decreasing energy
E = r^2 V'^2/2 - alpha(N-2-alpha)(V^2/2 - |V|^(p+1)/(p+1)).
"""
# pylint: disable=invalid-name,too-many-arguments,too-many-locals
import numpy as np
from scipy.integrate import solve_ivp
from .Errors import RangeError, RegimeError, IntegrationError
from .Models import GroundStateTrace, SolverOptions, COMPLETED
from .OdeCore import power_signed
from .BoundarySeries import init_at_origin
from .Integrator import integrate, Guards
from .RotatingLogger import RotatingLogger

lg = RotatingLogger('selfsim')

R_MAX_RANGE = (10.0, 1e5)
M_RANGE = (1.0, 50.0)
R_SEED = 1e-4
SAMPLES = 2000


def taylor_Q(params, r):
    """ Q, Q' from Q = 1 - r^2/(2N) + p r^4/(8N(N+2)) """
    N, p = params.N, params.p
    Q = 1 - r * r / (2 * N) + p * r**4 / (8 * N * (N + 2))
    dQ = -r / N + p * r**3 / (2 * N * (N + 2))
    return Q, dQ


def energy_limit(params):
    """ E at V=1, V'=0: -alpha(N-2-alpha)(1/2 - 1/(p+1)) """
    return -params.k_inf * (0.5 - 1 / (params.p + 1))


def frame_and_energy(params, r, Q, dQ):
    """ V, rV', E on sample arrays """
    a, p = params.alpha, params.p
    ra = r**a / params.b_inf
    V = ra * Q
    rdV = ra * (r * dQ + a * Q)
    E = 0.5 * rdV**2 - params.k_inf * (V * V / 2 - np.abs(V)**(p + 1) / (p + 1))
    return V, rdV, E


def solve_Q(params, r_max=1e4, tol=1e-10, samples=SAMPLES):
    """ Q on a log mesh from R_SEED to r_max, with V and E """
    if not R_MAX_RANGE[0] <= r_max <= R_MAX_RANGE[1]:
        raise RangeError(f'r_max={r_max!r} outside [{R_MAX_RANGE[0]:g}, {R_MAX_RANGE[1]:g}]')
    if not params.k_inf > 0:
        raise RegimeError(f'{params.tag()}: ground-state frame needs p > 1+4/(N-2)')
    Nm1, p = params.N - 1, params.p

    def fun(r, y):
        return [y[1], -Nm1 / r * y[1] - power_signed(y[0], p)]

    Q0, dQ0 = taylor_Q(params, R_SEED)
    r_eval = np.geomspace(R_SEED, r_max, samples)
    sol = solve_ivp(fun, (R_SEED, r_max), [Q0, dQ0], method='DOP853', rtol=tol, atol=tol * 1e-2,
                    t_eval=r_eval, dense_output=True)
    if sol.status != 0:
        lg.err(f'{params.tag()} ground state failed: {sol.message}')
        raise IntegrationError(sol.message)
    r, Q, dQ = sol.t, sol.y[0], sol.y[1]
    V, _, E = frame_and_energy(params, r, Q, dQ)
    return GroundStateTrace(r=r, Q=Q, dQ=dQ, V=V, E=E, r_max=float(r_max), dense=sol.sol)


def limit_report(params, gs):
    """ End-of-mesh values against their r -> infinity limits """
    V, rdV, E = frame_and_energy(params, gs.r[-1:], gs.Q[-1:], gs.dQ[-1:])
    e_lim = energy_limit(params)
    return {'r_max': gs.r_max, 'V': float(V[0]), 'rdV': float(rdV[0]),
            'E': float(E[0]), 'E_limit': e_lim, 'E_gap': float(E[0] - e_lim),
            'V_min': float(np.min(gs.V[1:])),
            'E_max_rise': float(max(0.0, np.max(np.diff(gs.E))))}


def rescaling_check(params, c, M=5.0, tol=1e-12, opts=None, gs=None, points=400):
    """
    sup over r in [r_lo, M] of |u~ - Q| + |u~' - Q'| with
    u~(r) = u(c^-(p-1)/2 r, c)/c; r_lo is the rescaled origin offset.
    """
    opts = opts or SolverOptions()
    if c < 10:
        raise RangeError(f'rescaling check needs c >= 10, got {c!r}')
    if not M_RANGE[0] <= M <= M_RANGE[1]:
        raise RangeError(f'M={M!r} outside [{M_RANGE[0]:g}, {M_RANGE[1]:g}]')
    scale = c**(-(params.p - 1) / 2)
    rho_M = M * scale
    if rho_M >= 1 - opts.delta1:
        raise RangeError(f'M c^-(p-1)/2 = {rho_M!r} reaches rho=1')
    if gs is None or gs.r_max < M:
        gs = solve_Q(params, max(R_MAX_RANGE[0], M), tol)

    delta = min(opts.delta0, opts.origin_trust * scale, 0.5 * rho_M)
    seed = init_at_origin(params, c, delta)
    traj = integrate(params, seed, rho_M, tol, Guards(u_max=opts.u_max, delta_min=opts.delta_min),
                     opts.method)
    if traj.status != COMPLETED:
        raise IntegrationError(f'left family c={c!r} stopped at {traj.status_at!r}')
    r = np.geomspace(max(delta / scale, gs.r[0]), M, points)
    u, du = traj.dense(r * scale)
    ut, dut = u / c, du * scale / c
    Q, dQ = gs.dense(r)
    dev = float(np.max(np.abs(ut - Q) + np.abs(dut - dQ)))
    lg.put('VERIFY', f'{params.tag()} rescaling', c=float(c), M=float(M), deviation=dev)
    return dev


def hv_ceiling(params, eps):
    """ -alpha(N-2-alpha)((1-eps)^2/2 - (1-eps)^(p+1)/(p+1)) """
    x = 1 - eps
    return -params.k_inf * (x * x / 2 - x**(params.p + 1) / (params.p + 1))
