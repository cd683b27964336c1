#!/usr/bin/env python3
"""
Locate regular profiles on [0, 1] by matching the left family u(., c)
(regular at the origin) with the right family regular at rho=1:
U(., b) with U(1)=b when subcritical, U(., a) with U(1)=b0, U'(1)=a when
critical.

Subcritical: on each window of the c-grid where the left zero count equals
n+1, solve the inner value match for b and bracket the derivative mismatch
in c. Critical: bracket u(1, c) - b0 and read a off the matched derivative.
"""
# pylint: disable=invalid-name,too-many-arguments,too-many-locals
# pylint: disable=too-many-instance-attributes,broad-exception-caught
import math
import dataclasses
from concurrent.futures import ProcessPoolExecutor, Future
from typing import Dict
import numpy as np
from scipy.optimize import brentq
from .Errors import (DomainError, RegimeError, RangeError, IntegrationError,
                     NoRootInBracket, ToleranceNotMet, SelfSimError)
from .Models import (State, LeftProbe, RightProbe, ShootResult, ScanRow,
                     AssembledProfile, SolverOptions, COMPLETED)
from .Params import Regime, derive_params
from .OdeCore import residual, diagnostic_columns
from .BoundarySeries import (init_at_origin, right_seed, extrapolate_to_one,
                             TOWARD_ZERO)
from .Integrator import integrate, Guards
from .Pruefer import left_trace, right_trace, count_zeros, theta_at
from .RotatingLogger import RotatingLogger

lg = RotatingLogger('selfsim')

RESIDUAL_GRID = (0.05, 0.99, 200)
CONSTANT_RTOL = 1e-6


def _opts(opts):
    return opts if opts is not None else SolverOptions()


def _guards(opts):
    return Guards(u_max=opts.u_max, delta_min=opts.delta_min)


def _check_rho0(rho0, opts):
    if not 0.5 < rho0 < 1 - opts.delta1:
        raise RangeError(f'rho0={rho0!r} must lie in (0.5, 1-delta1={1 - opts.delta1!r})')


def origin_offset(params, c, opts=None):
    """ Origin offset: delta0, shrunk on the c^-(p-1)/2 length scale for large c """
    opts = _opts(opts)
    return min(opts.delta0, opts.origin_trust * max(1.0, abs(c))**(-(params.p - 1) / 2))


def _require_completed(traj, what):
    if traj.status != COMPLETED:
        raise IntegrationError(f'{what} stopped early: {traj.status} at x={traj.status_at!r}')


def left_probe(params, c, rho0=0.9, tol=1e-10, opts=None):
    """ Integrate u(., c) from the origin seed to 1-delta1; state read at rho0 """
    opts = _opts(opts)
    if c < 0:
        raise DomainError(f'left family needs c >= 0, got {c!r}')
    _check_rho0(rho0, opts)
    seed = init_at_origin(params, c, origin_offset(params, c, opts))
    rho_end = 1 - opts.delta1
    traj = integrate(params, seed, rho_end, tol, _guards(opts), opts.method)
    _require_completed(traj, f'left family c={c!r}')
    u0, du0 = traj.rho_at(rho0)
    trace = left_trace(params, traj)
    u_end, du_end = float(traj.u[-1]), float(traj.du[-1])
    return LeftProbe(c=float(c), state=State(rho0, float(u0), float(du0)), trace=trace,
                     u_at_one=float(extrapolate_to_one(params, rho_end, u_end, du_end)),
                     du_near_one=du_end, zero_count=trace.zero_count, traj=traj)


def _right_traj(params, right_param, rho0, tol, opts):
    seed = right_seed(params, right_param, opts.delta1, TOWARD_ZERO)
    return integrate(params, seed, rho0, tol, _guards(opts), opts.method)


def right_probe(params, right_param, rho0=0.9, tol=1e-10, opts=None):
    """ Integrate the right family inward from 1-delta1 to rho0 """
    opts = _opts(opts)
    if not params.shootable:
        raise RegimeError(f'no right family for regime {params.regime.value}')
    _check_rho0(rho0, opts)
    traj = _right_traj(params, right_param, rho0, tol, opts)
    _require_completed(traj, f'right family {right_param!r}')
    state = State(rho0, float(traj.u[-1]), float(traj.du[-1]))
    return RightProbe(right_param=float(right_param), state=state,
                      trace=right_trace(params, traj, right_param), traj=traj)


def mismatch(params, c, right_param, rho0=0.9, tol=1e-10, opts=None):
    """ (u_left - u_right, u'_left - u'_right) at rho0 """
    left = left_probe(params, c, rho0, tol, opts)
    right = right_probe(params, right_param, rho0, tol, opts)
    return left.state.u - right.state.u, left.state.du - right.state.du


def c_grid(c_lo, c_hi, per_decade):
    """ Geometric grid with per_decade points per factor 10, endpoints included """
    if not 0 < c_lo < c_hi:
        raise RangeError(f'need 0 < c_lo < c_hi, got {c_lo!r}, {c_hi!r}')
    n = max(2, int(math.ceil(per_decade * math.log10(c_hi / c_lo))) + 1)
    return np.geomspace(c_lo, c_hi, n)


def zero_windows(counts, target):
    """ Maximal index runs with counts == target, widened by one neighbour each side """
    windows, start = [], None
    for i, z in enumerate(list(counts) + [None]):
        if z == target and start is None:
            start = i
        elif z != target and start is not None:
            windows.append((max(0, start - 1), min(len(counts) - 1, i)))
            start = None
    return windows


def inner_bracket(params, zeros):
    """ b-range for a subcritical profile with the given zero count (parity decides the side of b_inf) """
    if zeros % 2:
        return params.b_inf * (1 + 1e-9), params.b0
    return 1e-6, params.b_inf * (1 - 1e-9)


class Matcher:
    """ Cached probes for one (params, rho0, tol) shooting run """

    def __init__(self, params, rho0, tol, opts):
        self.params, self.rho0, self.tol, self.opts = params, rho0, tol, opts
        self._left: Dict[float, LeftProbe] = {}
        self._right: Dict[float, State] = {}

    def left(self, c):
        """ LeftProbe of c (cached) """
        c = float(c)
        if c not in self._left:
            self._left[c] = left_probe(self.params, c, self.rho0, self.tol, self.opts)
        return self._left[c]

    def right_state(self, b):
        """ Right-family state at rho0, or None when it does not reach rho0 """
        b = float(b)
        if b not in self._right:
            try:
                traj = _right_traj(self.params, b, self.rho0, self.tol, self.opts)
                ok = traj.status == COMPLETED
                self._right[b] = State(self.rho0, float(traj.u[-1]), float(traj.du[-1])) if ok else None
            except (IntegrationError, ArithmeticError):
                self._right[b] = None
        return self._right[b]

    def inner_b(self, u_left, lo, hi):
        """ b in [lo, hi] with U(rho0, b) = u_left, or None without a sign change """
        def F(b):
            st = self.right_state(b)
            return math.nan if st is None else st.u - u_left
        f_lo, f_hi = F(lo), F(hi)
        if not (math.isfinite(f_lo) and math.isfinite(f_hi)) or f_lo * f_hi > 0:
            return None, (lo if abs(f_lo) <= abs(f_hi) else hi)
        if f_lo == 0:
            return lo, lo
        if f_hi == 0:
            return hi, hi
        try:
            b = brentq(F, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        except (ValueError, RuntimeError):
            return None, lo
        return b, b

    def subcritical_objective(self, c, bracket):
        """ Derivative mismatch after the inner value match; value mismatch when that fails """
        left = self.left(c)
        b, b_edge = self.inner_b(left.state.u, *bracket)
        if b is None:
            st = self.right_state(b_edge)
            return (math.nan if st is None else left.state.u - st.u), None
        st = self.right_state(b)
        return left.state.du - st.du, b

    def critical_objective(self, c):
        """ u(1, c) - b0 """
        return self.left(c).u_at_one - self.params.b0

    def mismatch_at(self, c, right_param):
        """ Value and derivative mismatch at rho0 for cached probes """
        left = self.left(c)
        st = self.right_state(right_param)
        if st is None:
            return math.inf, math.inf
        return left.state.u - st.u, left.state.du - st.du

    def scan_rows(self):
        """ ScanRows for every left probe computed so far, by increasing c """
        return [scan_row_from_probe(self.params, probe) for _, probe in sorted(self._left.items())]


def scan_row_from_probe(params, probe):
    """ ScanRow summarising one LeftProbe """
    traj = probe.traj
    hv = diagnostic_columns(params, traj.rho, traj.u, traj.du)['Hv']
    return ScanRow(c=probe.c, u1=probe.u_at_one, zeros=probe.zero_count,
                   theta=theta_at(probe.trace, probe.state.rho),
                   hv_floor=float(np.nanmin(hv)))


def _bracket_roots(fn, grid, lo_i, hi_i, values):
    """ brentq on every finite sign change of values over grid[lo_i..hi_i] """
    roots = []
    for i in range(lo_i, hi_i):
        f1, f2 = values[i], values[i + 1]
        if not (math.isfinite(f1) and math.isfinite(f2)) or f1 * f2 > 0:
            continue
        a, b = grid[i], grid[i + 1]
        if f1 == 0:
            roots.append(a)
            continue
        if f2 == 0:
            continue
        try:
            root = brentq(fn, a, b, xtol=1e-12 * max(1.0, a), maxiter=200)
        except RuntimeError as exc:
            raise ToleranceNotMet(f'bisection stalled in [{a!r}, {b!r}]: {exc}') from exc
        except ValueError:
            continue    # objective jumped between branches inside the step
        roots.append(root)
    return roots


def _search(params, n_index, c_lo, c_hi, rho0, tol, opts):
    opts = _opts(opts)
    if not params.shootable:
        raise RegimeError(f'no profile search in regime {params.regime.value}')
    if n_index < 0:
        raise DomainError(f'n_index must be >= 0, got {n_index!r}')
    _check_rho0(rho0, opts)
    target = n_index + 1
    grid = c_grid(c_lo, c_hi, opts.grid_per_decade)
    m = Matcher(params, rho0, tol, opts)
    counts = []
    for c in grid:
        counts.append(m.left(c).zero_count)
    windows = zero_windows(counts, target)
    lg.put('SCAN', f'{params.tag()} n={n_index} grid={len(grid)} windows={windows}',
           c_lo=float(c_lo), c_hi=float(c_hi))
    return m, grid, windows, target


def _critical_candidate(m, c):
    """ (a, mismatch_norm) at a root of u(1,c) = b0 """
    params, opts = m.params, m.opts
    left = m.left(c)
    a0 = left.du_near_one / (1 + (params.N - 1) * opts.delta1 / 2)
    span = 1e-4 * max(1.0, abs(a0))

    def value_gap(a):
        st = m.right_state(a)
        return math.nan if st is None else st.u - left.state.u
    a = a0
    g_lo, g_hi = value_gap(a0 - span), value_gap(a0 + span)
    if math.isfinite(g_lo) and math.isfinite(g_hi) and g_lo * g_hi < 0:
        a = brentq(value_gap, a0 - span, a0 + span, xtol=1e-14 * max(1.0, abs(a0)))
    du, dv = m.mismatch_at(c, a)
    return a, math.hypot(du, dv)


def _constant_candidate(params, m, target, lo_c, hi_c):
    """
    The constant b0 as a subcritical candidate: it is regular at both ends
    and crosses u_inf once on (0,1), so it only answers target 1.
    """
    b0 = params.b0
    if target != 1 or not lo_c <= b0 <= hi_c:
        return None
    norm = math.hypot(*m.mismatch_at(b0, b0))
    zeros = assemble_zero_count(params, m, b0, b0)
    return (b0, b0, norm, zeros) if zeros == target else None


def find_profile(params, n_index, c_lo=0.05, c_hi=1e4, rho0=0.9, tol=1e-10, opts=None):
    """
    First profile in increasing c whose zero count on (0,1) is n_index+1.
    In the subcritical range the constant b0 is the n_index=0 profile when
    c_lo <= b0 <= c_hi.
    Raises NoRootInBracket (with the scan table) when no window yields a root.
    """
    opts = _opts(opts)
    m, grid, windows, target = _search(params, n_index, c_lo, c_hi, rho0, tol, opts)
    critical = params.regime == Regime.CRITICAL
    bracket = None if critical else inner_bracket(params, target)

    for lo_i, hi_i in windows:
        if critical:
            fn = m.critical_objective
        else:
            def fn(c):
                return m.subcritical_objective(c, bracket)[0]
        values = [fn(c) for c in grid[lo_i:hi_i + 1]]
        values = [math.nan] * lo_i + values
        found = []
        if not critical:
            const = _constant_candidate(params, m, target, max(grid[lo_i], c_lo),
                                        min(grid[hi_i], c_hi))
            if const is not None:
                found.append(const)
        for c in _bracket_roots(fn, grid, lo_i, hi_i, values):
            if abs(c - params.b0) <= CONSTANT_RTOL * params.b0:
                continue    # constant b0: added exactly above, or zero-free when critical
            if critical:
                right_param, norm = _critical_candidate(m, c)
            else:
                _, right_param = m.subcritical_objective(c, bracket)
                if right_param is None:
                    continue
                norm = math.hypot(*m.mismatch_at(c, right_param))
            left = m.left(c)
            scale = max(1.0, abs(left.state.u), abs(left.state.du))
            if not norm <= opts.mismatch_tol * scale:
                lg.put('ROOT', f'rejected c={c!r}: mismatch {norm:.3g}')
                continue
            zeros = assemble_zero_count(params, m, c, right_param)
            if zeros != target:
                lg.put('ROOT', f'rejected c={c!r}: {zeros} zeros, want {target}')
                continue
            found.append((c, right_param, norm, zeros))
        if found:
            found.sort(key=lambda f: f[0])
            c, right_param, norm, zeros = found[0]
            u1 = params.b0 if critical else right_param
            result = ShootResult(regime=params.regime.value, n_index=int(n_index),
                                 zero_count=int(zeros), c=float(c),
                                 right_param=float(right_param), u_at_one=float(u1),
                                 mismatch_norm=float(norm), rho0=float(rho0), tol=float(tol),
                                 grid_per_decade=int(opts.grid_per_decade),
                                 c_lo=float(c_lo), c_hi=float(c_hi),
                                 other_roots=[float(f[0]) for f in found[1:]])
            lg.put('ROOT', f'{params.tag()} n={n_index} zeros={zeros}', c=result.c,
                   right=result.right_param, u1=result.u_at_one, mismatch=result.mismatch_norm)
            return result

    table = m.scan_rows()
    lg.err(f'{params.tag()} n={n_index}: no root in [{c_lo:g}, {c_hi:g}] ({len(windows)} windows)')
    raise NoRootInBracket(f'no profile with {target} zeros for c in [{c_lo:g}, {c_hi:g}]',
                          table=table)


def assemble_zero_count(params, m, c, right_param):
    """ Zeros of w on the stitched profile: left on [delta, rho0), right on [rho0, 1-delta1] """
    left = m.left(c)
    right = right_probe(params, right_param, m.rho0, m.tol, m.opts)
    lo = left.trace.span[0]
    return (count_zeros(left.trace, lo, m.rho0)
            + count_zeros(right.trace, m.rho0, right.trace.span[1]))


def _residual_on(params, traj, rho):
    h = 1e-4 * min(rho, 1 - rho)
    pts = rho + h * np.array([-2.0, -1.0, 1.0, 2.0])
    du = traj.dense(pts)[1]
    ddu = (du[0] - 8 * du[1] + 8 * du[2] - du[3]) / (12 * h)
    u, du0 = traj.rho_at(rho)
    return abs(residual(params, rho, float(u), float(du0), float(ddu)))


def assemble(params, result, tol=None, opts=None):
    """ Stitch both pieces at rho0 and certify continuity, ODE residual and zero count """
    opts = _opts(opts)
    tol = result.tol if tol is None and math.isfinite(result.tol) else (tol or 1e-10)
    rho0 = result.rho0
    left = left_probe(params, result.c, rho0, tol, opts)
    right = right_probe(params, result.right_param, rho0, tol, opts)
    lo, hi, npts = RESIDUAL_GRID
    lo = max(lo, left.trace.span[0])
    hi = min(hi, 1 - 2 * opts.delta1)
    worst = 0.0
    for rho in np.linspace(lo, hi, npts):
        h = 1e-4 * min(rho, 1 - rho)
        piece = right.traj if rho - 2 * h >= rho0 else left.traj
        worst = max(worst, _residual_on(params, piece, float(rho)))
    zeros = (count_zeros(left.trace, left.trace.span[0], rho0)
             + count_zeros(right.trace, rho0, right.trace.span[1]))
    return AssembledProfile(left=left.traj, right=right.traj, rho0=rho0,
                            jump_u=left.state.u - right.state.u,
                            jump_du=left.state.du - right.state.du,
                            max_residual=float(worst), zero_count=int(zeros),
                            left_trace=left.trace, right_trace=right.trace)


def stitched_columns(profile):
    """
    rho, u, du, theta of the stitched profile on increasing rho; the right
    angle is shifted by 2 pi k to continue the left one at rho0.
    """
    lt, rt = profile.left_trace, profile.right_trace
    rho0 = profile.rho0
    l_mask = lt.rho <= rho0
    r_mask = rt.rho > rho0
    shift = 2 * math.pi * round((theta_at(lt, rho0) - theta_at(rt, rho0)) / (2 * math.pi))
    rho = np.concatenate((lt.rho[l_mask], rt.rho[r_mask]))
    theta = np.concatenate((lt.theta[l_mask], rt.theta[r_mask] + shift))
    lu = profile.left.dense(lt.rho[l_mask])
    ru = profile.right.dense(rt.rho[r_mask])
    return {'rho': rho, 'u': np.concatenate((lu[0], ru[0])),
            'du': np.concatenate((lu[1], ru[1])), 'theta': theta}


def _scan_row(N, p, c, rho0, tol, opts_dict):
    """ Process-pool worker: one ScanRow, failures flagged in the row """
    params = derive_params(N, p)
    opts = SolverOptions(**opts_dict)
    try:
        return scan_row_from_probe(params, left_probe(params, c, rho0, tol, opts))
    except (SelfSimError, ArithmeticError, ValueError) as exc:
        return ScanRow(c=float(c), u1=math.nan, zeros=-1, theta=math.nan,
                       hv_floor=math.nan, ok=False, error=f'{type(exc).__name__}: {exc}')


def scan(params, grid, rho0=0.9, tol=1e-10, opts=None, jobs=1):
    """ One ScanRow per c of grid, in grid order; jobs > 1 fans out to processes """
    opts = _opts(opts)
    cs = [float(c) for c in grid]
    if any(c < 0 for c in cs):
        raise DomainError('scan grid must be non-negative')
    opts_dict = dataclasses.asdict(opts)
    rows = {}
    if jobs <= 1 or len(cs) < 2:
        for c in cs:
            rows[c] = _scan_row(params.N, params.p, c, rho0, tol, opts_dict)
    else:
        future_to_c: Dict[Future, float] = {}
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            future_to_c.update({executor.submit(_scan_row, params.N, params.p, c,
                                                rho0, tol, opts_dict): c for c in cs})
            try:
                for future in future_to_c:
                    rows[future_to_c[future]] = future.result()
            except KeyboardInterrupt:
                for pending in future_to_c:
                    if not pending.done():
                        pending.cancel()
                executor.shutdown(wait=False, cancel_futures=True)
                raise
    out = [rows[c] for c in cs]
    for row in out:
        if row.ok:
            lg.put('SCAN', f'{params.tag()}', c=row.c, u1=row.u1, zeros=row.zeros,
                   theta=row.theta, hv_floor=row.hv_floor)
        else:
            lg.err(f'{params.tag()} scan row c={row.c!r} failed: {row.error}')
    return out
