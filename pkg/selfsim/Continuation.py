#!/usr/bin/env python3
"""
Continuation of right-family profiles past rho=1 in the chart s = log(rho).

A run either hits the |u| guard (Blowup, with a power-law estimate of the
blow-up radius) or settles onto one of the two decay modes
e^{-alpha s} (GlobalAlpha) and e^{-(alpha+1) s} (GlobalAlphaPlusOne).
"""
# pylint: disable=invalid-name,too-many-arguments,too-many-locals
import math
import dataclasses
from concurrent.futures import ProcessPoolExecutor, Future
from typing import Dict
import numpy as np
from .Errors import DomainError, RangeError, RegimeError
from .Models import (AsymptoticsReport, BarrierData, ThresholdBracket, FrameReport,
                     SolverOptions, BLOWUP, GLOBAL_ALPHA, GLOBAL_ALPHA_PLUS_ONE,
                     INCONCLUSIVE, BLOWUP_GUARD, STEP_UNDERFLOW, LOG_CHART)
from .Params import derive_params, barrier_T, B_tilde
from .OdeCore import to_log, to_rho
from .BoundarySeries import right_seed, TOWARD_INFINITY
from .Integrator import integrate_log, estimate_blowup_radius, Guards
from .RotatingLogger import RotatingLogger

lg = RotatingLogger('selfsim')

S_MAX_RANGE = (5.0, 40.0)
SPREAD_TOL = 1e-4
FIT_POINTS = 200
UNDERFLOW_FACTOR = 10.0


def _spread(vals):
    mean = float(np.mean(vals))
    if mean == 0:
        return mean, math.inf
    return mean, float((np.max(vals) - np.min(vals)) / abs(mean))


def classify_tail(params, traj, s_max):
    """ Decay-mode classification of a completed log-chart run over its last decade """
    a = params.alpha
    s_hi = float(traj.x[-1])
    s_lo = max(float(traj.x[0]), s_hi - math.log(10))
    s = np.linspace(s_lo, s_hi, FIT_POINTS)
    z, dz = traj.dense(s)
    window = (s_lo, s_hi)

    L, spread = _spread(np.exp(a * s) * z)
    if spread < SPREAD_TOL:
        secondary = float(np.max(np.abs(np.exp(a * s) * dz + a * L)))
        return AsymptoticsReport(classification=GLOBAL_ALPHA, L=L, fit_window=window,
                                 fit_residual=spread, secondary_check=secondary)
    L1, spread1 = _spread(np.exp((a + 1) * s) * z)
    if spread1 < SPREAD_TOL:
        secondary = float(np.max(np.abs(np.exp((a + 1) * s) * dz + (a + 1) * L1)))
        return AsymptoticsReport(classification=GLOBAL_ALPHA_PLUS_ONE, L=L1, fit_window=window,
                                 fit_residual=spread1, secondary_check=secondary,
                                 note='rho^-(alpha+1) decay')
    return AsymptoticsReport(classification=INCONCLUSIVE, fit_window=window,
                             fit_residual=min(spread, spread1),
                             note=f'no decay mode settled by s_max={s_max:g}')


def extend_and_classify(params, right_param, s_max=25.0, tol=1e-10, opts=None):
    """ Integrate from 1+delta1 to s_max and classify; returns (Trajectory, AsymptoticsReport) """
    opts = opts or SolverOptions()
    if not S_MAX_RANGE[0] <= s_max <= S_MAX_RANGE[1]:
        raise RangeError(f's_max={s_max!r} outside [{S_MAX_RANGE[0]:g}, {S_MAX_RANGE[1]:g}]')
    if not params.shootable:
        raise RegimeError(f'no right family for regime {params.regime.value}')
    seed = to_log(right_seed(params, right_param, opts.delta1, TOWARD_INFINITY))
    guards = Guards(u_max=opts.blowup_u_max, delta_min=opts.delta_min)
    traj = integrate_log(params, seed, s_max, tol, guards, opts.method)

    last = abs(float(traj.u[-1]))
    blown = traj.status == BLOWUP_GUARD or (
        traj.status == STEP_UNDERFLOW
        and last > UNDERFLOW_FACTOR * max(params.b0, abs(right_param)))
    if blown:
        rho_plus, resid = estimate_blowup_radius(params, traj)
        report = AsymptoticsReport(classification=BLOWUP, rho_plus_estimate=rho_plus,
                                   fit_window=(float(traj.x[0]), float(traj.x[-1])),
                                   fit_residual=resid,
                                   note=f'{traj.status}; rho_plus is a +-20% estimate')
    elif traj.status == STEP_UNDERFLOW:
        report = AsymptoticsReport(classification=INCONCLUSIVE,
                                   fit_window=(float(traj.x[0]), float(traj.x[-1])),
                                   note=f'step underflow at s={traj.status_at!r} with |u|={last:.3g}')
    else:
        report = classify_tail(params, traj, s_max)
    lg.put('CLASSIFY', f'{params.tag()} {report.classification}', right=float(right_param),
           L=report.L, rho_plus=report.rho_plus_estimate, resid=report.fit_residual)
    return traj, report


def barrier_check(params, state):
    """
    (certified_global, BarrierData) for a state past rho=1: the profile is
    positive, below b_inf, decreasing, flatter than -B~/2 in log slope, and
    beyond rho_NP.
    """
    rho, u, du = state.rho, state.u, state.du
    if rho <= 1:
        raise DomainError(f'barrier needs rho > 1, got {rho!r}')
    bt = B_tilde(params, rho)
    slope = rho * du / u if u != 0 else -math.inf
    rho_np = params.rho_NP
    t_val = barrier_T(params, 1 / rho_np**2) if math.isfinite(rho_np) else math.nan
    ok = (0 < u < params.b_inf and du < 0 and slope > -bt / 2
          and math.isfinite(rho_np) and rho > rho_np)
    return bool(ok), BarrierData(B_tilde=bt, beta=params.beta_NP, rho_NP=rho_np,
                                 T_value=t_val, slope=slope)


def first_certified(params, traj):
    """ First sample of an exterior run that passes barrier_check, or None """
    for st in traj.states():
        st = to_rho(st) if traj.chart == LOG_CHART else st
        if st.rho > 1 and barrier_check(params, st)[0]:
            return st
    return None


def _classify_worker(N, p, right_param, s_max, tol, opts_dict):
    params = derive_params(N, p)
    _, report = extend_and_classify(params, right_param, s_max, tol, SolverOptions(**opts_dict))
    return report.classification


def threshold_bracket(params, lo, hi, iters=40, s_max=25.0, tol=1e-10, opts=None, jobs=1):
    """
    Shrink [lo, hi] around the observed Blowup / non-Blowup boundary of the
    right parameter. jobs > 1 splits each round into jobs+1 pieces.
    """
    opts = opts or SolverOptions()
    opts_dict = dataclasses.asdict(opts)

    def classify(vals):
        if jobs <= 1 or len(vals) < 2:
            return [_classify_worker(params.N, params.p, v, s_max, tol, opts_dict) for v in vals]
        future_to_val: Dict[Future, float] = {}
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            future_to_val.update({executor.submit(_classify_worker, params.N, params.p, v,
                                                  s_max, tol, opts_dict): v for v in vals})
            try:
                got = {future_to_val[f]: f.result() for f in future_to_val}
            except KeyboardInterrupt:
                for pending in future_to_val:
                    if not pending.done():
                        pending.cancel()
                executor.shutdown(wait=False, cancel_futures=True)
                raise
        return [got[v] for v in vals]

    class_lo, class_hi = classify([lo, hi])
    if (class_lo == BLOWUP) == (class_hi == BLOWUP):
        raise DomainError(f'[{lo!r}, {hi!r}] does not bracket a Blowup boundary'
                          f' ({class_lo}, {class_hi})')
    done = 0
    pieces = max(2, jobs + 1)
    while done < iters and hi - lo > 1e-14 * max(1.0, abs(lo)):
        inner = list(np.linspace(lo, hi, pieces + 1)[1:-1])
        classes = classify(inner)
        pts = [lo] + inner + [hi]
        cls = [class_lo] + classes + [class_hi]
        for i in range(len(pts) - 1):
            if (cls[i] == BLOWUP) != (cls[i + 1] == BLOWUP):
                lo, hi, class_lo, class_hi = pts[i], pts[i + 1], cls[i], cls[i + 1]
                break
        done += 1
    lg.put('CLASSIFY', f'{params.tag()} threshold', lo=float(lo), hi=float(hi))
    return ThresholdBracket(lo=float(lo), hi=float(hi), class_lo=class_lo,
                            class_hi=class_hi, iterations=done)


def frame_values(params, traj):
    """ V = U/u_inf at the samples of a run """
    return traj.rho**params.alpha * traj.u / params.b_inf


def monotone_frame(params, traj, slack=1e-9):
    """ Monotonicity of V over the samples and the side of 1 it stays on """
    V = frame_values(params, traj)
    dV = np.diff(V)
    return FrameReport(increasing=bool(np.all(dV >= -slack)),
                       decreasing=bool(np.all(dV <= slack)),
                       above_one=bool(np.all(V > 1)), below_one=bool(np.all(V < 1)),
                       v_first=float(V[0]), v_last=float(V[-1]))


def h_positivity(params, traj):
    """ min of h = 2 rho U' + (alpha+1) U over the samples (N=3 only) """
    if params.N != 3:
        raise DomainError(f'h positivity is a three-dimensional check, got N={params.N}')
    h = 2 * traj.rho * traj.du_rho + (params.alpha + 1) * traj.u
    return float(np.min(h))
