#!/usr/bin/env python3
"""
The invariant suite behind `selfsim verify`: exact solutions, Lyapunov
monotonicity, angle-vs-direct zero counts and barrier self-consistency for
one (N, p). Checks that do not apply to the regime are skipped, not failed.
"""
# pylint: disable=invalid-name,broad-exception-caught
import math
import numpy as np
from .Errors import SelfSimError
from .Models import CheckResult, SolverOptions, State, GLOBAL_ALPHA
from .Params import Regime, barrier_T, cubic_closed_form, u_inf, REGIME_RTOL
from .OdeCore import residual, lyapunov_H, lyapunov_Hv
from .BoundarySeries import init_at_origin
from .Integrator import integrate, Guards
from .Pruefer import count_zeros
from .Oracle import count_zeros_direct
from .Shooting import left_probe
from .Continuation import extend_and_classify, first_certified
from .IoFormats import yaml_dump
from .RotatingLogger import RotatingLogger

lg = RotatingLogger('selfsim')

EXACT_LIMIT = 1e-10
CLOSED_FORM_LIMIT = 1e-8
LYAPUNOV_LIMIT = 1e-9
LYAPUNOV_CS = (0.5, 2.0, 10.0)
ZERO_CS = (0.5, 2.0, 10.0, 100.0)
BARRIER_POINTS = 5


class Verifier:
    """ Runs the checks for one Params and collects CheckResults """

    def __init__(self, params, tol=1e-10, opts=None, s_max=25.0):
        self.params = params
        self.tol = tol
        self.opts = opts or SolverOptions()
        self.s_max = s_max
        self.results = []

    def _add(self, name, value, limit, passed=None, detail=''):
        passed = bool(value <= limit) if passed is None else bool(passed)
        res = CheckResult(name=name, value=float(value), limit=float(limit),
                          passed=passed, detail=detail)
        self.results.append(res)
        lg.put('VERIFY', f'{self.params.tag()} {name} {"ok" if passed else "FAIL"}',
               value=res.value, limit=res.limit)
        return res

    def _grid(self):
        inner = np.linspace(0.01, 0.99, 500)
        outer = np.linspace(1.01, 10.0, 500)
        return np.concatenate((inner, outer))

    def check_constant(self):
        """ u = b0 solves the ODE everywhere """
        rho = self._grid()
        b0 = self.params.b0
        worst = np.max(np.abs(residual(self.params, rho, b0, 0.0, 0.0)))
        self._add('constant_residual', worst, EXACT_LIMIT)

    def check_singular(self):
        """ u = b_inf rho^-alpha solves the ODE """
        if not math.isfinite(self.params.b_inf):
            return
        rho = self._grid()
        u, du, ddu = u_inf(self.params, rho)
        worst = np.max(np.abs(residual(self.params, rho, u, du, ddu)) / np.maximum(1.0, np.abs(u)))
        self._add('singular_residual', worst, EXACT_LIMIT)

    def check_closed_form(self):
        """ p=3, N>=5: explicit profile residual, and integration from its origin value """
        params = self.params
        if params.N < 5 or abs(params.p - 3) > REGIME_RTOL:
            return
        rho = self._grid()
        u, du, ddu = cubic_closed_form(params, rho)
        self._add('closed_form_residual', np.max(np.abs(residual(params, rho, u, du, ddu))),
                  EXACT_LIMIT)
        c = cubic_closed_form(params, 0.0)[0]
        seed = init_at_origin(params, c, min(self.opts.delta0, 1e-4))
        traj = integrate(params, seed, 0.99, min(self.tol, 1e-11),
                         Guards(self.opts.u_max, self.opts.delta_min), self.opts.method)
        exact = cubic_closed_form(params, traj.rho)[0]
        mask = traj.rho >= 0.01
        self._add('closed_form_integration', np.max(np.abs(traj.u[mask] - exact[mask])),
                  CLOSED_FORM_LIMIT)

    def check_lyapunov(self):
        """ H and H_v are nonincreasing along left-family samples on (0,1) """
        params = self.params
        if not params.k_inf > 0:
            return
        worst = 0.0
        for c in LYAPUNOV_CS:
            probe = left_probe(params, c, 0.9, self.tol, self.opts)
            traj = probe.traj
            st = State(rho=traj.rho, u=traj.u, du=traj.du)
            for vals in (lyapunov_H(params, st), lyapunov_Hv(params, st)):
                scale = max(1.0, float(np.max(np.abs(vals))))
                worst = max(worst, float(np.max(np.diff(vals))) / scale)
        self._add('lyapunov_increments', max(worst, 0.0), LYAPUNOV_LIMIT)

    def check_zero_counts(self):
        """ Angle-based zero count agrees with direct sign changes """
        params = self.params
        if not math.isfinite(params.b_inf):
            return
        mismatches = 0
        details = []
        for c in ZERO_CS + (params.b0,):
            probe = left_probe(params, c, 0.9, self.tol, self.opts)
            lo, hi = probe.trace.span
            angle = count_zeros(probe.trace, lo, hi)
            direct = count_zeros_direct(params, probe.traj, lo, hi)
            details.append(f'c={c:.6g}:{angle}/{direct}')
            mismatches += angle != direct
        self._add('zero_count_agreement', mismatches, 0, detail=' '.join(details))

    def check_identities(self):
        """ alpha(p-1) = 2 and T(1/rho_NP^2) = 0 """
        params = self.params
        self._add('alpha_identity', abs(params.alpha * (params.p - 1) - 2), 1e-14)
        if math.isfinite(params.rho_NP):
            self._add('barrier_root', abs(barrier_T(params, params.rho_NP**-2)), EXACT_LIMIT)

    def check_barrier(self):
        """ Every barrier-certified exterior run classifies as GlobalAlpha """
        params = self.params
        if params.regime != Regime.SUBCRITICAL:
            return
        failures, certified = 0, 0
        for b in np.linspace(0.5 * params.b_inf, params.b_inf, BARRIER_POINTS + 2)[1:-1]:
            traj, report = extend_and_classify(params, float(b), self.s_max, self.tol, self.opts)
            if first_certified(params, traj) is not None:
                certified += 1
                failures += report.classification != GLOBAL_ALPHA
        self._add('barrier_consistency', failures, 0, detail=f'{certified} certified runs')

    def run(self):
        """ All applicable checks; a check that raises is recorded as failed """
        for check in (self.check_identities, self.check_constant, self.check_singular,
                      self.check_closed_form, self.check_lyapunov, self.check_zero_counts,
                      self.check_barrier):
            try:
                check()
            except (SelfSimError, ArithmeticError, ValueError) as exc:
                lg.err(f'{self.params.tag()} {check.__name__}: {exc}')
                self._add(check.__name__, math.inf, 0, passed=False,
                          detail=f'{type(exc).__name__}: {exc}')
        return self.results

    @property
    def passed(self):
        """ True when every recorded check passed """
        return all(r.passed for r in self.results)

    def report(self):
        """ YAML report, one entry per check """
        doc = {'N': self.params.N, 'p': self.params.p, 'regime': self.params.regime.value,
               'passed': self.passed,
               'checks': [{'name': r.name, 'value': r.value, 'limit': r.limit,
                           'pass': r.passed, **({'detail': r.detail} if r.detail else {})}
                          for r in self.results]}
        return yaml_dump(doc)
