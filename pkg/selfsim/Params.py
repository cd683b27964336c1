#!/usr/bin/env python3
"""
Validated (N, p) and every closed-form constant derived from them.

Params is a plain value object: build it once with derive_params() and pass it
to every other module.
"""
# pylint: disable=invalid-name,too-many-instance-attributes
import sys
import math
from enum import Enum
from dataclasses import dataclass
from .Errors import DomainError

_dataclass_kwargs = {'slots': True} if sys.version_info >= (3, 10) else {}

REGIME_RTOL = 1e-12


class Regime(str, Enum):
    """ Parameter regime relative to the thresholds 1+4/(N-2) and 1+4/(N-3) """
    SUBCRITICAL = 'SubcriticalRange'
    CRITICAL = 'CriticalRange'
    ABOVE = 'AboveRange'
    UNSUPPORTED = 'Unsupported'


@dataclass(**_dataclass_kwargs)
class Params:
    """ (N, p) plus derived constants; see derive_params() """
    N: int
    p: float
    alpha: float
    s_c: float
    b0: float
    b_inf: float
    p_JL: float
    regime: Regime
    rho_NP: float
    beta_NP: float
    b0_pm1: float      # b0**(p-1) = alpha*(alpha+1), kept exact
    k_inf: float       # b_inf**(p-1) = alpha*(N-2-alpha)

    @property
    def shootable(self):
        """ True when the two-sided shooting construction applies """
        return self.regime in (Regime.SUBCRITICAL, Regime.CRITICAL)

    def tag(self):
        """ Short stable label used in file names and log lines """
        return f'N{self.N}_p{self.p:g}'


def critical_exponent(N):
    """ 1 + 4/(N-3), or +inf for N=3 """
    return 1 + 4 / (N - 3) if N > 3 else math.inf


def joseph_lundgren(N):
    """ Joseph-Lundgren exponent; finite only for N >= 11 """
    if N < 11:
        return math.inf
    return 1 + 4 / (N - 4 - 2 * math.sqrt(N - 1))


def classify_regime(N, p):
    """ Classify (N, p); exact criticality within a relative 1e-12 """
    p_sobolev = 1 + 4 / (N - 2)
    if p <= p_sobolev * (1 + REGIME_RTOL):
        return Regime.UNSUPPORTED
    p_crit = critical_exponent(N)
    if math.isfinite(p_crit) and abs(p - p_crit) < REGIME_RTOL * p:
        return Regime.CRITICAL
    if p < p_crit:
        return Regime.SUBCRITICAL
    return Regime.ABOVE


def barrier_beta(N, p):
    """ Middle coefficient of the barrier quadratic T(X) """
    return ((2 * N - 8) * p**2 + (24 - 12 * N) * p + 10 * N) / (p - 1)**2


def derive_params(N, p):
    """
    Validate (N, p) and derive all constants.

    Raises DomainError when N < 3 (or not an integer) or p <= 1. Any other
    (N, p) yields a Params; unsupported regimes are only flagged so that the
    shooting operations can refuse them.
    """
    if isinstance(N, bool) or int(N) != N:
        raise DomainError(f'N must be an integer, got {N!r}')
    N = int(N)
    p = float(p)
    if N < 3:
        raise DomainError(f'N must be >= 3, got {N}')
    if not p > 1 or not math.isfinite(p):
        raise DomainError(f'p must be a finite real > 1, got {p}')

    alpha = 2 / (p - 1)
    b0_pm1 = alpha * (alpha + 1)
    k_inf = alpha * (N - 2 - alpha)
    b0 = b0_pm1 ** (1 / (p - 1))
    b_inf = k_inf ** (1 / (p - 1)) if k_inf > 0 else math.nan

    beta = barrier_beta(N, p)
    disc = beta**2 - 4 * (N - 2)**2
    if disc >= 0 and beta < 0:
        x_small = (-beta - math.sqrt(disc)) / (2 * (N - 2)**2)
        rho_NP = 1 / math.sqrt(x_small)
    else:
        rho_NP = math.nan

    return Params(N=N, p=p, alpha=alpha, s_c=N / 2 - alpha, b0=b0,
                  b_inf=b_inf, p_JL=joseph_lundgren(N),
                  regime=classify_regime(N, p), rho_NP=rho_NP,
                  beta_NP=beta, b0_pm1=b0_pm1, k_inf=k_inf)


def barrier_T(params, X):
    """ T(X) = (N-2)^2 X^2 + beta X + 1 """
    return (params.N - 2)**2 * X * X + params.beta_NP * X + 1


def B_tilde(params, rho):
    """ Barrier slope coefficient ((p+3)/(p-1) - (N-2)/rho^2) / (1 - 1/rho^2) """
    inv2 = 1 / (rho * rho)
    return ((params.p + 3) / (params.p - 1) - (params.N - 2) * inv2) / (1 - inv2)


def u_inf(params, rho):
    """ Singular solution b_inf * rho^-alpha with its first two derivatives """
    a = params.alpha
    u = params.b_inf * rho**(-a)
    return u, -a * u / rho, a * (a + 1) * u / (rho * rho)


def cubic_closed_form(params, rho):
    """
    Explicit regular profile for p=3, N>=5:
    u = 2 sqrt(2(N-1)(N-4)) / (N-4+3 rho^2), returned with u' and u''.
    """
    if params.N < 5 or abs(params.p - 3) > REGIME_RTOL:
        raise DomainError(f'closed form needs p=3, N>=5 (got N={params.N}, p={params.p})')
    N = params.N
    amp = 2 * math.sqrt(2 * (N - 1) * (N - 4))
    den = N - 4 + 3 * rho * rho
    u = amp / den
    du = -6 * amp * rho / den**2
    ddu = -6 * amp / den**2 + 72 * amp * rho * rho / den**3
    return u, du, ddu


def amplitude_bound(params, rho):
    """ Upper bound ((p+1)/2)^(1/(p-1)) b_inf rho^-alpha for positive left profiles """
    return ((params.p + 1) / 2)**(1 / (params.p - 1)) * params.b_inf * rho**(-params.alpha)


def lyapunov_floor(params):
    """ Lower bound of H on (0,1): -b0^2/(p-1) """
    return -params.b0**2 / (params.p - 1)
