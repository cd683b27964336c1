#!/usr/bin/env python3
"""
Seeds a small offset away from the singular points rho=0 and rho=1.

Each seed starts from a low-order Taylor polynomial and is refined by one
sweep of the integral (self-adjoint) form of the ODE, evaluated with Gauss
quadrature. Near rho=1 the subcritical weight |1-rho^2|^beta with
beta = alpha-(N-1)/2 > -1 is integrated exactly by Gauss-Jacobi nodes.
"""
# pylint: disable=invalid-name
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi
from .Errors import DomainError, RegimeError
from .Models import State
from .Params import Regime
from .OdeCore import source

TOWARD_ONE = 'TowardOne'
TOWARD_ZERO = 'TowardZero'
TOWARD_INFINITY = 'TowardInfinity'

ORIGIN_C = 'OriginC'
ONE_SUBCRITICAL = 'OneSubcritical'
ONE_CRITICAL = 'OneCritical'

_QUAD_NODES = 24


def _legendre01(n=_QUAD_NODES):
    """ Gauss-Legendre nodes/weights on [0, 1] """
    x, w = leggauss(n)
    return (x + 1) / 2, w / 2


def _jacobi01(beta, n=_QUAD_NODES):
    """ Nodes/weights for int_0^1 x^beta f(x) dx """
    y, w = roots_jacobi(n, 0.0, beta)
    return (y + 1) / 2, w / 2**(beta + 1)


def origin_trust_radius(params, c):
    """ Largest admissible origin offset: 0.1 on the scale c^-(p-1)/2 """
    return 0.1 * max(1.0, abs(c))**(-(params.p - 1) / 2)


def origin_taylor_a2(params, c):
    """ u = c + a2 rho^2 + O(rho^4) """
    return source(params, c) / (2 * params.N)


def init_at_origin(params, c, delta):
    """
    State (delta, u, u') of the left family u(., c) with u(0)=c, u'(0)=0.

    The even Taylor polynomial is pushed through one sweep of
        u'(t) = int_0^t s^(N-1) (1-s^2)^beta g(u(s)) ds / (t^(N-1) (1-t^2)^(beta+1))
        u(d)  = c + int_0^d u'(t) dt
    so u is accurate to O(delta^6) and u' to O(delta^5).
    """
    c, delta = float(c), float(delta)
    if not 0 < delta <= min(0.1, origin_trust_radius(params, c)):
        raise DomainError(f'origin offset {delta!r} outside (0, '
                          f'{min(0.1, origin_trust_radius(params, c)):.3g}] for c={c:g}')
    if c == 0:
        return State(rho=delta, u=0.0, du=0.0)

    a2 = origin_taylor_a2(params, c)
    N, beta = params.N, params.alpha - (params.N - 1) / 2
    tx, tw = _legendre01()

    # outer nodes t_i = delta*x_i, inner nodes s_ij = t_i*x_j
    t = delta * tx
    s = np.outer(t, tx)
    g = source(params, c + a2 * s * s)
    inner = (tx**(N - 1) * (1 - s * s)**beta * g) @ tw      # scaled by t
    du_nodes = t * inner / (1 - t * t)**(beta + 1)
    u = c + delta * (du_nodes @ tw)

    s1 = delta * tx
    g1 = source(params, c + a2 * s1 * s1)
    du = delta * ((tx**(N - 1) * (1 - s1 * s1)**beta * g1) @ tw) / (1 - delta * delta)**(beta + 1)
    return State(rho=delta, u=float(u), du=float(du))


def _check_one_offset(delta, direction):
    if not 0 < delta <= 0.05:
        raise DomainError(f'offset at rho=1 must lie in (0, 0.05], got {delta!r}')
    if direction not in (TOWARD_ZERO, TOWARD_INFINITY):
        raise DomainError(f'direction must be {TOWARD_ZERO} or {TOWARD_INFINITY}, got {direction!r}')
    return 1 - delta if direction == TOWARD_ZERO else 1 + delta


def du_at_one_subcritical(params, b):
    """ U'(1,b) = (|b|^(p-1) b - alpha(alpha+1) b) / (2 alpha + 3 - N) """
    return -source(params, b) / (2 * params.alpha + 3 - params.N)


def ddu_at_one(params, b, du1):
    """ U''(1) from differentiating the ODE once at rho=1 """
    a, N = params.alpha, params.N
    bracket = (N - 1) + 2 * (a + 1) + a * (a + 1) - params.p * abs(b)**(params.p - 1)
    return du1 * bracket / (N - 5 - 2 * a)


def right_frame_slope(params, b):
    """ V'(1) for V = U/u_inf on the subcritical right family """
    if params.regime != Regime.SUBCRITICAL:
        raise RegimeError(f'right frame slope needs {Regime.SUBCRITICAL.value}')
    a = params.alpha
    return (b / params.b_inf) * (params.k_inf - abs(b)**(params.p - 1)) / (params.N - 3 - 2 * a)


def _sweep_subcritical(params, b, rho):
    """ One sweep of the weighted integral operator on [1, rho] """
    N = params.N
    beta = params.alpha - (N - 1) / 2
    du1 = du_at_one_subcritical(params, b)
    ddu1 = ddu_at_one(params, b, du1)

    def taylor(sig):
        x = sig - 1
        return b + du1 * x + 0.5 * ddu1 * x * x

    jx, jw = _jacobi01(beta)
    lx, lw = _legendre01()

    def du_of(tau):
        # U'(tau) = -int_0^1 x^beta s^(N-1) (1+s)^beta g(U(s)) dx / (tau^(N-1) (1+tau)^(beta+1))
        tau = np.atleast_1d(tau)
        sig = 1 + np.outer(tau - 1, jx)
        integrand = sig**(N - 1) * (1 + sig)**beta * source(params, taylor(sig))
        return -(integrand @ jw) / (tau**(N - 1) * (1 + tau)**(beta + 1))

    u = b + (rho - 1) * (du_of(1 + (rho - 1) * lx) @ lw)
    return float(u), float(du_of(rho)[0])


def init_at_one_subcritical(params, b, delta, side):
    """ State of U(., b) at 1-delta (TowardZero) or 1+delta (TowardInfinity) """
    if params.regime != Regime.SUBCRITICAL:
        raise RegimeError(f'subcritical seed at rho=1 needs {Regime.SUBCRITICAL.value},'
                          f' got {params.regime.value}')
    rho = _check_one_offset(delta, side)
    u, du = _sweep_subcritical(params, float(b), rho)
    return State(rho=rho, u=u, du=du)


def _sweep_critical(params, a, rho):
    """ One sweep of U'(t) = t^(1-N) [a + int_1^t s^(N-1) g(U)/(1-s^2) ds] """
    N, b0 = params.N, params.b0
    ddu1 = -(N - 1) * a / 2

    def taylor(sig):
        x = sig - 1
        return b0 + a * x + 0.5 * ddu1 * x * x

    lx, lw = _legendre01()

    def du_of(tau):
        tau = np.atleast_1d(tau)
        sig = 1 + np.outer(tau - 1, lx)
        integrand = sig**(N - 1) * source(params, taylor(sig)) / (1 - sig * sig)
        return (a + (tau - 1) * (integrand @ lw)) / tau**(N - 1)

    u = b0 + (rho - 1) * (du_of(1 + (rho - 1) * lx) @ lw)
    return float(u), float(du_of(rho)[0])


def init_at_one_critical(params, a, delta, side):
    """ State of U(., a) with U(1)=b0, U'(1)=a at 1-delta or 1+delta """
    if params.regime != Regime.CRITICAL:
        raise RegimeError(f'critical seed at rho=1 needs {Regime.CRITICAL.value},'
                          f' got {params.regime.value}')
    rho = _check_one_offset(delta, side)
    if a == 0:
        return State(rho=rho, u=params.b0, du=0.0)
    u, du = _sweep_critical(params, float(a), rho)
    return State(rho=rho, u=u, du=du)


def make_seed(params, seed):
    """ Dispatch a BoundarySeed to the matching initializer """
    if seed.family == ORIGIN_C:
        if seed.direction != TOWARD_ONE:
            raise DomainError('origin seeds only point toward rho=1')
        return init_at_origin(params, seed.value, seed.offset)
    if seed.family == ONE_SUBCRITICAL:
        return init_at_one_subcritical(params, seed.value, seed.offset, seed.direction)
    if seed.family == ONE_CRITICAL:
        return init_at_one_critical(params, seed.value, seed.offset, seed.direction)
    raise DomainError(f'unknown seed family {seed.family!r}')


def right_seed(params, right_param, delta, side):
    """ The regime-appropriate right-family seed """
    if params.regime == Regime.SUBCRITICAL:
        return init_at_one_subcritical(params, right_param, delta, side)
    if params.regime == Regime.CRITICAL:
        return init_at_one_critical(params, right_param, delta, side)
    raise RegimeError(f'no right family for regime {params.regime.value}')


def singular_exponent(params):
    """ Exponent gamma of the non-smooth mode (1-rho)^gamma at rho=1 """
    return (params.N - 1) / 2 - params.alpha


def extrapolate_to_one(params, rho, u, du):
    """
    Estimate u(1) from (u, u') at rho<1 assuming u ~ A + B (1-rho)^gamma;
    gamma=1 covers the logarithmic critical case to the same order.
    """
    gamma = singular_exponent(params)
    return u + (1 - rho) * du / gamma if gamma > 0 else u + (1 - rho) * du
