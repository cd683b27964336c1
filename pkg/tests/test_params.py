"""
Derived constants, regime classification and the barrier quadratic.
"""
# pylint: disable=invalid-name
import math
import numpy as np
import pytest
from selfsim.Errors import DomainError
from selfsim.Models import State
from selfsim.Params import (derive_params, Regime, barrier_T, u_inf, amplitude_bound,
                            lyapunov_floor, cubic_closed_form, critical_exponent,
                            joseph_lundgren)
from selfsim.OdeCore import lyapunov_H


def test_n3_p7_constants(p37):
    assert p37.alpha == pytest.approx(1 / 3, rel=1e-15)
    assert p37.s_c == pytest.approx(7 / 6, rel=1e-15)
    assert p37.b0 == pytest.approx((4 / 9)**(1 / 6), rel=1e-14)
    assert p37.b0 == pytest.approx(0.873580, abs=1e-6)
    assert p37.b_inf == pytest.approx((2 / 9)**(1 / 6), rel=1e-14)
    assert p37.b_inf == pytest.approx(0.778281, abs=1e-6)
    assert math.isinf(p37.p_JL)
    assert p37.regime == Regime.SUBCRITICAL
    assert p37.b_inf < p37.b0


def test_n5_p3_is_critical(p53):
    assert p53.alpha == 1.0
    assert p53.b0 == pytest.approx(math.sqrt(2), rel=1e-14)
    assert p53.b_inf == pytest.approx(math.sqrt(2), rel=1e-14)
    assert p53.regime == Regime.CRITICAL
    assert p53.shootable


def test_joseph_lundgren():
    params = derive_params(11, 5)
    assert params.p_JL == pytest.approx(1 + 4 / (7 - 2 * math.sqrt(10)), rel=1e-14)
    assert params.p_JL == pytest.approx(6.92217, abs=1e-5)
    assert params.p < params.p_JL
    assert math.isinf(joseph_lundgren(10))


def test_barrier_constants(p37):
    assert p37.beta_NP == pytest.approx(-152 / 36, rel=1e-14)
    assert p37.rho_NP == pytest.approx(1.99252, abs=1e-3)
    assert abs(barrier_T(p37, p37.rho_NP**-2)) < 1e-10


@pytest.mark.parametrize('N,p,regime', [
    (3, 4.0, Regime.UNSUPPORTED),
    (4, 3.0 - 1e-9, Regime.UNSUPPORTED),
    (4, 4.0, Regime.SUBCRITICAL),
    (4, 5.0, Regime.CRITICAL),
    (5, 4.0, Regime.ABOVE),
    (6, 7 / 3, Regime.CRITICAL),
])
def test_regimes(N, p, regime):
    assert derive_params(N, p).regime == regime


@pytest.mark.parametrize('N,p', [(2, 3.0), (3, 1.0), (3, 0.5), (3.5, 7.0), (3, math.inf)])
def test_domain_errors(N, p):
    with pytest.raises(DomainError):
        derive_params(N, p)


def test_random_barrier_quadratic():
    rng = np.random.default_rng(20240611)
    for _ in range(1000):
        N = int(rng.integers(3, 11))
        lo = 1 + 4 / (N - 2)
        hi = min(critical_exponent(N), 20.0)
        p = float(lo + (hi - lo) * rng.uniform(0.01, 1.0))
        params = derive_params(N, p)
        assert params.alpha * (p - 1) == pytest.approx(2, abs=1e-14)
        if not params.shootable:
            continue
        assert barrier_T(params, 0.0) == 1.0
        assert barrier_T(params, 1.0) <= 1e-9
        assert params.beta_NP <= -2 * (N - 2) + 1e-9
        x = params.rho_NP**-2
        assert 0 < x < 1 / (N - 2)
        assert abs(barrier_T(params, x)) < 1e-10
        assert params.rho_NP > 1


def test_u_inf_derivatives(p37):
    rho = np.linspace(0.2, 5.0, 7)
    u, du, ddu = u_inf(p37, rho)
    assert np.allclose(u, p37.b_inf * rho**(-1 / 3))
    assert np.allclose(du, -u / (3 * rho))
    assert np.allclose(ddu, (1 / 3) * (4 / 3) * u / rho**2)


def test_closed_form_values(p53):
    u0 = cubic_closed_form(p53, 0.0)[0]
    assert u0 == pytest.approx(4 * math.sqrt(2), rel=1e-15)
    u1, du1, _ = cubic_closed_form(p53, 1.0)
    assert u1 == pytest.approx(p53.b0, rel=1e-15)
    assert du1 == pytest.approx(-3 * math.sqrt(2) / 2, rel=1e-15)
    with pytest.raises(DomainError):
        cubic_closed_form(derive_params(3, 7), 0.5)


def test_amplitude_bound_above_u_inf(p37):
    rho = np.linspace(0.1, 0.9, 9)
    assert np.all(amplitude_bound(p37, rho) > u_inf(p37, rho)[0])


def test_lyapunov_floor_attained_by_constant(p37):
    st = State(rho=0.5, u=p37.b0, du=0.0)
    assert lyapunov_H(p37, st) == pytest.approx(lyapunov_floor(p37), rel=1e-12)
    assert lyapunov_H(p37, State(0.5, 0.3, 0.1)) > lyapunov_floor(p37)
