import math

import pytest
from hypothesis import given, settings, strategies as st

from rabidft.adiabatic import (
    bounds_suite,
    correlation_breakdown,
    correlation_integral,
    correlation_integral_direct,
    coupling_expectation,
    exchange_energy_check,
    explicit_part,
    functional_reconstruction_check,
)
from rabidft.functionals import levy_lieb
from rabidft.params import DensityPair, ModelParams, ParameterError
from rabidft.quadrature import QuadratureSpec, integrate_samples, nodes

# frozen from oracles.functional: 3⟨σ_z x⟩ at the optimizer of F(0.6, 0), λg = 3
COUPLING_S06 = -5.631511180421672
# frozen from oracles.converged_ground: E(0,0) at λg = 9 minus the explicit part
I_S0_L3 = 0.9937885756668337

P3 = ModelParams(1, 1, 3)
Q129 = QuadratureSpec("simpson", 129)


def test_quadrature_exact_for_cubics():
    q = QuadratureSpec("simpson", 9)
    x = nodes(0, 2, q)
    res = integrate_samples(x**3 - x, 0, 2, q)
    assert res.value == pytest.approx(2.0, abs=1e-14)
    assert res.error == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ParameterError):
        QuadratureSpec("simpson", 8)


def test_quadrature_error_estimate_tracks_true_error():
    q = QuadratureSpec("simpson", 17)
    x = nodes(0, 1, q)
    res = integrate_samples(x**6 * 7, 0, 1, q)
    assert abs(res.value - 1.0) <= 2 * res.error


def test_coupling_expectation():
    assert coupling_expectation(0.6, 0.0, P3) == 0.0
    assert coupling_expectation(0.6, 1.0, P3) == pytest.approx(COUPLING_S06, abs=1e-8)
    # strongly coupled: -νg²(1-σ²)/ω²
    assert coupling_expectation(0.6, 5.0, P3) == pytest.approx(-5 * 9 * 0.64, rel=1e-3)
    with pytest.raises(ParameterError):
        coupling_expectation(0.6, -1.0, P3)


def test_correlation_integral_values():
    assert correlation_integral(0.3, 0.0, P3).value == 0.0
    assert correlation_integral(1.0, 2.0, P3).value == 0.0
    res = correlation_integral(0.0, 3.0, P3)
    assert res.value == pytest.approx(I_S0_L3, abs=5e-6)
    assert correlation_integral_direct(0.0, 3.0, P3) == pytest.approx(I_S0_L3, abs=1e-9)
    assert 0 <= res.value <= min(81 / 2, 1 - math.exp(-81))


def test_functional_reconstruction():
    assert abs(functional_reconstruction_check(0.6, 0.0, 0.0, P3)) < 1e-9
    for xi in (0.0, 0.7):
        assert abs(functional_reconstruction_check(0.6, xi, 1.0, P3, Q129)) < 5e-6


def test_direct_integral_is_xi_independent():
    p = P3.with_lambda(1.0)
    for xi in (-0.5, 0.7):
        target = DensityPair(0.6, xi)
        direct = levy_lieb(target, p).value - explicit_part(target, p)
        assert direct == pytest.approx(correlation_integral_direct(0.6, 1.0, P3), abs=1e-9)


def test_breakdown():
    br = correlation_breakdown(0.4, 0.0, P3)
    assert (br.I, br.G, br.Pc, br.Tc, br.Wc) == (0.0, 0.0, 0.0, 0.0, 0.0)
    br = correlation_breakdown(0.0, 1.0, P3, QuadratureSpec("simpson", 33))
    assert -9 / 2 <= br.G <= 0
    assert br.I == pytest.approx(correlation_integral_direct(0.0, 1.0, P3), abs=1e-9)
    assert abs(br.quad_residual) <= max(10 * br.quad_error, 1e-7)
    br = correlation_breakdown(0.6, 2.0, P3, QuadratureSpec("simpson", 33))
    assert br.Tc >= 0


def test_exchange_vanishes():
    assert abs(exchange_energy_check(0.0, 0.0, P3)) < 1e-6
    assert abs(exchange_energy_check(0.6, 1.0, P3)) < 1e-5
    h = 1e-2
    target = DensityPair(0.6, 1.0)
    slope = (levy_lieb(target, P3.with_lambda(h)).value - levy_lieb(target, P3.with_lambda(0)).value) / h
    assert slope == pytest.approx(3 * 0.6 * 1.0, abs=10 * h * 9)


def test_bounds_boundary_and_weak_coupling():
    rep = bounds_suite(1.0, 2.0, P3, QuadratureSpec("simpson", 17))
    assert rep.I == 0.0 and rep.passed
    p = ModelParams(1, 1, 1)
    for s in (0.0, 0.5):
        rep = bounds_suite(s, 0.1, p, QuadratureSpec("simpson", 17))
        assert rep.passed
        assert rep.I <= 0.005 * (1 - s * s) + 1e-12


@given(sigma=st.floats(-0.9, 0.9), lam=st.floats(0.05, 2.0))
@settings(max_examples=6, deadline=None)
def test_bounds_random(sigma, lam):
    assert bounds_suite(sigma, lam, ModelParams(1, 1, 1.5), QuadratureSpec("simpson", 33)).passed
