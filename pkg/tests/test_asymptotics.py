"""Large-s expansion coefficients and the eigenvalue asymptotics.

The coefficient formulas are cross-checked against an independent exact
rational-arithmetic evaluation (fractions.Fraction) for the globally linear
potential, and the truncated expansions are checked against the exact
integrator with bounds measured at the printed truncation orders.
"""

import math
from fractions import Fraction as F

import pytest

from sltrace import (DomainError, SmallSError, alpha_coefficients,
                     char_function, compute_K, eig_asymptotic,
                     omega_asymptotic, phi3_asymptotic, propagate_solution)

from conftest import make_problem


def test_coefficients_match_rational_oracle_linear_q():
    # q(x) = x on the reference geometry, all integrals done in Fraction
    Q1, Q2, Q3 = F(9, 200), F(1, 5), F(51, 200)
    qa, qb, qc1, qc2 = F(0), F(1), F(3, 10), F(7, 10)
    dq = F(1)
    a1 = F(1, 2) * (Q1 + Q2 + Q3)
    a2 = F(1, 4) * (qb - qa - Q1 * Q2 - Q3 * (Q1 + Q2))
    a3 = F(1, 8) * (qb * (Q1 + Q2) - dq - dq - qa * Q2
                    + qc1 * (Q1 + Q2) - Q3 * (qa + Q1 * Q2))
    a4 = F(1, 4) * (qc2 * Q1 - dq) + F(1, 8) * qc2 * (Q3 + Q2)
    co = alpha_coefficients(make_problem([0.0, 1.0]))
    assert co.alpha1_b == pytest.approx(float(a1), rel=1e-12)
    assert co.alpha2_b == pytest.approx(float(a2), rel=1e-12)
    assert co.alpha3_b == pytest.approx(float(a3), rel=1e-12)
    assert co.alpha4_b == pytest.approx(float(a4), rel=1e-12)
    assert co.K == pytest.approx(float(2 * (1 + a1)), rel=1e-12)
    assert co.alpha1_prime_b == pytest.approx(0.5, rel=1e-12)


def test_coefficients_vanish_for_free_problem(p_free):
    co = alpha_coefficients(p_free)
    assert (co.alpha1_b, co.alpha2_b, co.alpha3_b, co.alpha4_b) == (
        0.0, 0.0, 0.0, 0.0)
    assert co.K == pytest.approx(2.0)
    assert compute_K(p_free) == pytest.approx(2.0)


def test_side_convention_routes_interface_values():
    # q = 1 only on the middle piece: alpha3 sees q(c1), alpha4 sees q(c2)
    p = make_problem(pieces=[[0.0], [1.0], [0.0]])
    want = {"left": (0.0, 0.05), "right": (0.05, 0.0),
            "mean": (0.025, 0.025)}
    for conv, (a3, a4) in want.items():
        co = alpha_coefficients(p, conv)
        assert co.alpha1_b == pytest.approx(0.2, rel=1e-14)
        assert co.alpha3_b == pytest.approx(a3, abs=1e-15)
        assert co.alpha4_b == pytest.approx(a4, abs=1e-15)
    with pytest.raises(DomainError):
        alpha_coefficients(p, "upwind")


def test_phi3_exact_for_free_problem(p_free):
    for s in (1.0, 2.5, 40.0):
        phi, dphi = phi3_asymptotic(p_free, 1.0, s)
        assert phi == pytest.approx(math.cos(s) / 3.0, rel=1e-14)
        assert dphi == pytest.approx(-s * math.sin(s) / 3.0, rel=1e-14)


def test_phi3_tracks_integrator_for_linear_q(p_linear):
    # truncation error measured at 0.16/s^3 (phi) and 0.31/s^2 (phi');
    # asserted with headroom
    for s in (20.0, 40.0, 80.0):
        bd = propagate_solution(p_linear, s * s, rtol=1e-13, atol=1e-14)
        phi, dphi = phi3_asymptotic(p_linear, 1.0, s)
        assert abs(bd.phi_b - phi) <= 0.5 / s ** 3
        assert abs(bd.dphi_b - dphi) <= 1.0 / s ** 2


def test_phi3_domain_guards(p_linear):
    with pytest.raises(DomainError):
        phi3_asymptotic(p_linear, 0.5, 10.0)    # not past second interface
    with pytest.raises(SmallSError):
        phi3_asymptotic(p_linear, 1.0, 0.5)


def test_omega_asymptotic_value_and_residual(p_const):
    assert omega_asymptotic(p_const, 10.0) == pytest.approx(
        -30.5130795, abs=1e-6)
    for s in (10.0, 20.0, 40.0):
        w = char_function(p_const, s * s, rtol=1e-13, atol=1e-14)
        assert abs(w - omega_asymptotic(p_const, s)) <= 1.0 / s
    with pytest.raises(SmallSError):
        omega_asymptotic(p_const, 1.0)


def test_eig_asymptotic_free_problem(p_free):
    s4, lam4 = eig_asymptotic(p_free, 4)
    assert s4 == pytest.approx(11.086519969331073, rel=1e-15)
    assert lam4 == pytest.approx((3.5 * math.pi) ** 2 + 2.0, rel=1e-15)
    s0, lam0 = eig_asymptotic(p_free, 0)
    assert math.isnan(s0)
    assert lam0 == pytest.approx(math.pi ** 2 / 4.0 + 2.0, rel=1e-15)
    with pytest.raises(IndexError):
        eig_asymptotic(p_free, -1)


def test_eig_asymptotic_offset_tracks_mean_of_q():
    # lambda-form offset K = 2/L + mean(q) * (2/2): for L=1, K = 2 + mean(q)
    assert compute_K(make_problem([1.0])) == pytest.approx(3.0)
    assert compute_K(make_problem([0.0, 1.0])) == pytest.approx(2.5)
