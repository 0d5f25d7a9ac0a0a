"""Problem validation, potential evaluation, and the Q-integrals."""

import math

import numpy as np
import pytest

from sltrace import (DomainError, NonFiniteError, OrderingError,
                     PotentialSpec, ProblemSpec, ZeroScalarError, compute_Q,
                     is_globally_polynomial, q_eval, q_integral,
                     validate_problem)
from sltrace.problem import (q_derivative, q_eval_convention,
                             q_second_derivative)

from conftest import make_problem


def test_reference_problem_validates():
    p = make_problem([0.0])
    assert p.length == 1.0
    assert p.piece_bounds == ((0.0, 0.3), (0.3, 0.7), (0.7, 1.0))


def test_zero_delta_rejected():
    with pytest.raises(ZeroScalarError):
        make_problem([0.0], delta=0.0)
    with pytest.raises(ZeroScalarError):
        make_problem([0.0], gamma=0.0)


def test_bad_ordering_rejected():
    with pytest.raises(OrderingError):
        make_problem([0.0], c1=0.8, c2=0.7)
    with pytest.raises(OrderingError):
        make_problem([0.0], a=1.0, b=0.0)


def test_nonfinite_rejected():
    with pytest.raises(NonFiniteError):
        make_problem([0.0], h=math.nan)
    with pytest.raises(NonFiniteError):
        make_problem([math.inf])


def test_polynomial_eval_and_sides():
    # pieces 0, x, 1: jumps at both interfaces
    p = make_problem(pieces=[[0.0], [0.0, 1.0], [1.0]])
    assert q_eval(p, 0.1) == 0.0
    assert q_eval(p, 0.3, side="left") == 0.0
    assert q_eval(p, 0.3, side="right") == 0.3
    assert q_eval(p, 0.7, side="left") == 0.7
    assert q_eval(p, 0.7, side="right") == 1.0
    assert q_eval_convention(p, 0.3, "mean") == pytest.approx(0.15)


def test_derivatives_exact_for_polynomials():
    p = make_problem([1.0, -2.0, 3.0])      # 1 - 2x + 3x^2
    x = 0.5
    assert q_derivative(p, x) == pytest.approx(-2.0 + 6.0 * x, rel=1e-14)
    assert q_second_derivative(p, x) == pytest.approx(6.0, rel=1e-14)


def test_q_integral_exact_and_interface_split():
    p = make_problem(pieces=[[0.0], [0.0, 1.0], [1.0]])
    # across c1: 0 on [0.2, 0.3], then x on [0.3, 0.4]
    want = 0.5 * (0.4 ** 2 - 0.3 ** 2)
    assert q_integral(p, 0.2, 0.4) == pytest.approx(want, rel=1e-14)
    assert q_integral(p, 0.4, 0.2) == pytest.approx(-want, rel=1e-14)
    assert q_integral(p, 0.5, 0.5) == 0.0
    with pytest.raises(DomainError):
        q_integral(p, -0.1, 0.5)


def test_compute_Q_reference_constant():
    q = compute_Q(make_problem([1.0]))
    assert (q.Q1, q.Q2, q.Q3b) == pytest.approx((0.3, 0.4, 0.3), rel=1e-15)
    assert q.total == pytest.approx(1.0, rel=1e-15)


def test_compute_Q_linear():
    q = compute_Q(make_problem([0.0, 1.0]))
    assert q.Q1 == pytest.approx(0.5 * 0.3 ** 2, rel=1e-14)
    assert q.Q2 == pytest.approx(0.5 * (0.7 ** 2 - 0.3 ** 2), rel=1e-14)
    assert q.Q3b == pytest.approx(0.5 * (1.0 - 0.7 ** 2), rel=1e-14)


def test_globally_polynomial_detection():
    assert is_globally_polynomial(make_problem([0.0, 1.0]))
    assert not is_globally_polynomial(
        make_problem(pieces=[[0.0], [1.0], [0.0]]))


def test_callable_mode_interface_limits():
    pot = PotentialSpec.from_callable(
        lambda x: x * x, interface_limits=(9.0, 1.09, 2.49, 49.0))
    p = validate_problem(ProblemSpec(potential=pot, a=0.0, b=1.0, c1=0.3,
                                     c2=0.7, delta=2.0, gamma=3.0, h=0.0))
    assert q_eval(p, 0.5) == pytest.approx(0.25)
    # the declared one-sided limits win at the interfaces
    assert q_eval(p, 0.3, side="left") == 9.0
    assert q_eval(p, 0.3, side="right") == 1.09
    assert q_eval(p, 0.7, side="left") == 2.49
    assert q_eval(p, 0.7, side="right") == 49.0


def test_callable_mode_quadrature_close_to_exact():
    pot = PotentialSpec.from_callable(
        lambda x: math.sin(3.0 * x),
        interface_limits=(math.sin(0.9), math.sin(0.9),
                          math.sin(2.1), math.sin(2.1)))
    p = validate_problem(ProblemSpec(potential=pot, a=0.0, b=1.0, c1=0.3,
                                     c2=0.7, delta=2.0, gamma=3.0, h=0.0))
    want = (1.0 - math.cos(3.0)) / 3.0
    assert q_integral(p, 0.0, 1.0) == pytest.approx(want, abs=1e-9)


def test_with_scalings_and_splits_revalidate():
    p = make_problem([0.0, 1.0])
    moved = p.with_splits(0.2, 0.5)
    assert moved.piece_bounds == ((0.0, 0.2), (0.2, 0.5), (0.5, 1.0))
    flipped = p.with_scalings(-1.0, 2.0)
    assert (flipped.delta, flipped.gamma) == (-1.0, 2.0)
    with pytest.raises(ZeroScalarError):
        p.with_scalings(0.0, 1.0)


def test_q_sup_samples_the_potential():
    p = make_problem([0.0, 0.0, 4.0])     # 4x^2, sup on [0,1] is 4
    assert 3.9 <= p.q_sup <= 4.1


def test_random_polynomial_integrals_match_numpy():
    rng = np.random.default_rng(42)
    for _ in range(25):
        coeffs = rng.uniform(-3.0, 3.0, size=rng.integers(1, 5)).tolist()
        p = make_problem(coeffs)
        lo, hi = sorted(rng.uniform(0.0, 1.0, size=2))
        anti = np.polynomial.polynomial.polyint(coeffs)
        want = (np.polynomial.polynomial.polyval(hi, anti)
                - np.polynomial.polynomial.polyval(lo, anti))
        assert q_integral(p, lo, hi) == pytest.approx(want, abs=1e-13)
