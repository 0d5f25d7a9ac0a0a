"""Large-s expansions of the boundary solution and the characteristic function.

For s = sqrt(lambda) large, the transmitted solution behaves like a cosine
wave whose amplitude and phase corrections are integral functionals of q.
This module evaluates those correction coefficients (alpha1 through alpha4
and the derivative-side companions), the truncated expansions of phi(x) and
phi'(x) past the second interface, the induced expansion of omega, and the
closed eigenvalue asymptotics

    s_n = (n - 1/2) pi / (b - a) + (1 + alpha1(b)) / ((n - 1/2) pi),
    lambda_n = ((n - 1/2) pi / (b - a))^2 + K,
    K = 2 (1 + alpha1(b)) / (b - a).

Everything here is evaluated exactly as the expansion is written, with no
resummation and no correction of its printed term structure: downstream
comparisons measure how well these truncations track the exact solver and
report the observed residual decay instead of assuming it. One consequence
worth knowing up front: the 1/s coefficients carry an explicit dependence
on the interface positions that the exact spectrum provably does not have,
so residuals measured against the exact omega decay one order slower than
the nominal truncation suggests. That mismatch is part of what the
verification harness exists to expose.

One-sided values at the interfaces (q and q' jump there) follow a recorded
side convention: 'left', 'right' or 'mean'. Endpoint values always use the
interior side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SmallSError
from .problem import (
    QIntegrals,
    ValidatedProblem,
    compute_Q,
    q_derivative,
    q_derivative_convention,
    q_eval,
    q_eval_convention,
    q_integral_tail,
    q_second_derivative,
)

_CONVENTIONS = ("left", "right", "mean")


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Correction coefficients at x = b plus the spectral offset K."""

    alpha1_b: float
    alpha2_b: float
    alpha3_b: float
    alpha4_b: float
    alpha1_prime_b: float     # q(b-)/2, needed by the omega expansion
    K: float
    Q: QIntegrals
    side_convention: str


@dataclass(frozen=True)
class _AlphaSet:
    """All coefficients at a point x in (c2, b], derivative companions too."""

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha1_prime: float
    alpha3_prime: float
    alpha4_prime: float


def _check_convention(convention: str) -> None:
    if convention not in _CONVENTIONS:
        raise DomainError(
            f"side convention must be one of {_CONVENTIONS}, "
            f"got {convention!r}")


def _alphas_at(p: ValidatedProblem, x: float,
               convention: str) -> _AlphaSet:
    """Evaluate the coefficient functions at x past the second interface.

    Only q(c1), q(c2) and q'(c2) are two-sided; they follow the requested
    convention. q(a), q'(a) use the right limit, values at x itself use the
    left limit (interior for x = b, two-sided equal otherwise).
    """
    Q = compute_Q(p)
    q1, q2 = Q.Q1, Q.Q2
    q3x = q_integral_tail(p, x)
    qa = q_eval(p, p.a, "right")
    dqa = q_derivative(p, p.a, "right")
    qc1 = q_eval_convention(p, p.c1, convention)
    qc2 = q_eval_convention(p, p.c2, convention)
    dqc2 = q_derivative_convention(p, p.c2, convention)
    qx = q_eval(p, x, "left")
    dqx = q_derivative(p, x, "left")
    ddqx = q_second_derivative(p, x, "left")

    alpha1 = 0.5 * (q1 + q2 + q3x)
    alpha2 = 0.25 * (qx - qa - q1 * q2 - q3x * (q1 + q2))
    alpha3 = 0.125 * (qx * (q1 + q2) - dqx - dqa - qa * q2
                      + qc1 * (q1 + q2) - q3x * (qa + q1 * q2))
    alpha4 = 0.25 * (qc2 * q1 - dqc2) + 0.125 * qc2 * (q3x + q2)
    alpha1_prime = 0.5 * qx
    alpha3_prime = 0.125 * (dqx * (q1 + q2) - ddqx - qx * (qa + q1 * q2))
    alpha4_prime = 0.125 * qc2 * qx
    return _AlphaSet(alpha1, alpha2, alpha3, alpha4,
                     alpha1_prime, alpha3_prime, alpha4_prime)


def alpha_coefficients(p: ValidatedProblem,
                       convention: str = "left") -> AsymptoticCoefficients:
    """Coefficients at x = b together with K and the Q integrals."""
    _check_convention(convention)
    al = _alphas_at(p, p.b, convention)
    Q = compute_Q(p)
    K = 2.0 * (1.0 + al.alpha1) / p.length
    return AsymptoticCoefficients(
        alpha1_b=al.alpha1, alpha2_b=al.alpha2, alpha3_b=al.alpha3,
        alpha4_b=al.alpha4, alpha1_prime_b=al.alpha1_prime, K=K, Q=Q,
        side_convention=convention)


def compute_K(p: ValidatedProblem, convention: str = "left") -> float:
    """Spectral offset K = 2 (1 + alpha1(b)) / (b - a)."""
    _check_convention(convention)
    al = _alphas_at(p, p.b, convention)
    return 2.0 * (1.0 + al.alpha1) / p.length


def phi3_asymptotic(p: ValidatedProblem, x: float, s: float,
                    convention: str = "left"):
    """Truncated (phi(x), phi'(x)) expansions for x in (c2, b], s >= 1.

    phi keeps terms through 1/s^3 and phi' through 1/s^3 of its own
    expansion; the dropped remainders are one order beyond in each.
    """
    _check_convention(convention)
    if not (p.c2 < x <= p.b):
        raise DomainError(f"x={x} outside ({p.c2}, {p.b}]")
    if s < 1.0:
        raise SmallSError(f"s={s} below 1; the expansion is meaningless")
    al = _alphas_at(p, x, convention)
    d = x - p.a
    d2 = x - 2.0 * p.c2 + p.a
    cs, sn = math.cos(s * d), math.sin(s * d)
    cs2, sn2 = math.cos(s * d2), math.sin(s * d2)
    inv = 1.0 / s
    g = 1.0 / p.gamma
    phi = g * (cs + al.alpha1 * sn * inv + al.alpha2 * cs * inv * inv
               + (al.alpha3 * sn + al.alpha4 * sn2) * inv ** 3)
    dphi = g * (-s * sn + al.alpha1 * cs
                + (al.alpha1_prime - al.alpha2) * sn * inv
                + ((al.alpha3 + al.alpha3_prime) * cs
                   + al.alpha4 * cs2) * inv * inv
                + (al.alpha3_prime * sn + al.alpha4_prime * sn2) * inv ** 3)
    return phi, dphi


def omega_asymptotic(p: ValidatedProblem, s: float,
                     convention: str = "left") -> float:
    """Truncated characteristic function through the 1/s term, s > 1."""
    _check_convention(convention)
    if s <= 1.0:
        raise SmallSError(f"s={s} not above 1; the expansion is meaningless")
    al = _alphas_at(p, p.b, convention)
    L = p.length
    d2 = p.b - 2.0 * p.c2 + p.a
    cs, sn = math.cos(s * L), math.sin(s * L)
    bracket = (s * s * cs
               + s * (1.0 + al.alpha1) * sn
               + (al.alpha2 - al.alpha1 - p.h) * cs
               + ((al.alpha3 - p.h * al.alpha1 + al.alpha2
                   - al.alpha1_prime) * sn
                  + al.alpha4 * math.sin(s * d2)) / s)
    return bracket / p.gamma


def eig_asymptotic(p: ValidatedProblem, n: int,
                   convention: str = "left"):
    """Asymptotic (s_n, lambda_n) for index n.

    The s-form needs n >= 1; for n = 0 it is returned as nan and only the
    lambda-form value is meaningful. n < 0 raises IndexError.
    """
    _check_convention(convention)
    if n < 0:
        raise IndexError(f"eigenvalue index must be >= 0, got {n}")
    al = _alphas_at(p, p.b, convention)
    L = p.length
    mu = (n - 0.5) * math.pi / L
    K = 2.0 * (1.0 + al.alpha1) / L
    lam_n = mu * mu + K
    if n == 0:
        return math.nan, lam_n
    s_n = mu + (1.0 + al.alpha1) / ((n - 0.5) * math.pi)
    return s_n, lam_n
