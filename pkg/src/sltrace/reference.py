"""Closed-form oracles, independent of the shooting pipeline.

For q identically zero the characteristic function has an elementary
form, so its roots can be found by bracketed scalar root-finding with
no ODE integration at all. These oracles anchor the test suite and the
`verify` subcommand. The factorization comparator checks the gamma-
scaling identity between two full shooting runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from scipy.optimize import brentq

from .errors import DomainError, ZeroScalarError
from .problem import ValidatedProblem
from .shooting import char_function

__all__ = [
    "OracleRoot",
    "oracle_omega_qzero",
    "oracle_eigs_qzero",
    "factorization_check",
]

# cosh overflows past ~710; only the sign survives out there
_COSH_ARG_MAX = 700.0

_EPS = math.ulp(1.0)


@dataclass(frozen=True)
class OracleRoot:
    """One root of the q=0 characteristic equation.

    s_or_t holds the trig root s = sqrt(lambda) for lambda >= 0 and the
    hyperbolic root t = sqrt(-lambda) for lambda < 0.
    """

    n: int
    s_or_t: float
    lam: float
    equation_residual: float


def oracle_omega_qzero(L: float, gamma: float, h: float,
                       lam: float) -> float:
    """Characteristic function for q = 0 in closed form.

    (1/gamma) [(lambda - h) cos(sL) + s sin(sL)] for lambda = s^2 >= 0;
    for lambda < 0 the same expression continues to
    (1/gamma) [(lambda - h) cosh(tL) - t sinh(tL)] with t = sqrt(-lambda),
    evaluated with cosh factored out so the bracket never cancels
    catastrophically.
    """
    if L <= 0.0:
        raise DomainError(f"need L > 0, got {L}")
    if gamma == 0.0:
        raise ZeroScalarError("gamma must be nonzero")
    if lam >= 0.0:
        s = math.sqrt(lam)
        return ((lam - h) * math.cos(s * L) + s * math.sin(s * L)) / gamma
    t = math.sqrt(-lam)
    bracket = (lam - h) - t * math.tanh(t * L)
    arg = t * L
    if arg > _COSH_ARG_MAX:
        if bracket == 0.0:
            return 0.0
        return math.copysign(math.inf, bracket / gamma)
    return math.cosh(arg) * bracket / gamma


def _qzero_negative_root(L: float, h: float) -> float:
    """The unique t > 0 with (−t²−h) = t tanh(tL); exists iff h < 0."""
    edge = math.sqrt(-h)
    f = lambda t: (-t * t - h) - t * math.tanh(t * L)
    return brentq(f, 0.0, edge, xtol=1e-15, rtol=8.0 * _EPS)


def oracle_eigs_qzero(L: float, h: float, count: int) -> List[OracleRoot]:
    """The lowest `count` eigenvalues of the q = 0 problem.

    Roots of the closed-form characteristic equation, found by scanning
    for sign changes and polishing each bracket; includes the single
    negative root when h < 0 and the lambda = 0 root when h = 0.
    """
    if L <= 0.0:
        raise DomainError(f"need L > 0, got {L}")
    if count < 1:
        raise DomainError(f"need count >= 1, got {count}")
    found: List[Tuple[float, float]] = []   # (lam, s_or_t)
    if h < 0.0:
        t = _qzero_negative_root(L, h)
        found.append((-t * t, t))
    if h == 0.0:
        found.append((0.0, 0.0))

    f = lambda s: (s * s - h) * math.cos(s * L) + s * math.sin(s * L)
    step = math.pi / (16.0 * L)
    s_lo = 0.0
    f_lo = f(s_lo)
    while sum(1 for lam, _ in found if lam > 0.0) < count:
        s_hi = s_lo + step
        f_hi = f(s_hi)
        if f_hi == 0.0:
            found.append((s_hi * s_hi, s_hi))
        elif f_lo * f_hi < 0.0:
            root = brentq(f, s_lo, s_hi, xtol=1e-15, rtol=8.0 * _EPS)
            found.append((root * root, root))
        s_lo, f_lo = s_hi, f_hi

    found.sort()
    out = []
    for n, (lam, sot) in enumerate(found[:count]):
        resid = abs(oracle_omega_qzero(L, 1.0, h, lam)) / (1.0 + abs(lam))
        out.append(OracleRoot(n=n, s_or_t=sot, lam=lam,
                              equation_residual=resid))
    return out


def factorization_check(p: ValidatedProblem,
                        lambda_grid: Sequence[float]) -> float:
    """Worst normalized defect of gamma * omega_{delta,gamma} = omega_{1,1}.

    Both sides come from full shooting runs on the same q and h; the
    identity holds exactly in real arithmetic for every lambda, so the
    returned figure is pure numerical error.
    """
    grid = list(lambda_grid)
    if not grid:
        raise DomainError("lambda grid must be nonempty")
    p11 = p.with_scalings(1.0, 1.0)
    worst = 0.0
    for lam in grid:
        w = char_function(p, lam)
        w11 = char_function(p11, lam)
        worst = max(worst, abs(p.gamma * w - w11) / (1.0 + abs(w11)))
    return worst
