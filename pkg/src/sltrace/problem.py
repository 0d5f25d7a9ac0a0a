"""Problem definition: interval, interfaces, scalings and the potential q.

The operator is -u'' + q(x) u = lambda u on [a, b] with a Neumann condition
u'(a) = 0, the eigenvalue-dependent right condition (lambda - h) u(b) = u'(b),
and two interior interfaces c1 < c2 where (u, u') is rescaled by 1/delta and
delta/gamma respectively.

q is piecewise smooth with the three pieces aligned to [a,c1], [c1,c2], [c2,b].
Pieces are either polynomials (ascending coefficients in the global x
coordinate) or a callable with explicitly supplied one-sided interface limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    DomainError,
    NonFiniteError,
    OrderingError,
    PieceDomainError,
    ZeroScalarError,
)

MAX_POLY_DEGREE = 16          # per-piece degree cap, overridable per call
OVERFLOW_LIMIT = 1e250        # shared with the shooting module
_SIMPSON_TOL = 1e-11          # absolute tolerance, callable-mode quadrature
_FD_STEP_REL = 1e-6           # central-difference step, relative to (b - a)


def _all_finite(*vals: float) -> bool:
    return all(math.isfinite(v) for v in vals)


@dataclass(frozen=True)
class PotentialSpec:
    """Potential description.

    Exactly one of the two modes is active:

    * polynomial mode: ``pieces`` holds three ascending-degree coefficient
      lists, each valid on its subinterval but expressed in global x.
    * callable mode: ``func`` is q(x) for x away from the interfaces and
      ``interface_limits`` supplies the four one-sided values
      (q(c1-), q(c1+), q(c2-), q(c2+)) which a bare callable cannot express.
    """

    pieces: Optional[Tuple[Tuple[float, ...], ...]] = None
    func: Optional[Callable[[float], float]] = None
    interface_limits: Optional[Tuple[float, float, float, float]] = None
    quad_tol: float = _SIMPSON_TOL
    fd_step_rel: float = _FD_STEP_REL
    max_degree: int = MAX_POLY_DEGREE

    @staticmethod
    def polynomial(pieces: Sequence[Sequence[float]],
                   max_degree: int = MAX_POLY_DEGREE) -> "PotentialSpec":
        tup = tuple(tuple(float(c) for c in piece) for piece in pieces)
        return PotentialSpec(pieces=tup, max_degree=max_degree)

    @staticmethod
    def constant(value: float) -> "PotentialSpec":
        v = float(value)
        return PotentialSpec(pieces=((v,), (v,), (v,)))

    @staticmethod
    def from_callable(func: Callable[[float], float],
                      interface_limits: Sequence[float],
                      quad_tol: float = _SIMPSON_TOL,
                      fd_step_rel: float = _FD_STEP_REL) -> "PotentialSpec":
        lims = tuple(float(v) for v in interface_limits)
        if len(lims) != 4:
            raise DomainError("interface_limits must be (c1-, c1+, c2-, c2+)")
        return PotentialSpec(func=func, interface_limits=lims,
                             quad_tol=quad_tol, fd_step_rel=fd_step_rel)

    @property
    def is_polynomial(self) -> bool:
        return self.pieces is not None


@dataclass(frozen=True)
class ProblemSpec:
    """Raw, unvalidated problem data as supplied by the caller."""

    a: float
    b: float
    c1: float
    c2: float
    delta: float
    gamma: float
    h: float
    potential: PotentialSpec


@dataclass(frozen=True)
class ValidatedProblem:
    """Checked problem; all downstream operations require this type.

    Construct via :func:`validate_problem` only.
    """

    a: float
    b: float
    c1: float
    c2: float
    delta: float
    gamma: float
    h: float
    potential: PotentialSpec
    q_sup: float = field(default=0.0)   # sampled sup |q|, see validate_problem

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def piece_bounds(self) -> Tuple[Tuple[float, float], ...]:
        return ((self.a, self.c1), (self.c1, self.c2), (self.c2, self.b))

    def with_scalings(self, delta: float, gamma: float) -> "ValidatedProblem":
        """Same problem with different interface scalings (revalidated)."""
        return validate_problem(ProblemSpec(
            self.a, self.b, self.c1, self.c2, delta, gamma, self.h,
            self.potential))

    def with_h(self, h: float) -> "ValidatedProblem":
        return validate_problem(ProblemSpec(
            self.a, self.b, self.c1, self.c2, self.delta, self.gamma, h,
            self.potential))

    def with_splits(self, c1: float, c2: float) -> "ValidatedProblem":
        """Same data with moved interface points.

        Only meaningful when q is globally defined (a single polynomial used
        for all three pieces); the caller is responsible for that.
        """
        return validate_problem(ProblemSpec(
            self.a, self.b, c1, c2, self.delta, self.gamma, self.h,
            self.potential))


def _piece_index(p: ValidatedProblem, x: float, side: str) -> int:
    """Index of the piece governing x for the requested one-sided limit."""
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if not (p.a <= x <= p.b):
        raise PieceDomainError(f"x={x!r} outside [{p.a!r}, {p.b!r}]")
    if x < p.c1:
        return 0
    if x == p.c1:
        return 0 if side == "left" else 1
    if x < p.c2:
        return 1
    if x == p.c2:
        return 1 if side == "left" else 2
    return 2


def _poly_eval(coeffs: Tuple[float, ...], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def validate_problem(spec: ProblemSpec) -> ValidatedProblem:
    """Check ordering, scalings, finiteness and the potential description."""
    a, b, c1, c2 = spec.a, spec.b, spec.c1, spec.c2
    if not _all_finite(a, b, c1, c2, spec.delta, spec.gamma, spec.h):
        raise NonFiniteError("problem data must be finite")
    if not (a < c1 < c2 < b):
        raise OrderingError(
            f"need a < c1 < c2 < b, got a={a}, c1={c1}, c2={c2}, b={b}")
    if spec.delta == 0.0 or spec.gamma == 0.0:
        raise ZeroScalarError("delta and gamma must be nonzero")

    pot = spec.potential
    if pot.is_polynomial:
        if len(pot.pieces) != 3:
            raise DomainError("potential needs exactly three pieces")
        for k, piece in enumerate(pot.pieces):
            if len(piece) == 0:
                raise DomainError(f"piece {k} has no coefficients")
            if len(piece) - 1 > pot.max_degree:
                raise DomainError(
                    f"piece {k} degree {len(piece) - 1} exceeds cap "
                    f"{pot.max_degree}")
            if not _all_finite(*piece):
                raise NonFiniteError(f"piece {k} has non-finite coefficients")
    else:
        if pot.func is None or pot.interface_limits is None:
            raise DomainError(
                "callable mode requires func and interface_limits")
        if not _all_finite(*pot.interface_limits):
            raise NonFiniteError("interface limits must be finite")

    prelim = ValidatedProblem(float(a), float(b), float(c1), float(c2),
                              float(spec.delta), float(spec.gamma),
                              float(spec.h), pot)
    sup = _sample_sup(prelim)
    if not math.isfinite(sup):
        raise NonFiniteError("q evaluates to a non-finite value")
    return ValidatedProblem(prelim.a, prelim.b, prelim.c1, prelim.c2,
                            prelim.delta, prelim.gamma, prelim.h, pot,
                            q_sup=sup)


def _sample_sup(p: ValidatedProblem, n_per_piece: int = 257) -> float:
    """Sampled sup |q| over [a, b] (documented estimate, not a bound)."""
    sup = 0.0
    for k, (lo, hi) in enumerate(p.piece_bounds):
        xs = np.linspace(lo, hi, n_per_piece)
        for x in xs:
            v = abs(_q_raw(p, k, float(x)))
            if v > sup:
                sup = v
    return sup


def _q_raw(p: ValidatedProblem, piece: int, x: float) -> float:
    """q on the given piece at x, interface limits honored in callable mode."""
    pot = p.potential
    if pot.is_polynomial:
        return _poly_eval(pot.pieces[piece], x)
    lims = pot.interface_limits
    if x == p.c1:
        return lims[0] if piece == 0 else lims[1]
    if x == p.c2:
        return lims[2] if piece == 1 else lims[3]
    return float(pot.func(x))


def q_eval(p: ValidatedProblem, x: float, side: str = "left") -> float:
    """q(x) with the requested one-sided limit at interface points."""
    k = _piece_index(p, x, side)
    v = _q_raw(p, k, x)
    if not math.isfinite(v):
        raise NonFiniteError(f"q({x}) is not finite")
    return v


def q_eval_convention(p: ValidatedProblem, x: float, convention: str) -> float:
    """q(x) under a side convention in {'left', 'right', 'mean'}."""
    if convention == "mean":
        return 0.5 * (q_eval(p, x, "left") + q_eval(p, x, "right"))
    return q_eval(p, x, convention)


def q_derivative(p: ValidatedProblem, x: float, side: str = "left") -> float:
    """q'(x): exact for polynomial pieces, central differences otherwise.

    The finite-difference step is fd_step_rel*(b - a) and sample points are
    kept inside the governing piece (one-sided second-order stencil near the
    piece edges).
    """
    k = _piece_index(p, x, side)
    pot = p.potential
    if pot.is_polynomial:
        der = npoly.polyder(pot.pieces[k])
        return float(npoly.polyval(x, der)) if len(der) else 0.0
    lo, hi = p.piece_bounds[k]
    hstep = pot.fd_step_rel * p.length
    if x - hstep >= lo and x + hstep <= hi:
        return (_q_raw(p, k, x + hstep) - _q_raw(p, k, x - hstep)) / (2 * hstep)
    if x + 2 * hstep <= hi:   # forward second-order
        return (-3 * _q_raw(p, k, x) + 4 * _q_raw(p, k, x + hstep)
                - _q_raw(p, k, x + 2 * hstep)) / (2 * hstep)
    return (3 * _q_raw(p, k, x) - 4 * _q_raw(p, k, x - hstep)
            + _q_raw(p, k, x - 2 * hstep)) / (2 * hstep)


def q_derivative_convention(p: ValidatedProblem, x: float,
                            convention: str) -> float:
    if convention == "mean":
        return 0.5 * (q_derivative(p, x, "left") + q_derivative(p, x, "right"))
    return q_derivative(p, x, convention)


def q_second_derivative(p: ValidatedProblem, x: float,
                        side: str = "left") -> float:
    """q''(x): exact for polynomials, central second difference otherwise."""
    k = _piece_index(p, x, side)
    pot = p.potential
    if pot.is_polynomial:
        der2 = npoly.polyder(pot.pieces[k], 2)
        return float(npoly.polyval(x, der2)) if len(der2) else 0.0
    lo, hi = p.piece_bounds[k]
    hstep = 1e-4 * p.length
    xm = min(max(x, lo + hstep), hi - hstep)
    return (_q_raw(p, k, xm + hstep) - 2 * _q_raw(p, k, xm)
            + _q_raw(p, k, xm - hstep)) / (hstep * hstep)


def _adaptive_simpson(f, lo: float, hi: float, tol: float) -> float:
    """Plain recursive Simpson with the standard 1/15 error criterion."""
    def simp(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, tol_here, depth):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        if not (math.isfinite(fl) and math.isfinite(fr)):
            raise NonFiniteError("q returned a non-finite value in quadrature")
        left = simp(x0, xm, f0, fl, f1)
        right = simp(xm, x2, f1, fr, f2)
        if depth > 48 or abs(left + right - whole) <= 15.0 * tol_here:
            return left + right + (left + right - whole) / 15.0
        return (recurse(x0, xm, f0, fl, f1, left, 0.5 * tol_here, depth + 1)
                + recurse(xm, x2, f1, fr, f2, right, 0.5 * tol_here, depth + 1))

    if lo == hi:
        return 0.0
    f0, f1, f2 = f(lo), f(0.5 * (lo + hi)), f(hi)
    if not _all_finite(f0, f1, f2):
        raise NonFiniteError("q returned a non-finite value in quadrature")
    return recurse(lo, hi, f0, f1, f2, simp(lo, hi, f0, f1, f2), tol, 0)


def _piece_integral(p: ValidatedProblem, piece: int, lo: float,
                    hi: float) -> float:
    pot = p.potential
    if pot.is_polynomial:
        anti = npoly.polyint(pot.pieces[piece])
        return float(npoly.polyval(hi, anti) - npoly.polyval(lo, anti))
    return _adaptive_simpson(lambda x: _q_raw(p, piece, x), lo, hi,
                             pot.quad_tol)


def q_integral(p: ValidatedProblem, x0: float, x1: float) -> float:
    """Signed integral of q over [x0, x1], split exactly at the interfaces.

    Polynomial pieces use exact antiderivatives; callable mode uses adaptive
    Simpson quadrature at the module's absolute tolerance.
    """
    if not (p.a <= min(x0, x1) and max(x0, x1) <= p.b):
        raise DomainError(f"integration limits [{x0}, {x1}] outside [a, b]")
    if x0 == x1:
        return 0.0
    sign = 1.0
    if x1 < x0:
        x0, x1 = x1, x0
        sign = -1.0
    total = 0.0
    for k, (lo, hi) in enumerate(p.piece_bounds):
        seg_lo = max(lo, x0)
        seg_hi = min(hi, x1)
        if seg_lo < seg_hi:
            total += _piece_integral(p, k, seg_lo, seg_hi)
    return sign * total


@dataclass(frozen=True)
class QIntegrals:
    """The three interface-aligned integrals of q."""

    Q1: float     # integral over [a, c1]
    Q2: float     # integral over [c1, c2]
    Q3b: float    # integral over [c2, b]

    @property
    def total(self) -> float:
        return self.Q1 + self.Q2 + self.Q3b


def compute_Q(p: ValidatedProblem) -> QIntegrals:
    """Q1, Q2 and Q3(b) for the validated problem."""
    return QIntegrals(
        Q1=_piece_integral(p, 0, p.a, p.c1),
        Q2=_piece_integral(p, 1, p.c1, p.c2),
        Q3b=_piece_integral(p, 2, p.c2, p.b),
    )


def q_integral_tail(p: ValidatedProblem, x: float) -> float:
    """Q3(x) = integral of q over [c2, x] for x in [c2, b]."""
    if not (p.c2 <= x <= p.b):
        raise DomainError(f"x={x} outside [c2, b]")
    return _piece_integral(p, 2, p.c2, x)


def is_globally_polynomial(p: ValidatedProblem) -> bool:
    """True when all three pieces share one coefficient list.

    This is the single-polynomial mode required by split-sensitivity
    operations: q is then defined on all of [a, b] independent of (c1, c2).
    """
    pot = p.potential
    if not pot.is_polynomial:
        return False
    ref = pot.pieces[0]
    return all(piece == ref for piece in pot.pieces[1:])
