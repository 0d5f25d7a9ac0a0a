"""Regularized first-trace series and its closed-form counterpart.

The series sums lambda_n - mu_n^2 - K over the spectrum, where
mu_n = (n - 1/2) pi / (b - a) and K is the asymptotic offset from the
eigenvalue expansion. Partial sums are extended by a fitted tail model,
and the total is compared against the closed-form right-hand side

    h - 1/2 - 2/L - pi^2/(4 L^2) - (q(b) - q(a))/4
      - (Q1 + Q2 + Q3)/L - (Q1^2 + Q2^2 + Q3^2)/8.

Two summation conventions are supported: "theorem" regularizes every
term from n = 0, "series31" adds lambda_0 bare and regularizes from
n = 1. They differ by the constant pi^2/(4 L^2) + K.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.special import polygamma

from .asymptotics import compute_K
from .errors import DomainError, FitFailure, IndexGap, StabilityWarning
from .problem import (ValidatedProblem, compute_Q, is_globally_polynomial,
                      q_eval, q_integral)
from .spectrum import EigenvalueRecord, compute_spectrum

__all__ = [
    "TraceReport",
    "CONVENTIONS",
    "trace_term",
    "partial_sums",
    "tail_extrapolate",
    "trace_closed_form",
    "trace_closed_form_splits",
    "trace_report",
    "conversion_constant",
]

CONVENTIONS = ("theorem", "series31")

# fit window must keep at least this many terms
_MIN_TERMS = 32


@dataclass(frozen=True)
class TraceReport:
    """Everything one trace run produces, ready for serialization."""

    convention: str
    n_terms: int
    partial_sum: float
    tail_estimate: float
    tail_uncertainty: float
    total: float
    closed_form_rhs: float
    deviation: float
    stability: float
    per_term_table: Tuple[Tuple[int, float], ...]


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise DomainError(
            f"unknown summation convention {convention!r}; "
            f"expected one of {CONVENTIONS}")


def conversion_constant(p: ValidatedProblem) -> float:
    """theorem-total minus series31-total: the n=0 regularization terms."""
    L = p.length
    return -(math.pi ** 2 / (4.0 * L * L) + compute_K(p))


def trace_term(p: ValidatedProblem, record: EigenvalueRecord) -> float:
    """Regularized term lambda_n - ((n - 1/2) pi / L)^2 - K.

    For positive eigenvalues the difference is formed as
    (s - mu)(s + mu) - K: s and mu agree to ~1/n, so the subtraction is
    exact and the term keeps full precision even at n in the thousands.
    """
    n = record.n
    if n < 0:
        raise DomainError(
            "record carries no certified index (n = -1); trace terms "
            "need the position in the spectrum")
    L = p.length
    K = compute_K(p)
    mu = (n - 0.5) * math.pi / L
    if record.lam > 0.0:
        return (record.s - mu) * (record.s + mu) - K
    return record.lam - mu * mu - K


def _term_sequence(p: ValidatedProblem,
                   records: Sequence[EigenvalueRecord],
                   convention: str) -> List[float]:
    for i, rec in enumerate(records):
        if rec.n != i:
            raise IndexGap(
                f"records must be consecutive from n=0; position {i} "
                f"holds index {rec.n}")
    terms = [trace_term(p, rec) for rec in records]
    if convention == "series31" and terms:
        terms[0] = records[0].lam
    return terms


def partial_sums(p: ValidatedProblem,
                 records: Sequence[EigenvalueRecord],
                 convention: str = "theorem") -> List[float]:
    """Running sums of the regularized series in ascending n."""
    _check_convention(convention)
    if not records:
        raise DomainError("no records to sum")
    return list(itertools.accumulate(_term_sequence(p, records, convention)))


def tail_extrapolate(terms: Iterable[Tuple[int, float]]
                     ) -> Tuple[float, float]:
    """Analytic tail of the series beyond the last computed term.

    Fits t_n ~ A/(n-1/2)^2 + B/(n-1/2)^3 on the top half of the indices
    and sums the fitted model over all larger n with polygamma closed
    forms. Returns (tail, uncertainty); the uncertainty is the larger of
    the in-window misfit and the whole cubic correction.
    """
    data = sorted(terms)
    if len(data) < _MIN_TERMS:
        raise FitFailure(
            f"need at least {_MIN_TERMS} terms to fit a tail, "
            f"got {len(data)}")
    window = data[len(data) // 2:]
    ns = np.array([float(n) for n, _ in window])
    ts = np.array([t for _, t in window])
    if not (np.all(np.isfinite(ns)) and np.all(np.isfinite(ts))):
        raise FitFailure("non-finite terms in the fit window")
    x = 1.0 / (ns - 0.5)
    design = np.column_stack([x * x, x ** 3])
    coef, _, rank, _ = np.linalg.lstsq(design, ts, rcond=None)
    if rank < 2:
        raise FitFailure("degenerate fit window (rank-deficient design)")
    a_fit, b_fit = float(coef[0]), float(coef[1])
    misfit = float(np.max(np.abs(design @ coef - ts)))

    n_last = data[-1][0]
    # sum_{n > n_last} (n-1/2)^-2 and (n-1/2)^-3 in closed form
    quad_tail = float(polygamma(1, n_last + 0.5))
    cube_tail = float(-0.5 * polygamma(2, n_last + 0.5))
    tail = a_fit * quad_tail + b_fit * cube_tail
    uncertainty = max(misfit * len(window), abs(b_fit * cube_tail))
    if not (math.isfinite(tail) and math.isfinite(uncertainty)):
        raise FitFailure("tail model produced non-finite values")
    return tail, uncertainty


def _rhs_from_integrals(p: ValidatedProblem, q1: float, q2: float,
                        q3: float) -> float:
    L = p.length
    qa = q_eval(p, p.a, side="right")
    qb = q_eval(p, p.b, side="left")
    return (p.h - 0.5 - 2.0 / L - math.pi ** 2 / (4.0 * L * L)
            - 0.25 * (qb - qa)
            - (q1 + q2 + q3) / L
            - 0.125 * (q1 * q1 + q2 * q2 + q3 * q3))


def trace_closed_form(p: ValidatedProblem) -> float:
    """Closed-form value the regularized trace is claimed to equal."""
    q = compute_Q(p)
    return _rhs_from_integrals(p, q.Q1, q.Q2, q.Q3b)


def trace_closed_form_splits(p: ValidatedProblem, c1p: float,
                             c2p: float) -> float:
    """Closed form re-evaluated with the Q-integrals split at (c1p, c2p).

    Only the squared-integral term depends on the splits, so the spread
    of this function over split choices measures the formula's
    split-dependence. Requires a globally defined (single-polynomial)
    potential, otherwise moving the splits changes q itself.
    """
    if not is_globally_polynomial(p):
        raise DomainError(
            "split re-evaluation needs a globally defined polynomial "
            "potential")
    if not (p.a <= c1p <= c2p <= p.b):
        raise DomainError(
            f"splits must satisfy a <= c1' <= c2' <= b, got "
            f"({c1p}, {c2p}) in [{p.a}, {p.b}]")
    q1 = q_integral(p, p.a, c1p)
    q2 = q_integral(p, c1p, c2p)
    q3 = q_integral(p, c2p, p.b)
    return _rhs_from_integrals(p, q1, q2, q3)


def _assemble(p: ValidatedProblem, records: Sequence[EigenvalueRecord],
              convention: str) -> Tuple[float, float, float, List[float]]:
    terms = _term_sequence(p, records, convention)
    table = list(zip(range(len(terms)), terms))
    partial = list(itertools.accumulate(terms))[-1]
    tail, unc = tail_extrapolate(table)
    return partial, tail, unc, terms


def trace_report(p: ValidatedProblem, n_terms: int,
                 convention: str = "theorem") -> TraceReport:
    """Full trace run: spectrum, partial sum, tail fit, closed form.

    Deterministic for fixed inputs; summation is in ascending n. The
    stability figure compares the extrapolated total against the same
    computation on the first half of the terms, and a StabilityWarning
    fires when it exceeds ten times the tail uncertainty.
    """
    _check_convention(convention)
    if n_terms < 64:
        raise DomainError(f"n_terms must be at least 64, got {n_terms}")
    records = compute_spectrum(p, n_terms)
    partial, tail, unc, terms = _assemble(p, records, convention)
    total = partial + tail

    half = records[:n_terms // 2]
    h_partial, h_tail, _, _ = _assemble(p, half, convention)
    stability = abs(total - (h_partial + h_tail))

    rhs = trace_closed_form(p)
    report = TraceReport(
        convention=convention,
        n_terms=n_terms,
        partial_sum=partial,
        tail_estimate=tail,
        tail_uncertainty=unc,
        total=total,
        closed_form_rhs=rhs,
        deviation=total - rhs,
        stability=stability,
        per_term_table=tuple(zip(range(len(terms)), terms)),
    )
    if stability > 10.0 * unc:
        warnings.warn(
            f"trace total moved by {stability:.3e} between N/2 and N "
            f"terms against a tail uncertainty of {unc:.3e}",
            StabilityWarning)
    return report
