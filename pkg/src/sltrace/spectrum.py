"""Eigenvalue location with certified indexing: scan, bracket, refine, count.

The scan lays a grid that is uniform in s = sqrt(lambda) above zero (step
pi/(8(b-a))) and uniform in lambda below (200 points), evaluates omega on
the whole grid in one sweep, and collects sign-change brackets. The
counting phase Phi says how many eigenvalues the range actually holds, so
a hidden pair between grid points shows up as a count mismatch and drives
up to four grid-doubling retries before the scan gives up loudly.

Refinement runs every bracket at once with a lockstep Illinois iteration,
in the s variable for non-negative brackets (the trace module needs s at
full precision) and in lambda otherwise, driving each bracket down to a
few units in the last place. Certification then re-counts eigenvalues
between consecutive root midpoints from the counting phase: exactly one
per gap, one below the smallest root. Records are certified only when
every gap agrees.

The scanned range is half-open: a root exactly at lambda_min belongs to
the interval below and is neither bracketed nor counted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .asymptotics import eig_asymptotic
from .errors import (
    BudgetExceeded,
    CertificationFailure,
    DomainError,
    MonotonicityWarning,
    MultiplicityWarning,
    NonFiniteError,
    NoSignChange,
)
from .problem import ValidatedProblem
from .sweep import SweepPlan, build_sweep_plan, counting_phase_batch, \
    omega_batch, sweep

_SNAP = 1e-9        # floor-count guard against roots sitting on grid points
_MAX_REFINE = 4
_FLAT_RATIO = 1e-6  # multiplicity heuristic threshold


@dataclass(frozen=True)
class EigenvalueRecord:
    """One located eigenvalue.

    s is sqrt(lambda) for lambda >= 0 and -sqrt(-lambda) otherwise (the
    sign marks the negative branch while keeping the magnitude exact).
    residual is |omega| at lambda in the sweep's rescaled units. n is -1
    when the record was refined standalone and no index has been certified.
    """

    n: int
    lam: float
    s: float
    residual: float
    bracket: Tuple[float, float]
    certified: bool


def _s_of(lam: float) -> float:
    return math.sqrt(lam) if lam >= 0.0 else -math.sqrt(-lam)


def default_lambda_min(p: ValidatedProblem) -> float:
    """Generous heuristic scan floor; no sharp lower bound is available."""
    return -((p.q_sup + abs(p.h) + 1.0) ** 2)


def _scan_grid(p: ValidatedProblem, lam_min: float, lam_max: float,
               level: int) -> np.ndarray:
    parts = [np.array([lam_min, lam_max])]
    if lam_min < 0.0:
        n_neg = 200 * (1 << level)
        parts.append(np.linspace(lam_min, min(0.0, lam_max), n_neg))
    if lam_max > 0.0:
        ds = math.pi / (8.0 * p.length * (1 << level))
        k0 = 1
        if lam_min > 0.0:
            k0 = int(math.floor(math.sqrt(lam_min) / ds)) + 1
        k1 = int(math.ceil(math.sqrt(lam_max) / ds))
        pos = (np.arange(k0, k1 + 1) * ds) ** 2
        parts.append(pos)
    grid = np.unique(np.concatenate(parts))
    return grid[(grid >= lam_min) & (grid <= lam_max)]


def _extract_brackets(grid: np.ndarray,
                      om: np.ndarray) -> List[Tuple[float, float]]:
    sg = np.sign(om)
    out: List[Tuple[float, float]] = []
    for i in np.nonzero(sg == 0.0)[0]:
        if i == 0:
            continue   # half-open range: a root at lambda_min is excluded
        lo = 0.5 * (grid[i - 1] + grid[i])
        if i + 1 < grid.size:
            hi = 0.5 * (grid[i] + grid[i + 1])
        else:
            hi = grid[i] + 0.5 * (grid[i] - grid[i - 1])
        out.append((float(lo), float(hi)))
    for i in np.nonzero(sg[:-1] * sg[1:] < 0.0)[0]:
        out.append((float(grid[i]), float(grid[i + 1])))
    out.sort()
    return out


def scan_sign_changes(p: ValidatedProblem, lambda_min: float,
                      lambda_max: float,
                      plan: Optional[SweepPlan] = None,
                      max_refine: int = _MAX_REFINE
                      ) -> List[Tuple[float, float]]:
    """All sign-change brackets of omega on (lambda_min, lambda_max].

    The bracket census is validated against the counting-phase total for
    the range; on mismatch the grid is doubled up to max_refine times,
    then BudgetExceeded carries the persistent disagreement.
    """
    if not (math.isfinite(lambda_min) and math.isfinite(lambda_max)):
        raise NonFiniteError("scan range must be finite")
    if lambda_min >= lambda_max:
        raise DomainError(
            f"need lambda_min < lambda_max, got [{lambda_min}, {lambda_max}]")
    if plan is None:
        plan = build_sweep_plan(p, lam_floor=min(2.0 * lambda_min, -1.0))
    mismatch = None
    for level in range(max_refine + 1):
        grid = _scan_grid(p, lambda_min, lambda_max, level)
        res = sweep(plan, grid, with_angle=True)
        phi = counting_phase_batch(grid, p.h, res.chi_b)
        # the normalization frame max(1, sqrt|lam|) drifts with lam, so in
        # hyperbolic stretches (no physical phase advance) phi may wobble
        # by ~1e-4; counting reads phi only at range ends and mid-gap
        # points, far from integers, so warn only on decreases big enough
        # to threaten a floor evaluation
        if np.any(np.diff(phi) < -1e-3):
            warnings.warn(
                "counting phase decreased along the scan grid",
                MonotonicityWarning)
        brackets = _extract_brackets(grid, res.omega)
        expected = int(math.floor(phi[-1] + _SNAP)
                       - math.floor(phi[0] + _SNAP))
        if expected == len(brackets):
            return brackets
        mismatch = (level, expected, len(brackets))
    raise BudgetExceeded(
        f"scan of [{lambda_min}, {lambda_max}] still counts "
        f"{mismatch[1]} eigenvalues against {mismatch[2]} brackets after "
        f"{max_refine} grid doublings")


def _illinois_batch(fn, lo, hi, max_iter: int = 96):
    """Lockstep bracketing secant (Illinois) on a batch of brackets.

    fn maps an abscissa vector to f values (active subset only). Returns
    (root, f_at_root, a, b) with [a, b] the final sign-change bracket per
    column. Stops per column at a width of a few ulps.
    """
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    fa = np.asarray(fn(a), dtype=float).copy()
    fb = np.asarray(fn(b), dtype=float).copy()
    n = a.size
    root = np.zeros(n)
    fres = np.zeros(n)
    done = np.zeros(n, dtype=bool)

    exact = fa == 0.0
    root[exact] = a[exact]
    done |= exact
    exact = (fb == 0.0) & ~done
    root[exact] = b[exact]
    done |= exact
    bad = ~done & (np.sign(fa) * np.sign(fb) > 0.0)
    if bad.any():
        raise NoSignChange(
            f"{int(bad.sum())} bracket(s) without a sign change")

    for _ in range(max_iter):
        act = np.nonzero(~done)[0]
        if act.size == 0:
            break
        ai, bi = a[act], b[act]
        fai, fbi = fa[act], fb[act]
        lim = 4.0 * np.spacing(np.maximum(np.abs(ai), np.abs(bi)))
        conv = np.abs(bi - ai) <= lim
        if conv.any():
            sel = act[conv]
            pick = np.abs(fa[sel]) <= np.abs(fb[sel])
            root[sel] = np.where(pick, a[sel], b[sel])
            fres[sel] = np.where(pick, fa[sel], fb[sel])
            done[sel] = True
            keep = ~conv
            act, ai, bi, fai, fbi = (act[keep], ai[keep], bi[keep],
                                     fai[keep], fbi[keep])
            if act.size == 0:
                break
        x = bi - fbi * (bi - ai) / (fbi - fai)
        inner_lo = np.minimum(ai, bi)
        inner_hi = np.maximum(ai, bi)
        repair = ~np.isfinite(x) | (x <= inner_lo) | (x >= inner_hi)
        x[repair] = 0.5 * (ai[repair] + bi[repair])
        fx = np.asarray(fn(x), dtype=float)

        hit = fx == 0.0
        if hit.any():
            sel = act[hit]
            root[sel] = x[hit]
            fres[sel] = 0.0
            done[sel] = True
        live = ~hit
        same = live & (np.sign(fx) == np.sign(fbi))
        if same.any():
            sel = act[same]
            b[sel] = x[same]
            fb[sel] = fx[same]
            fa[sel] = 0.5 * fa[sel]   # halve the stale end: anti-stagnation
        opp = live & ~same
        if opp.any():
            sel = act[opp]
            a[sel] = b[sel]
            fa[sel] = fb[sel]
            b[sel] = x[opp]
            fb[sel] = fx[opp]
    rest = ~done
    if rest.any():   # max_iter safety: report the better end
        pick = np.abs(fa[rest]) <= np.abs(fb[rest])
        root[rest] = np.where(pick, a[rest], b[rest])
        fres[rest] = np.where(pick, fa[rest], fb[rest])
    return root, fres, a, b


def _refine_batch(plan: SweepPlan, brackets):
    """Refine many brackets; returns (lam, residual, bracket_lo, bracket_hi)."""
    lo = np.array([w[0] for w in brackets], dtype=float)
    hi = np.array([w[1] for w in brackets], dtype=float)
    n = lo.size
    lam = np.zeros(n)
    res = np.zeros(n)
    blo = np.zeros(n)
    bhi = np.zeros(n)
    pos = lo >= 0.0
    if pos.any():
        r, fr, aa, bb = _illinois_batch(
            lambda sv: omega_batch(plan, sv * sv),
            np.sqrt(lo[pos]), np.sqrt(hi[pos]))
        lam[pos] = r * r
        res[pos] = np.abs(fr)
        blo[pos] = np.minimum(aa, bb) ** 2
        bhi[pos] = np.maximum(aa, bb) ** 2
    neg = ~pos
    if neg.any():
        r, fr, aa, bb = _illinois_batch(
            lambda lv: omega_batch(plan, lv), lo[neg], hi[neg])
        lam[neg] = r
        res[neg] = np.abs(fr)
        blo[neg] = np.minimum(aa, bb)
        bhi[neg] = np.maximum(aa, bb)
    return lam, res, blo, bhi


def refine_root(p: ValidatedProblem, bracket: Tuple[float, float],
                tol: float = 1e-10,
                plan: Optional[SweepPlan] = None) -> EigenvalueRecord:
    """Refine a single sign-change bracket to |dlam| <= tol*(1+|lam|).

    Returns an index-less record (n = -1, certified False); indexing is
    the spectrum routine's job. Positive brackets are solved in s, which
    in practice lands well inside the requested tolerance.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise DomainError(f"bad bracket ({lo}, {hi})")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    if plan is None:
        plan = build_sweep_plan(p, lam_floor=min(2.0 * lo, -1.0))

    def f(lam_val: float) -> float:
        return float(omega_batch(plan, np.array([lam_val]))[0])

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0 or f_hi == 0.0:
        lam = lo if f_lo == 0.0 else hi
    elif math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise NoSignChange(f"omega has equal signs at {lo} and {hi}")
    elif lo >= 0.0:
        g = lambda sv: f(sv * sv)
        mid = 0.5 * (lo + hi)
        xtol = min(tol * (1.0 + mid) / (2.0 * math.sqrt(mid) + 1.0),
                   1e-14 * (1.0 + math.sqrt(hi)))
        lam = brentq(g, math.sqrt(lo), math.sqrt(hi), xtol=xtol,
                     rtol=4.0 * np.finfo(float).eps, maxiter=200) ** 2
    else:
        xtol = min(tol * (1.0 + abs(lo)), 1e-14 * (1.0 + abs(lo)))
        lam = brentq(f, lo, hi, xtol=xtol,
                     rtol=4.0 * np.finfo(float).eps, maxiter=200)
    return EigenvalueRecord(n=-1, lam=lam, s=_s_of(lam),
                            residual=abs(f(lam)), bracket=(lo, hi),
                            certified=False)


def _certify_counts(p: ValidatedProblem, plan: SweepPlan, lam_min: float,
                    roots: np.ndarray, upper: float):
    """Count eigenvalues between consecutive midpoints; want one per gap."""
    checks = np.empty(roots.size + 1)
    checks[0] = lam_min
    checks[1:-1] = 0.5 * (roots[:-1] + roots[1:])
    checks[-1] = upper
    res = sweep(plan, checks, with_angle=True)
    phi = counting_phase_batch(checks, p.h, res.chi_b)
    floors = np.floor(phi + _SNAP).astype(int)
    gaps = np.diff(floors)
    return gaps, checks


def compute_spectrum(p: ValidatedProblem, count: int, tol: float = 1e-10,
                     lam_min: Optional[float] = None,
                     base_cells: int = 64,
                     strict: bool = True,
                     max_refine: int = _MAX_REFINE
                     ) -> List[EigenvalueRecord]:
    """Lowest `count` eigenvalues with certified 0-based indexing.

    The scan ceiling starts at the asymptotic prediction for index
    count+2 and widens if the bracket census comes up short. Certification
    cross-checks every record against counting-phase totals; on failure
    the records come back uncertified inside CertificationFailure when
    strict (the default), or as return values with certified=False.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if lam_min is None:
        lam_min = default_lambda_min(p)
    plan = build_sweep_plan(p, base_cells=base_cells,
                            lam_floor=min(2.0 * lam_min, -1.0))

    brackets = None
    for attempt in range(3):
        # ceiling from the asymptotic prediction for index count+2, offset
        # to the midpoint of the predicted gap below it: the prediction is
        # accurate to ~1/n^2, so scanning exactly at it would put the range
        # end on top of a root and make the endpoint count unstable
        top = count + 2 + 4 * attempt
        lam_max = 0.5 * (eig_asymptotic(p, top - 1)[1]
                         + eig_asymptotic(p, top)[1])
        lam_max = max(lam_max, 0.5 * lam_min + 1.0, 1.0)
        brackets = scan_sign_changes(p, lam_min, lam_max, plan=plan,
                                     max_refine=max_refine)
        if len(brackets) >= count + 1:
            break
    if len(brackets) < count:
        raise BudgetExceeded(
            f"found only {len(brackets)} eigenvalues up to lambda="
            f"{lam_max:g}, need {count}")

    lam, res, blo, bhi = _refine_batch(plan, brackets)
    order = np.argsort(lam)
    lam, res, blo, bhi = lam[order], res[order], blo[order], bhi[order]

    # multiplicity heuristic: central slope against the local omega scale
    step = np.maximum(1e-7 * (1.0 + np.abs(lam)),
                      0.5 * (bhi - blo))
    f_up = omega_batch(plan, lam + step)
    f_dn = omega_batch(plan, lam - step)
    slope = np.abs(f_up - f_dn) / (2.0 * step)
    scale = (np.abs(f_up) + np.abs(f_dn)) / (2.0 * step) + 1e-300
    for i in np.nonzero(slope < _FLAT_RATIO * scale)[0]:
        warnings.warn(
            f"omega nearly flat at root lambda={lam[i]:.6g}; "
            "the simple-root assumption is suspect there",
            MultiplicityWarning)

    kept = lam[:count]
    upper = (0.5 * (lam[count - 1] + lam[count]) if lam.size > count
             else lam[count - 1] + 0.5 * math.pi ** 2 / p.length ** 2)
    gaps, checks = _certify_counts(p, plan, lam_min, kept, upper)
    residual_ok = res[:count] <= 1e-8 * (1.0 + np.maximum(np.abs(f_up),
                                                          np.abs(f_dn))[:count])
    increasing = bool(np.all(np.diff(kept) > 0.0))
    all_ok = bool(np.all(gaps == 1)) and increasing and bool(
        np.all(residual_ok))

    records = [
        EigenvalueRecord(n=i, lam=float(kept[i]), s=_s_of(float(kept[i])),
                         residual=float(res[i]),
                         bracket=(float(blo[i]), float(bhi[i])),
                         certified=all_ok)
        for i in range(count)]
    if not all_ok:
        diagnostic = {
            "gap_counts": gaps.tolist(),
            "checkpoints": checks.tolist(),
            "monotone": increasing,
            "residual_ok": residual_ok.tolist(),
        }
        if strict:
            raise CertificationFailure(
                "spectrum certification failed: counting-phase totals do "
                "not match the refined roots", records=records,
                diagnostic=diagnostic)
    return records


class ResidualSequence(list):
    """Items (n, lambda_n - lambda_asym(n)) plus fitted decay metadata.

    decay_exponent is the least-squares slope of log|deviation| against
    log(n - 1/2) over the top half of the indices (n = 0 excluded; nan when
    fewer than three usable points). bound_constant is the largest
    |deviation|*(n - 1/2)^2 over n >= 1.
    """

    def __init__(self, items, decay_exponent: float, bound_constant: float):
        super().__init__(items)
        self.decay_exponent = decay_exponent
        self.bound_constant = bound_constant


def asymptotic_residuals(records, p: ValidatedProblem,
                         convention: str = "left") -> ResidualSequence:
    """Per-index deviation from the closed eigenvalue asymptotics."""
    items = []
    for rec in records:
        lam_asym = eig_asymptotic(p, rec.n, convention)[1]
        items.append((rec.n, rec.lam - lam_asym))
    devs = [(n, d) for n, d in items if n >= 1]
    bound = max((abs(d) * (n - 0.5) ** 2 for n, d in devs), default=math.nan)
    top = [(n, abs(d)) for n, d in devs[len(devs) // 2:] if d != 0.0]
    if len(top) >= 3:
        xs = np.log([n - 0.5 for n, _ in top])
        ys = np.log([d for _, d in top])
        exponent = float(np.polyfit(xs, ys, 1)[0])
    else:
        exponent = math.nan
    return ResidualSequence(items, exponent, bound)
