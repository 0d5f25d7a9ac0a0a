"""Batch evaluation of the characteristic function over lambda grids.

The shooting module integrates one lambda at a time with an adaptive pair;
scans and lockstep root refinement need omega on thousands of lambdas at
once. This engine freezes q to its average on each mesh cell and applies
the exact constant-coefficient propagator to the whole batch:

    u+  = c u + w slh u'
    u+' = -(lam - qbar) w slh u + c u'

with w the cell width, z = (lam - qbar) w^2, c = cos(sqrt z) (cosh for
z < 0) and slh = sin(sqrt z)/sqrt z (sinh counterpart for z < 0). Cell
averages come from exact antiderivatives for polynomial pieces and from
adaptive quadrature otherwise. Freezing q costs O(w^2) globally; a second
pass with doubled cell counts removes that to O(w^4) by Richardson
extrapolation, and constant pieces are exact with any cell count, so the
piecewise-constant configurations carry no mesh error at all.

The counting phase chi (the angle atan2(-u', m u), m = max(1, sqrt|lambda|),
tracked continuously from chi(a) = 0) also advances exactly per cell:

* oscillatory cells (z well above 0): in the frame scaled by
  nu = sqrt(lam - qbar) the flow is a rigid rotation, so the frame angle
  grows by exactly nu*w; the frame changes at the cell ends preserve the
  pi-lattice (the two angles coincide at every multiple of pi/2) and are
  applied branch-correctly through round(chi/pi).
* all other cells: u has at most one zero inside the cell and the angle
  cannot retreat through a zero (chi' = m > 0 there), so the true increment
  lies strictly inside (-pi, pi) and equals the principal-value difference
  of the endpoint angles. The mesh rule keeps such cells narrow enough for
  that bound even when q is large.

Transmission handling matches the shooting module (both components scaled,
a negative factor adds pi to chi), so counts from either engine agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import NonFiniteError
from .problem import ValidatedProblem, _piece_integral

_RESCALE_LIMIT = 1e150   # per-cell magnitude guard; headroom below overflow
_TAYLOR_CUT = 1e-8       # |z| below this uses series for c and slh
_COSH_CAP = 350.0        # max sqrt(-z) per cell; cosh(350) ~ 5e151


@dataclass(frozen=True)
class PieceMesh:
    """Uniform cell mesh of one piece with frozen cell averages."""

    width: float
    qbar: np.ndarray      # (n_cells,) averages, left to right

    @property
    def n_cells(self) -> int:
        return self.qbar.shape[0]


@dataclass(frozen=True)
class SweepPlan:
    """Precomputed meshes for one problem at two resolutions.

    ``exact`` is set when every piece is a constant polynomial; the frozen
    propagator is then exact and the fine pass alone is used (no Richardson
    combination, no mesh error).
    """

    problem: ValidatedProblem
    coarse: Tuple[PieceMesh, PieceMesh, PieceMesh]
    fine: Tuple[PieceMesh, PieceMesh, PieceMesh]
    exact: bool
    lam_floor: float


@dataclass(frozen=True)
class SweepResult:
    """Batch terminal data; omega is scaled by 2**exp2 columnwise."""

    lam: np.ndarray
    omega: np.ndarray
    exp2: np.ndarray
    chi_b: Optional[np.ndarray]


def _constant_value(p: ValidatedProblem, piece: int) -> Optional[float]:
    pot = p.potential
    if not pot.is_polynomial:
        return None
    coeffs = pot.pieces[piece]
    if all(c == 0.0 for c in coeffs[1:]):
        return coeffs[0]
    return None


def _piece_averages(p: ValidatedProblem, piece: int, n: int) -> PieceMesh:
    lo, hi = p.piece_bounds[piece]
    width = (hi - lo) / n
    const = _constant_value(p, piece)
    if const is not None:
        return PieceMesh(width, np.full(n, const))
    edges = np.linspace(lo, hi, n + 1)
    pot = p.potential
    if pot.is_polynomial:
        anti = npoly.polyint(pot.pieces[piece])
        vals = npoly.polyval(edges, anti)
        qbar = np.diff(vals) / width
    else:
        qbar = np.array([
            _piece_integral(p, piece, edges[i], edges[i + 1]) / width
            for i in range(n)])
    return PieceMesh(width, qbar)


def build_sweep_plan(p: ValidatedProblem, base_cells: int = 64,
                     lam_floor: Optional[float] = None) -> SweepPlan:
    """Mesh both resolutions for a problem.

    base_cells is the coarse cell count for non-constant pieces (the fine
    pass doubles it). lam_floor is the most negative lambda the plan must
    support; it only matters through the anti-overflow subdivision of
    strongly hyperbolic cells and defaults to twice the standard scan floor.
    """
    if base_cells < 1:
        raise NonFiniteError(f"base_cells must be >= 1, got {base_cells}")
    if lam_floor is None:
        lam_floor = -2.0 * (p.q_sup + abs(p.h) + 1.0) ** 2
    if not math.isfinite(lam_floor):
        raise NonFiniteError("lam_floor must be finite")
    coarse = []
    fine = []
    exact = True
    for piece in range(3):
        lo, hi = p.piece_bounds[piece]
        span = hi - lo
        # keep cosh arguments per cell bounded and, for the counting phase,
        # keep non-oscillatory cells under a half-turn of angle sweep
        n_hyp = math.ceil(span * math.sqrt(max(0.0, p.q_sup - lam_floor))
                          / _COSH_CAP)
        n_ang = math.ceil(span * math.sqrt(p.q_sup + 2.0) / 2.0)
        n_min = max(1, n_hyp, n_ang)
        if _constant_value(p, piece) is not None:
            coarse.append(_piece_averages(p, piece, n_min))
            fine.append(coarse[-1])
        else:
            exact = False
            n = max(base_cells, n_min)
            coarse.append(_piece_averages(p, piece, n))
            fine.append(_piece_averages(p, piece, 2 * n))
    return SweepPlan(p, tuple(coarse), tuple(fine), exact, lam_floor)


def _cs(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """cos(sqrt z) and sin(sqrt z)/sqrt z continued through z <= 0."""
    c = np.empty_like(z)
    slh = np.empty_like(z)
    osc = z > _TAYLOR_CUT
    hyp = z < -_TAYLOR_CUT
    mid = ~(osc | hyp)
    if osc.any():
        r = np.sqrt(z[osc])
        c[osc] = np.cos(r)
        slh[osc] = np.sin(r) / r
    if hyp.any():
        t = np.sqrt(-z[hyp])
        c[hyp] = np.cosh(t)
        slh[hyp] = np.sinh(t) / t
    if mid.any():
        zm = z[mid]
        c[mid] = 1.0 - 0.5 * zm * (1.0 - zm / 12.0)
        slh[mid] = 1.0 - zm / 6.0 * (1.0 - zm / 20.0)
    return c, slh


def _angle_step(chi: np.ndarray, u0: np.ndarray, du0: np.ndarray,
                u1: np.ndarray, du1: np.ndarray, wc: np.ndarray,
                width: float, mhat: np.ndarray) -> np.ndarray:
    out = np.empty_like(chi)
    z = wc * (width * width)
    osc = z > _TAYLOR_CUT
    if osc.any():
        nu = np.sqrt(wc[osc])
        m = mhat[osc]
        k = np.round(chi[osc] / np.pi)
        r = chi[osc] - np.pi * k
        phi = np.pi * k + np.arctan2(m * np.sin(r), nu * np.cos(r))
        phi = phi + nu * width
        k1 = np.round(phi / np.pi)
        r1 = phi - np.pi * k1
        out[osc] = np.pi * k1 + np.arctan2(nu * np.sin(r1), m * np.cos(r1))
    rest = ~osc
    if rest.any():
        m = mhat[rest]
        a0 = np.arctan2(-du0[rest], m * u0[rest])
        a1 = np.arctan2(-du1[rest], m * u1[rest])
        d = a1 - a0
        d -= 2.0 * np.pi * np.round(d / (2.0 * np.pi))
        out[rest] = chi[rest] + d
    return out


def _run_mesh(p: ValidatedProblem, meshes: Tuple[PieceMesh, ...],
              lam: np.ndarray, with_angle: bool):
    u = np.ones_like(lam)
    du = np.zeros_like(lam)
    exp2 = np.zeros(lam.shape, dtype=np.int64)
    chi = np.zeros_like(lam) if with_angle else None
    mhat = np.maximum(1.0, np.sqrt(np.abs(lam))) if with_angle else None
    for piece in range(3):
        mesh = meshes[piece]
        w = mesh.width
        for qb in mesh.qbar:
            wc = lam - qb
            c, slh = _cs(wc * (w * w))
            u1 = c * u + (w * slh) * du
            du1 = -(w * wc * slh) * u + c * du
            if with_angle:
                chi = _angle_step(chi, u, du, u1, du1, wc, w, mhat)
            u, du = u1, du1
            mag = np.maximum(np.abs(u), np.abs(du))
            big = mag > _RESCALE_LIMIT
            if big.any():
                _, ex = np.frexp(mag[big])
                u[big] = np.ldexp(u[big], -ex)
                du[big] = np.ldexp(du[big], -ex)
                exp2[big] += ex
        if piece == 0:
            factor = 1.0 / p.delta
        elif piece == 1:
            factor = p.delta / p.gamma
        else:
            break
        u = u * factor
        du = du * factor
        if with_angle and factor < 0.0:
            chi = chi + np.pi
    return u, du, exp2, chi


def sweep(plan: SweepPlan, lam, with_angle: bool = False) -> SweepResult:
    """Evaluate omega (and optionally chi at b) on a whole lambda batch.

    omega comes back in rescaled units: true omega = omega * 2**exp2
    per column, with exp2 nonzero only when a strongly hyperbolic run
    engaged the magnitude guard. Signs and roots are unaffected.
    """
    p = plan.problem
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("lambda batch must be finite")
    u2, du2, e2, chi = _run_mesh(p, plan.fine, arr, with_angle)
    om2 = (arr - p.h) * u2 - du2
    if plan.exact:
        return SweepResult(arr, om2, e2, chi)
    u1, du1, e1, _ = _run_mesh(p, plan.coarse, arr, False)
    om1 = (arr - p.h) * u1 - du1
    e = np.maximum(e1, e2)
    om = (4.0 * np.ldexp(om2, (e2 - e).astype(np.int32))
          - np.ldexp(om1, (e1 - e).astype(np.int32))) / 3.0
    return SweepResult(arr, om, e, chi)


def omega_batch(plan: SweepPlan, lam) -> np.ndarray:
    """Rescaled-unit omega values only (refinement hot path)."""
    return sweep(plan, lam, with_angle=False).omega


def counting_phase_batch(lam, h: float, chi_b) -> np.ndarray:
    """Vectorized counting phase Phi; see shooting.counting_phase."""
    arr = np.asarray(lam, dtype=float)
    m = np.maximum(1.0, np.sqrt(np.abs(arr)))
    return (np.asarray(chi_b) + np.arctan2(arr - h, m)) / np.pi
