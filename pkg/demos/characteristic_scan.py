#!/usr/bin/env python3
"""Sweep the characteristic function and watch its zeros become eigenvalues.

omega(lambda) = (lambda - h) u(b) - u'(b), evaluated on the solution shot
from the Neumann left end, vanishes exactly at the eigenvalues. This demo
sweeps omega over a lambda range in one vectorized pass, tabulates the
sign changes, and shows that the counting phase (a Pruefer-type angle)
independently reports how many eigenvalues the range holds.
"""

import numpy as np

from sltrace import (PotentialSpec, ProblemSpec, build_sweep_plan,
                     counting_phase_batch, refine_root, scan_sign_changes,
                     sweep, validate_problem)

problem = validate_problem(ProblemSpec(
    a=0.0, b=1.0, c1=0.3, c2=0.7, delta=2.0, gamma=3.0, h=1.0,
    potential=PotentialSpec.polynomial([[1.0]] * 3)))

# ----------------------------------------------------------------------
# One batch evaluation over the whole window. The sweep engine freezes q
# on mesh cells and applies the exact constant-coefficient propagator, so
# thousands of lambdas cost one vectorized pass; for piecewise-constant
# q the freezing is exact, no mesh error at all.
# ----------------------------------------------------------------------
lam_lo, lam_hi = -5.0, 120.0
plan = build_sweep_plan(problem, lam_floor=2.0 * lam_lo)
grid = np.linspace(lam_lo, lam_hi, 26)
res = sweep(plan, grid, with_angle=True)
phi = counting_phase_batch(grid, problem.h, res.chi_b)

print(f"{'lambda':>9} {'omega':>14} {'counting phase':>15}")
for lam, om, ph in zip(grid, res.omega, phi):
    print(f"{lam:>9.2f} {om:>14.6f} {ph:>15.6f}")

# ----------------------------------------------------------------------
# The counting phase at the window ends predicts the number of roots
# inside; the dense scan finds exactly that many sign changes. This
# agreement is what the spectrum routine calls certification.
# ----------------------------------------------------------------------
expected = int(np.floor(phi[-1]) - np.floor(phi[0]))
brackets = scan_sign_changes(problem, lam_lo, lam_hi)
print()
print(f"counting phase predicts {expected} eigenvalues in "
      f"[{lam_lo}, {lam_hi}]")
print(f"dense scan found        {len(brackets)} sign-change brackets")
assert expected == len(brackets)

# ----------------------------------------------------------------------
# Polish each bracket to machine precision.
# ----------------------------------------------------------------------
print()
print("refined roots:")
for bracket in brackets:
    rec = refine_root(problem, bracket, plan=plan)
    print(f"  lambda = {rec.lam:>18.12f}   |omega| residual = "
          f"{rec.residual:.2e}")
