"""Command-line front end.

Four subcommands, all driven by one TOML config file:

  eig     certified eigenvalues as CSV
  scan    characteristic-function scan as CSV, for plotting
  trace   regularized-trace report as JSON
  verify  self-check suite with pass/fail lines and a JSON summary

Outputs are deterministic byte-for-byte for a fixed config and package
version: floats are printed in shortest round-trip form and files are
written atomically (temp file, then rename).

Exit codes: 0 success, 2 config or usage error, 3 hard numerical
failure (certification, convergence, or a failed verify property),
4 trace deviation above the configured assert tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import eig_asymptotic
from .config import RunConfig, load_config
from .errors import ConfigError, SLTraceError
from .problem import (PotentialSpec, ProblemSpec, is_globally_polynomial,
                      validate_problem)
from .reference import factorization_check, oracle_eigs_qzero
from .shooting import reverse_check
from .spectrum import compute_spectrum
from .sweep import build_sweep_plan, sweep
from .trace import (conversion_constant, trace_closed_form_splits,
                    trace_report)

__all__ = ["main", "build_parser"]

_VERIFY_TRACE_TERMS = 128
_VERIFY_EIGS = 20
_VERIFY_REVERSE_LAMBDAS = (-100.0, 1.0, 100.0, 10000.0)


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form."""
    return repr(float(x))


def _emit(doc: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(doc)
        return
    target = os.path.abspath(out)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target),
                               prefix=".sltrace-tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(doc)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def cmd_eig(cfg: RunConfig, count: int) -> str:
    """CSV of the lowest `count` certified eigenvalues."""
    p = cfg.problem
    records = compute_spectrum(
        p, count,
        lam_min=cfg.solver.lambda_min_override,
        max_refine=cfg.solver.scan_refinement_max)
    lines = ["n,lambda,s,residual,lambda_asym,deviation"]
    for rec in records:
        s_asym, lam_form = eig_asymptotic(p, rec.n, cfg.side_convention)
        lam_asym = lam_form if rec.n == 0 else s_asym * s_asym
        lines.append(",".join([
            str(rec.n), _fmt(rec.lam), _fmt(rec.s), _fmt(rec.residual),
            _fmt(lam_asym), _fmt(rec.lam - lam_asym)]))
    return "\n".join(lines) + "\n"


def _scan_lambdas(lam_min: float, lam_max: float, points: int) -> np.ndarray:
    """Scan grid: uniform in s where lambda > 0, uniform in lambda below."""
    if lam_min >= 0.0:
        s = np.linspace(math.sqrt(lam_min), math.sqrt(lam_max), points)
        grid = s * s
    elif lam_max <= 0.0:
        grid = np.linspace(lam_min, lam_max, points)
    else:
        frac = lam_min / (lam_min - lam_max)
        n_neg = max(1, min(points - 1, int(round(points * frac))))
        neg = np.linspace(lam_min, 0.0, n_neg, endpoint=False)
        s = np.linspace(0.0, math.sqrt(lam_max), points - n_neg)
        grid = np.concatenate([neg, s * s])
    grid[0] = lam_min
    grid[-1] = lam_max
    return grid


def cmd_scan(cfg: RunConfig, lam_min: float, lam_max: float,
             points: int) -> str:
    """CSV scan of omega and the boundary angle over a lambda range."""
    p = cfg.problem
    grid = _scan_lambdas(lam_min, lam_max, points)
    plan = build_sweep_plan(p, lam_floor=min(2.0 * lam_min, -1.0))
    res = sweep(plan, grid, with_angle=True)
    omega = [math.ldexp(float(w), int(e))
             for w, e in zip(res.omega, res.exp2)]
    lines = ["lambda,omega,theta_b"]
    for lam, w, chi in zip(grid, omega, res.chi_b):
        lines.append(f"{_fmt(lam)},{_fmt(w)},{_fmt(chi)}")
    return "\n".join(lines) + "\n"


def _splits_sensitivity(p) -> List[List[float]]:
    table = []
    for c1p in np.linspace(p.a, p.b, 5):
        for c2p in np.linspace(c1p, p.b, 5):
            rhs = trace_closed_form_splits(p, float(c1p), float(c2p))
            table.append([float(c1p), float(c2p), rhs])
    return table


def cmd_trace(cfg: RunConfig,
              assert_tol: Optional[float]) -> Tuple[str, int]:
    """JSON trace report; exit 4 when an assert tolerance is exceeded."""
    p = cfg.problem
    opts = cfg.trace
    tol = assert_tol if assert_tol is not None else opts.assert_tol
    report = trace_report(p, opts.n_terms, opts.convention)
    obj = {
        "convention": report.convention,
        "n_terms": report.n_terms,
        "partial_sum": report.partial_sum,
        "tail_estimate": report.tail_estimate,
        "tail_uncertainty": report.tail_uncertainty,
        "total": report.total,
        "closed_form_rhs": report.closed_form_rhs,
        "deviation": report.deviation,
        "stability": report.stability,
        "per_term_table": [[n, t] for n, t in report.per_term_table],
    }
    if is_globally_polynomial(p):
        obj["splits_sensitivity"] = _splits_sensitivity(p)
    doc = json.dumps(obj, indent=2) + "\n"
    code = 0
    if tol is not None and abs(report.deviation) > tol:
        code = 4
    return doc, code


def _qzero_variant(p):
    return validate_problem(ProblemSpec(
        a=p.a, b=p.b, c1=p.c1, c2=p.c2, delta=p.delta, gamma=p.gamma,
        h=p.h, potential=PotentialSpec.polynomial([(0.0,)] * 3)))


def cmd_verify(cfg: RunConfig) -> Tuple[str, int]:
    """Self-check suite; exit 3 unless every hard property holds."""
    p = cfg.problem
    checks: List[Tuple[str, float, float]] = []

    p0 = _qzero_variant(p)
    recs = compute_spectrum(p0, _VERIFY_EIGS,
                            max_refine=cfg.solver.scan_refinement_max)
    oracle = oracle_eigs_qzero(p.length, p.h, _VERIFY_EIGS)
    margin = max(abs(r.lam - o.lam) / (1.0 + abs(o.lam))
                 for r, o in zip(recs, oracle))
    checks.append(("qzero_oracle_agreement", margin, 1e-9))

    grid = np.linspace(1.0, 100.0, 50)
    checks.append(("factorization", factorization_check(p, grid), 1e-8))

    alt = (1.0, 1.0) if (p.delta, p.gamma) != (1.0, 1.0) else (2.0, 3.0)
    base = compute_spectrum(p, 12)
    moved = compute_spectrum(p.with_scalings(*alt), 12)
    margin = max(abs(x.lam - y.lam) / (1.0 + abs(y.lam))
                 for x, y in zip(moved, base))
    checks.append(("scaling_invariance", margin, 1e-8))

    margin = max(reverse_check(p, lam, rtol=cfg.solver.rel_tol,
                               atol=cfg.solver.abs_tol)
                 for lam in _VERIFY_REVERSE_LAMBDAS)
    checks.append(("reverse_integration", margin, 1e-8))

    r_th = trace_report(p, _VERIFY_TRACE_TERMS, "theorem")
    r_31 = trace_report(p, _VERIFY_TRACE_TERMS, "series31")
    margin = abs((r_th.total - r_31.total) - conversion_constant(p))
    checks.append(("conversion_identity", margin, 1e-12))

    lines = []
    results = []
    all_pass = True
    for name, margin, tol in checks:
        margin = float(margin)
        ok = bool(margin <= tol)
        all_pass &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name} "
                     f"margin={_fmt(margin)} tol={_fmt(tol)}")
        results.append({"name": name, "margin": margin, "tol": tol,
                        "pass": ok})
    summary = json.dumps({"checks": results, "all_pass": all_pass},
                         indent=2)
    return "\n".join(lines) + "\n" + summary + "\n", 0 if all_pass else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sltrace",
        description="Eigenvalues, omega scans, regularized-trace reports "
                    "and self-checks for the two-interface spectral "
                    "problem described by a TOML config.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True,
                        help="path to the TOML run configuration")
        sp.add_argument("--out", default=None,
                        help="output file (default: stdout), written "
                             "atomically")

    sp = sub.add_parser("eig", help="lowest-N certified eigenvalues (CSV)")
    common(sp)
    sp.add_argument("--count", type=int, required=True,
                    help="number of eigenvalues (>= 1)")

    sp = sub.add_parser("scan", help="omega and boundary angle over a "
                                     "lambda range (CSV)")
    common(sp)
    sp.add_argument("--min", type=float, required=True, dest="lam_min")
    sp.add_argument("--max", type=float, required=True, dest="lam_max")
    sp.add_argument("--points", type=int, required=True,
                    help="number of scan rows (>= 2)")

    sp = sub.add_parser("trace", help="regularized-trace report (JSON)")
    common(sp)
    sp.add_argument("--assert-tol", type=float, default=None,
                    help="fail with exit 4 when |deviation| exceeds this "
                         "(overrides the config)")

    sp = sub.add_parser("verify", help="self-check suite (text + JSON)")
    common(sp)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "eig" and args.count < 1:
        parser.error("--count must be >= 1")
    if args.command == "scan":
        if args.points < 2:
            parser.error("--points must be >= 2")
        if not (math.isfinite(args.lam_min) and math.isfinite(args.lam_max)
                and args.lam_min < args.lam_max):
            parser.error("--min must be finite and below --max")
    if (args.command == "trace" and args.assert_tol is not None
            and args.assert_tol <= 0.0):
        parser.error("--assert-tol must be positive")

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"sltrace: config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "eig":
            doc, code = cmd_eig(cfg, args.count), 0
        elif args.command == "scan":
            doc = cmd_scan(cfg, args.lam_min, args.lam_max, args.points)
            code = 0
        elif args.command == "trace":
            doc, code = cmd_trace(cfg, args.assert_tol)
        else:
            doc, code = cmd_verify(cfg)
    except SLTraceError as exc:
        print(f"sltrace: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    _emit(doc, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
