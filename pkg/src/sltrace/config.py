"""Config-file loading for the command-line tools.

One TOML file describes a run: the [problem] geometry and scalings, the
[potential] in polynomial or tabulated form, [solver] tolerances and
budgets, and [trace] options. Unknown keys anywhere are errors, so a
typo cannot silently fall back to a default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import tomli

from .errors import ConfigError
from .problem import (PotentialSpec, ProblemSpec, ValidatedProblem,
                      validate_problem)

__all__ = ["SolverOptions", "TraceOptions", "RunConfig", "load_config"]

_SIDE_CONVENTIONS = ("left", "right", "mean")
_TRACE_CONVENTIONS = ("theorem", "series31")


@dataclass(frozen=True)
class SolverOptions:
    rel_tol: float = 1e-11
    abs_tol: float = 1e-12
    scan_refinement_max: int = 4
    lambda_min_override: Optional[float] = None


@dataclass(frozen=True)
class TraceOptions:
    n_terms: int = 2000
    convention: str = "theorem"
    assert_tol: Optional[float] = None


@dataclass(frozen=True)
class RunConfig:
    problem: ValidatedProblem
    side_convention: str
    solver: SolverOptions
    trace: TraceOptions


def _require_keys(section: str, data: Dict, required: Tuple[str, ...],
                  optional: Tuple[str, ...] = ()) -> None:
    for key in required:
        if key not in data:
            raise ConfigError(f"[{section}] is missing required key {key!r}")
    for key in data:
        if key not in required and key not in optional:
            raise ConfigError(f"[{section}] has unknown key {key!r}")


def _as_float(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(
            f"[{section}] {key} must be a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(f"[{section}] {key} must be finite, got {value!r}")
    return out


def _as_int(section: str, key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(
            f"[{section}] {key} must be an integer, got {value!r}")
    return value


def _coeff_list(section: str, key: str, raw) -> Tuple[float, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(
            f"[{section}] {key} must be a nonempty coefficient list")
    return tuple(_as_float(section, key, v) for v in raw)


def _polynomial_pieces(raw) -> Tuple[Tuple[float, ...], ...]:
    """pieces is either one flat coefficient list (global q) or three."""
    if not isinstance(raw, list) or not raw:
        raise ConfigError("[potential] pieces must be a nonempty array")
    if all(isinstance(v, (int, float)) and not isinstance(v, bool)
           for v in raw):
        one = _coeff_list("potential", "pieces", raw)
        return (one, one, one)
    if len(raw) != 3:
        raise ConfigError(
            f"[potential] pieces must hold 3 per-piece coefficient lists "
            f"or one flat list, got {len(raw)} entries")
    return tuple(_coeff_list("potential", f"pieces[{i}]", sub)
                 for i, sub in enumerate(raw))


def _table_interp(xs: np.ndarray, ys: np.ndarray):
    return lambda x: float(np.interp(x, xs, ys))


def _tabulated_potential(raw, geom: Dict[str, float]) -> PotentialSpec:
    if not isinstance(raw, list) or len(raw) != 3:
        raise ConfigError(
            "[potential] callable-table mode needs pieces to be an array "
            "of exactly 3 tables with keys 'x' and 'y'")
    bounds = ((geom["a"], geom["c1"]), (geom["c1"], geom["c2"]),
              (geom["c2"], geom["b"]))
    tables: List[Tuple[np.ndarray, np.ndarray]] = []
    for i, entry in enumerate(raw):
        where = f"potential] pieces[{i}"
        if not isinstance(entry, dict) or set(entry) != {"x", "y"}:
            raise ConfigError(
                f"[{where}] must be a table with exactly the keys 'x' "
                f"and 'y'")
        xs = np.array([_as_float(where, "x", v) for v in entry["x"]])
        ys = np.array([_as_float(where, "y", v) for v in entry["y"]])
        if xs.size < 2 or xs.size != ys.size:
            raise ConfigError(
                f"[{where}] x and y must have equal length >= 2")
        if np.any(np.diff(xs) <= 0.0):
            raise ConfigError(f"[{where}] x must be strictly increasing")
        lo, hi = bounds[i]
        if xs[0] > lo or xs[-1] < hi:
            raise ConfigError(
                f"[{where}] table spans [{xs[0]}, {xs[-1]}] but the piece "
                f"is [{lo}, {hi}]")
        tables.append((xs, ys))

    interps = [_table_interp(xs, ys) for xs, ys in tables]
    c1, c2 = geom["c1"], geom["c2"]

    def func(x: float) -> float:
        if x < c1:
            return interps[0](x)
        if x < c2:
            return interps[1](x)
        return interps[2](x)

    limits = (interps[0](c1), interps[1](c1), interps[1](c2), interps[2](c2))
    return PotentialSpec.from_callable(func, limits)


def _parse_potential(data: Dict, geom: Dict[str, float]
                     ) -> Tuple[PotentialSpec, str]:
    _require_keys("potential", data, ("mode", "pieces"),
                  ("side_convention",))
    mode = data["mode"]
    convention = data.get("side_convention", "left")
    if convention not in _SIDE_CONVENTIONS:
        raise ConfigError(
            f"[potential] side_convention must be one of "
            f"{_SIDE_CONVENTIONS}, got {convention!r}")
    if mode == "polynomial":
        return (PotentialSpec.polynomial(_polynomial_pieces(data["pieces"])),
                convention)
    if mode == "callable-table":
        return _tabulated_potential(data["pieces"], geom), convention
    raise ConfigError(
        f"[potential] mode must be 'polynomial' or 'callable-table', "
        f"got {mode!r}")


def _parse_solver(data: Dict) -> SolverOptions:
    _require_keys("solver", data, (),
                  ("rel_tol", "abs_tol", "scan_refinement_max",
                   "lambda_min_override"))
    opts = SolverOptions()
    rel = _as_float("solver", "rel_tol", data.get("rel_tol", opts.rel_tol))
    if not (0.0 < rel < 1.0):
        raise ConfigError(f"[solver] rel_tol must be in (0, 1), got {rel}")
    absf = _as_float("solver", "abs_tol", data.get("abs_tol", opts.abs_tol))
    if not (0.0 < absf < 1.0):
        raise ConfigError(f"[solver] abs_tol must be in (0, 1), got {absf}")
    refine = _as_int("solver", "scan_refinement_max",
                     data.get("scan_refinement_max",
                              opts.scan_refinement_max))
    if not (0 <= refine <= 12):
        raise ConfigError(
            f"[solver] scan_refinement_max must be in [0, 12], got {refine}")
    override = data.get("lambda_min_override")
    if override is not None:
        override = _as_float("solver", "lambda_min_override", override)
    return SolverOptions(rel_tol=rel, abs_tol=absf,
                         scan_refinement_max=refine,
                         lambda_min_override=override)


def _parse_trace(data: Dict) -> TraceOptions:
    _require_keys("trace", data, (), ("n_terms", "convention", "assert_tol"))
    opts = TraceOptions()
    n_terms = _as_int("trace", "n_terms", data.get("n_terms", opts.n_terms))
    if n_terms < 64:
        raise ConfigError(
            f"[trace] n_terms must be at least 64, got {n_terms}")
    convention = data.get("convention", opts.convention)
    if convention not in _TRACE_CONVENTIONS:
        raise ConfigError(
            f"[trace] convention must be one of {_TRACE_CONVENTIONS}, "
            f"got {convention!r}")
    assert_tol = data.get("assert_tol")
    if assert_tol is not None:
        assert_tol = _as_float("trace", "assert_tol", assert_tol)
        if assert_tol <= 0.0:
            raise ConfigError(
                f"[trace] assert_tol must be positive, got {assert_tol}")
    return TraceOptions(n_terms=n_terms, convention=convention,
                        assert_tol=assert_tol)


def load_config(path: str) -> RunConfig:
    """Parse and validate one run configuration from a TOML file."""
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid TOML: {exc}") from exc

    for section in data:
        if section not in ("problem", "potential", "solver", "trace"):
            raise ConfigError(f"unknown config section [{section}]")
    if "problem" not in data:
        raise ConfigError("config is missing the [problem] section")
    if "potential" not in data:
        raise ConfigError("config is missing the [potential] section")

    prob = data["problem"]
    _require_keys("problem", prob,
                  ("a", "b", "c1", "c2", "delta", "gamma", "h"))
    geom = {key: _as_float("problem", key, prob[key]) for key in prob}

    potential, convention = _parse_potential(data["potential"], geom)
    solver = _parse_solver(data.get("solver", {}))
    trace = _parse_trace(data.get("trace", {}))

    try:
        validated = validate_problem(ProblemSpec(
            a=geom["a"], b=geom["b"], c1=geom["c1"], c2=geom["c2"],
            delta=geom["delta"], gamma=geom["gamma"], h=geom["h"],
            potential=potential))
    except Exception as exc:
        raise ConfigError(f"[problem] does not validate: {exc}") from exc
    return RunConfig(problem=validated, side_convention=convention,
                     solver=solver, trace=trace)
