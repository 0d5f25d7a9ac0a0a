"""Spectral solver and verification lab for a Sturm-Liouville problem
with two interior scaling interfaces and an eigenvalue-dependent right
boundary condition.

The library computes certified eigenvalues by shooting with counting-
phase cross-checks, evaluates second-order eigenvalue asymptotics, and
numerically adjudicates a regularized first-trace formula against its
closed-form right-hand side. A config-driven CLI (``sltrace``) exposes
the same pipeline as CSV/JSON emitting subcommands.
"""

from .asymptotics import (AsymptoticCoefficients, alpha_coefficients,
                          compute_K, eig_asymptotic, omega_asymptotic,
                          phi3_asymptotic)
from .config import RunConfig, SolverOptions, TraceOptions, load_config
from .errors import (BudgetExceeded, CertificationFailure, ConfigError,
                     DomainError, FitFailure, IndexGap, MonotonicityWarning,
                     MultiplicityWarning, NonFiniteError, NoSignChange,
                     OrderingError, OverflowGuard, PieceDomainError,
                     PositionError, SLTraceError, SmallSError,
                     StabilityWarning, ToleranceFailure, ZeroScalarError)
from .problem import (PotentialSpec, ProblemSpec, QIntegrals,
                      ValidatedProblem, compute_Q, is_globally_polynomial,
                      q_derivative, q_eval, q_integral, validate_problem)
from .reference import (OracleRoot, factorization_check, oracle_eigs_qzero,
                        oracle_omega_qzero)
from .shooting import (BoundaryData, char_function, counting_phase,
                       propagate_solution, pruefer_angle, reverse_check)
from .spectrum import (EigenvalueRecord, ResidualSequence,
                       asymptotic_residuals, compute_spectrum,
                       default_lambda_min, refine_root, scan_sign_changes)
from .sweep import (SweepPlan, build_sweep_plan, counting_phase_batch,
                    omega_batch, sweep)
from .trace import (TraceReport, conversion_constant, partial_sums,
                    tail_extrapolate, trace_closed_form,
                    trace_closed_form_splits, trace_report, trace_term)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # problem
    "PotentialSpec", "ProblemSpec", "ValidatedProblem", "QIntegrals",
    "validate_problem", "q_eval", "q_derivative", "q_integral",
    "compute_Q", "is_globally_polynomial",
    # shooting
    "BoundaryData", "char_function", "propagate_solution", "pruefer_angle",
    "counting_phase", "reverse_check",
    # sweep
    "SweepPlan", "build_sweep_plan", "sweep", "omega_batch",
    "counting_phase_batch",
    # spectrum
    "EigenvalueRecord", "ResidualSequence", "scan_sign_changes",
    "refine_root", "default_lambda_min",
    "compute_spectrum", "asymptotic_residuals",
    # asymptotics
    "AsymptoticCoefficients", "alpha_coefficients", "compute_K",
    "phi3_asymptotic", "omega_asymptotic", "eig_asymptotic",
    # trace
    "TraceReport", "trace_term", "partial_sums", "tail_extrapolate",
    "trace_closed_form", "trace_closed_form_splits", "trace_report",
    "conversion_constant",
    # reference
    "OracleRoot", "oracle_omega_qzero", "oracle_eigs_qzero",
    "factorization_check",
    # config
    "RunConfig", "SolverOptions", "TraceOptions", "load_config",
    # errors and warnings
    "SLTraceError", "OrderingError", "ZeroScalarError", "NonFiniteError",
    "PieceDomainError", "DomainError", "ToleranceFailure", "OverflowGuard",
    "PositionError", "SmallSError", "NoSignChange", "BudgetExceeded",
    "CertificationFailure", "IndexGap", "FitFailure", "ConfigError",
    "MonotonicityWarning", "MultiplicityWarning", "StabilityWarning",
]
