"""Exception and warning types shared across the package."""

from __future__ import annotations


class SLTraceError(Exception):
    """Base class for all package-specific errors."""


# ---------------------------------------------------------------------------
# problem definition

class OrderingError(SLTraceError, ValueError):
    """Raised when a < c1 < c2 < b is violated."""


class ZeroScalarError(SLTraceError, ValueError):
    """Raised when an interface scaling factor (delta or gamma) is zero."""


class NonFiniteError(SLTraceError, ValueError):
    """Raised when an input or intermediate value is NaN or infinite."""


class PieceDomainError(SLTraceError, ValueError):
    """Raised when a potential piece is queried outside its subinterval."""


class DomainError(SLTraceError, ValueError):
    """Raised when an argument lies outside the operation's stated domain."""


# ---------------------------------------------------------------------------
# integration

class ToleranceFailure(SLTraceError, ArithmeticError):
    """Step control cannot meet the requested local tolerance."""


class OverflowGuard(SLTraceError, OverflowError):
    """Solution magnitude exceeded the overflow threshold (1e250).

    The caller must rescale; rescaling is legal because root finding on the
    characteristic function is invariant under positive scalings of the state.
    """


class PositionError(SLTraceError, ValueError):
    """State is not located where the operation requires it to be."""


# ---------------------------------------------------------------------------
# asymptotics

class SmallSError(SLTraceError, ValueError):
    """Asymptotic formula refused: s is below its validity floor."""


# ---------------------------------------------------------------------------
# spectrum

class NoSignChange(SLTraceError, ValueError):
    """Bracket endpoints do not straddle a sign change."""


class BudgetExceeded(SLTraceError, RuntimeError):
    """Scan refinement budget exhausted before counts reconciled."""


class CertificationFailure(SLTraceError, RuntimeError):
    """Bracket count and phase-based count disagree after max refinement."""

    def __init__(self, message, records=None, diagnostic=None):
        super().__init__(message)
        self.records = records if records is not None else []
        self.diagnostic = diagnostic


# ---------------------------------------------------------------------------
# trace

class IndexGap(SLTraceError, ValueError):
    """Eigenvalue records do not form a consecutive index range 0..N-1."""


class FitFailure(SLTraceError, RuntimeError):
    """Tail-model least squares fit is degenerate or underdetermined."""


# ---------------------------------------------------------------------------
# configuration

class ConfigError(SLTraceError, ValueError):
    """Config file is malformed; the message names the offending field."""


# ---------------------------------------------------------------------------
# warnings (issued via warnings.warn, never fatal)

class MonotonicityWarning(UserWarning):
    """Scan detected the boundary phase decreasing in lambda."""


class MultiplicityWarning(UserWarning):
    """Characteristic function nearly flat at a refined root."""


class StabilityWarning(UserWarning):
    """Trace total moved by more than 10x the tail uncertainty on N -> N/2."""
