"""Exception types and warning flags shared across the package.

Precondition violations derive from ``PreconditionError`` (CLI exit code 2).
``CriterionViolated`` marks a refused computation (exit code 4).  Numerical
flags that do not abort a computation are emitted as warnings and surfaced
by the CLI as exit code 3.
"""

from __future__ import annotations


class GammaMuError(Exception):
    """Base class for all package errors."""


class PreconditionError(GammaMuError, ValueError):
    """An operation was called with arguments violating its contract."""


class InvalidArguments(PreconditionError):
    pass


class InvalidParameter(PreconditionError):
    pass


class InvalidHint(PreconditionError):
    """A singularity hint is malformed or contradicts density metadata."""


class IndexOutOfRange(PreconditionError, IndexError):
    pass


class TruncationMismatch(PreconditionError):
    """Input degree exceeds the operator truncation."""


class GridTooCoarse(PreconditionError):
    """The boundary grid cannot support the requested accuracy."""


class StabilityCapExceeded(PreconditionError):
    """Forward-difference matrix path requested beyond its stability cap."""


class ScheduleInvalid(PreconditionError):
    """A probe schedule violates its admissible parameter range."""


class NonConvergentIntegral(GammaMuError):
    """The requested integral diverges (combined endpoint exponent <= -1).

    This signals a mathematical divergence, not a numerical failure.
    """

    def __init__(self, message: str, endpoint: float | None = None):
        super().__init__(message)
        self.endpoint = endpoint


class EvaluationFailure(GammaMuError):
    """A boundary function could not be evaluated where required."""


class CriterionViolated(GammaMuError):
    """A probe refused to run because its admissibility criterion fails."""


class EstimateUnconverged(UserWarning):
    """Quadrature doubling hit its node cap before the tolerance was met."""


class IterationCapReached(UserWarning):
    """Power iteration hit its iteration cap; the last iterate is returned."""
