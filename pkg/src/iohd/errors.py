"""Exception hierarchy shared by all analysis modules."""

from __future__ import annotations


class IohdError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(IohdError):
    """Matrix or vector dimensions do not conform."""


class AsymmetryError(IohdError):
    """A matrix required to be symmetric (or skew-symmetric) is not, beyond tolerance."""


class SingularMatrixError(IohdError):
    """A matrix that must be inverted is singular or too ill-conditioned.

    The condition-number estimate that triggered the error is stored in
    ``condition``.
    """

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class ValidationError(IohdError):
    """A model violates structural invariants.

    ``violations`` lists every violated invariant as ``(name, magnitude)``,
    not just the first one found.
    """

    def __init__(self, violations: list[tuple[str, float]]):
        self.violations = violations
        lines = "; ".join(f"{name} (magnitude {mag:.3e})" for name, mag in violations)
        super().__init__(f"model validation failed: {lines}")


class PreconditionError(IohdError):
    """An operation's precondition is not met (wrong kind of input, port
    mismatch, nonzero feedthrough, indefinite weight, ...)."""


class NotIohdError(IohdError):
    """A state-space system is not an IOHD system for the given weight matrix."""


class CertificateInfeasibleError(IohdError):
    """The linear certificate equality has no symmetric solution at all.

    Unlike an exhausted search budget, this is a disproof: no symmetric P
    satisfies the equality constraint.  ``residual`` is the least-squares
    residual of the constraint system.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class GridError(IohdError):
    """A frequency-grid point coincides with a system pole."""

    def __init__(self, message: str, omega: float):
        super().__init__(message)
        self.omega = omega


class ModelIntegrityError(IohdError):
    """User-supplied evaluators are mutually inconsistent or violate the
    structure conditions at an evaluation point."""


class ConsistencyError(IohdError):
    """An identity that must hold by construction failed beyond tolerance.

    ``residuals`` maps residual names to magnitudes when available.
    """

    def __init__(self, message: str, residuals: dict[str, float] | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


class DivergenceError(IohdError):
    """A simulated trajectory left the representable range.

    ``last_time`` is the last time with a finite state.
    """

    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time


class ModelFormatError(IohdError):
    """A model or graph file does not match the JSON schema."""
