"""Error hierarchy shared by every computational module."""

from __future__ import annotations


class RmtlSizeError(Exception):
    """Base class for all domain errors."""


class InputError(RmtlSizeError, ValueError):
    """Raised when arguments or data violate a documented precondition."""


class DatasetFormatError(InputError):
    """Raised when a dataset file cannot be parsed."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line = line


class UnsupportedCaseError(InputError):
    """Raised when a closed form is requested outside its validity range."""


class NumericError(RmtlSizeError, ArithmeticError):
    """Raised when a numerical routine fails."""


class DomainError(NumericError, ValueError):
    """Raised when a function is evaluated outside its mathematical domain."""


class NonFiniteError(NumericError):
    """Raised when an integrand or objective returns a non-finite value."""


class ConvergenceError(NumericError):
    """Raised when an iterative routine exhausts its iteration budget."""


class BracketingError(NumericError):
    """Raised when a root-finding bracket does not contain a sign change."""


class InfeasibleError(RmtlSizeError):
    """Raised when a computation is well-posed but cannot be carried out."""


class RestrictionError(InfeasibleError):
    """Raised when the restriction time exceeds the available follow-up."""

    def __init__(self, message: str, *, bound: float) -> None:
        super().__init__(message)
        self.bound = bound


class InfeasibleTargetError(InfeasibleError):
    """Raised when a censoring target lies outside what uniform loss can reach.

    ``floor`` is the administrative-only proportion; ``ceiling``, when set, is the
    proportion reached when loss ends exactly at the restriction time.
    """

    def __init__(self, message: str, *, floor: float, ceiling: float | None = None) -> None:
        super().__init__(message)
        self.floor = floor
        self.ceiling = ceiling


class UndefinedEffectError(InfeasibleError):
    """Raised when an effect size is null, so no sample size exists."""


class DegenerateInputError(InfeasibleError):
    """Raised when data carry no information for a test (for example zero events)."""


class EstimationError(InfeasibleError):
    """Raised when an estimator cannot be evaluated on the given sample."""
