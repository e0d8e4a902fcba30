"""
Error types for the Semiannulus Regularity Toolkit.
Every error carries the process exit code the CLI reports for it.
"""

from typing import Any, List, Optional


class ToolkitError(Exception):
    """
    Base class of all toolkit errors.

    partial holds results a batch operation finished before the failure.
    """
    exit_code: int = 1

    def __init__(self, detail: str, *, context: Optional[dict] = None):
        super().__init__(detail)
        self.detail = detail
        self.context = context or {}
        self.partial: List[Any] = []


class ValidationError(ToolkitError):
    """Invalid input: bad scenario, bad parameters, violated preconditions."""
    exit_code = 2


class NumericalError(ToolkitError):
    """A numerical procedure failed or could not reach its tolerance."""
    exit_code = 3


# Validation errors
class DomainError(ValidationError):
    """Point outside the domain of a field or map."""


class DegenerateBase(ValidationError):
    """Evaluation point coincides with the base point."""


class EmptyInput(ValidationError):
    """An operation received an empty point sequence."""


class DomainMismatch(ValidationError):
    """Semiannulus, kernel and field live on different domains."""


class UnsupportedSpec(ValidationError):
    """The operation is not defined for this semiannulus spec."""


class HypothesisViolated(ValidationError):
    """The hypothesis of a bound does not hold, so the bound says nothing."""


class UnknownName(ValidationError):
    """No builtin field or gallery map under this name."""


class BadParams(ValidationError):
    """Parameters missing or out of range for a named builtin."""


class StencilOutOfDomain(ValidationError):
    """Finite-difference stencil leaves the map's domain."""


class NotSeparating(ValidationError):
    """Ring does not separate the given point from infinity."""


# Numerical errors
class ToleranceNotReached(NumericalError):
    """Quadrature refinement stopped at the cell cap before the tolerance."""


class GridTooCoarse(NumericalError):
    """Sampled supremum still increases under grid refinement."""


class DegenerateCell(NumericalError):
    """Mesh cell folds or has non-positive area."""

    def __init__(self, detail: str, *, cell: Optional[tuple] = None):
        super().__init__(detail, context={"cell": cell})
        self.cell = cell


class NonFiniteValue(NumericalError):
    """A field evaluator returned NaN or infinity at a sample point."""


class SolveFailure(NumericalError):
    """Linear solve did not converge."""


class PoorFit(NumericalError):
    """Regression residual exceeds the acceptance threshold."""
