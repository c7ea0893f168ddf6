"""Exceptions raised by the oscillatory quadrature engine."""


class OscQuadError(ArithmeticError):
    """Base class for quadrature failures."""


class BudgetExceededError(OscQuadError):
    """Panel budget ran out; carries the best estimate and its error bound."""

    def __init__(self, message, estimate=0j, error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DivergenceError(OscQuadError):
    """The integral does not converge (non-decaying tail or end singularity)."""
