"""Oscillatory and principal-value quadrature for signed-power phases."""

from .amplitude import BumpQuotient, Constant, Product, Reciprocal
from .engine import (OscIntegrand, integrate_oscillatory, integrate_pieces,
                     principal_value_symmetric)
from .errors import BudgetExceededError, DivergenceError, OscQuadError
from .phase import PhaseSpec, PhaseTerm
from .stationary import stationary_points

__all__ = [
    "PhaseTerm", "PhaseSpec", "Constant", "Reciprocal", "BumpQuotient", "Product",
    "OscIntegrand", "stationary_points", "integrate_oscillatory", "integrate_pieces",
    "principal_value_symmetric", "OscQuadError", "BudgetExceededError", "DivergenceError",
]
