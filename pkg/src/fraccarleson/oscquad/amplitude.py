"""Amplitude factors for oscillatory integrands.

Each amplitude knows where it is non-smooth (``breakpoints``), where it is
singular, the hull of its support, and, when cheap, its Taylor jets (needed
for the integration-by-parts tails).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bump import BumpSystem
from . import jets

__all__ = ["Constant", "Reciprocal", "BumpQuotient", "Product"]


def _affine_point(alpha, beta, s):
    return (s - beta) / alpha


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    has_jets = True

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.full(t.shape, self.value, dtype=float)

    def breakpoints(self):
        return []

    def singular_points(self):
        return []

    def hull(self):
        return (-math.inf, math.inf)

    def order_at(self, point):
        """Power-law growth exponent of the amplitude approaching ``point``."""
        return 0.0

    def jet(self, t, order, scale=1.0):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return jets.constant_jet(self.value, t.size, order)


@dataclass(frozen=True)
class Reciprocal:
    """``1 / (alpha*t + beta)``."""

    alpha: float = 1.0
    beta: float = 0.0

    has_jets = True

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")

    @property
    def pole(self):
        return -self.beta / self.alpha

    def __call__(self, t):
        s = self.alpha * np.asarray(t, dtype=float) + self.beta
        with np.errstate(divide="ignore", over="ignore"):
            return 1.0 / s

    def breakpoints(self):
        return [self.pole]

    def singular_points(self):
        return [self.pole]

    def hull(self):
        return (-math.inf, math.inf)

    def order_at(self, point):
        return -1.0 if (math.isinf(point) or point == self.pole) else 0.0

    def jet(self, t, order, scale=1.0):
        s0 = self.alpha * np.atleast_1d(np.asarray(t, dtype=float)) + self.beta
        return jets.power_jet(s0, self.alpha, -1.0, order, odd=True, scale=scale)


@dataclass(frozen=True)
class BumpQuotient:
    """``psi_j(s) / s`` with ``s = alpha*t + beta``; vanishes near ``s = 0``."""

    system: BumpSystem = BumpSystem()
    j: int = 0
    affine: tuple = (1.0, 0.0)

    has_jets = False

    def __post_init__(self):
        if self.affine[0] == 0:
            raise ValueError("affine alpha must be nonzero")

    def __call__(self, t):
        alpha, beta = self.affine
        s = alpha * np.asarray(t, dtype=float) + beta
        psi = self.system.psi_j(self.j, s)
        safe = np.where(psi != 0.0, s, 1.0)
        return np.where(psi != 0.0, psi / safe, 0.0)

    def _s_edges(self):
        lo, hi = self.system.support(self.j)
        return [-hi, -lo, lo, hi]

    def breakpoints(self):
        alpha, beta = self.affine
        return sorted(_affine_point(alpha, beta, s) for s in self._s_edges())

    def singular_points(self):
        return []

    def hull(self):
        pts = self.breakpoints()
        return (pts[0], pts[-1])

    def order_at(self, point):
        return -math.inf if math.isinf(point) else 0.0


class Product:
    """Pointwise product of amplitude factors."""

    def __init__(self, *factors):
        if not factors:
            raise ValueError("Product needs at least one factor")
        self.factors = tuple(factors)
        self.has_jets = all(f.has_jets for f in self.factors)

    def __repr__(self):
        return f"Product{self.factors!r}"

    def __eq__(self, other):
        return isinstance(other, Product) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __call__(self, t):
        out = self.factors[0](t)
        for f in self.factors[1:]:
            out = out * f(t)
        return out

    def breakpoints(self):
        return sorted({p for f in self.factors for p in f.breakpoints()})

    def singular_points(self):
        return sorted({p for f in self.factors for p in f.singular_points()})

    def hull(self):
        lo, hi = -math.inf, math.inf
        for f in self.factors:
            a, b = f.hull()
            lo, hi = max(lo, a), min(hi, b)
        return (lo, hi)

    def order_at(self, point):
        return sum(f.order_at(point) for f in self.factors)

    def jet(self, t, order, scale=1.0):
        if not self.has_jets:
            raise TypeError("not every factor provides jets")
        out = self.factors[0].jet(t, order, scale)
        for f in self.factors[1:]:
            out = jets.mul(out, f.jet(t, order, scale))
        return out
