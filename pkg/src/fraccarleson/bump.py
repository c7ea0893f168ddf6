"""Smooth Littlewood-Paley bumps with an arbitrary dyadic base.

The cutoff ``eta`` equals 1 on ``|y| <= 1`` and 0 on ``|y| >= b``; the
bump is ``psi(y) = eta(y) - eta(b*y)`` so the rescalings ``psi(b**j y)``
telescope to 1 on ``y != 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BumpSystem", "eval_psi", "eval_phi0"]


def _smooth_step(x, sharpness):
    # 0 for x <= 0, 1 for x >= 1, C-infinity in between (all derivatives
    # vanish at both edges).
    x = np.asarray(x, dtype=float)
    inner = (x > 0.0) & (x < 1.0)
    xs = np.where(inner, x, 0.5)
    f0 = np.exp(-sharpness / xs)
    f1 = np.exp(-sharpness / (1.0 - xs))
    out = np.where(x >= 1.0, 1.0, 0.0)
    return np.where(inner, f0 / (f0 + f1), out)


@dataclass(frozen=True)
class BumpSystem:
    """Partition of unity ``sum_j psi(base**j * y) = 1`` on ``y != 0``."""

    base: float = 2.0
    transition_sharpness: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.base) or self.base <= 1.0:
            raise ValueError(f"base must be > 1, got {self.base!r}")
        if not self.transition_sharpness > 0.0:
            raise ValueError("transition_sharpness must be positive")

    @classmethod
    def uniform(cls, n, transition_sharpness=1.0):
        """Base ``2**(1/n)`` system used for the large-exponent estimates."""
        return cls(2.0 ** (1.0 / n), transition_sharpness)

    def eta(self, y):
        """Cutoff: 1 on ``|y| <= 1``, 0 on ``|y| >= base``, even, monotone."""
        r = np.abs(np.asarray(y, dtype=float))
        return _smooth_step((self.base - r) / (self.base - 1.0), self.transition_sharpness)

    def psi(self, y):
        y = np.asarray(y, dtype=float)
        return self.eta(y) - self.eta(self.base * y)

    def psi_j(self, j, y):
        return self.psi(self.base ** j * np.asarray(y, dtype=float))

    def phi0(self, y):
        """``sum_{j >= 1} psi_j(y) = eta(base * y)``, defined for ``y != 0``."""
        y = np.asarray(y, dtype=float)
        if np.any(y == 0.0):
            raise ValueError("phi0 is only defined for y != 0")
        return self.eta(self.base * y)

    def support(self, j=0):
        """Closed support ``{1/b <= |b**j y| <= b}`` as ``(lo, hi)`` in ``|y|``."""
        scale = self.base ** (-j)
        return scale / self.base, scale * self.base


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def eval_psi(sys: BumpSystem, j: int, y):
    """Return ``psi(b**j * y)``; exactly 0 outside ``1/b <= |b**j y| <= b``."""
    return _scalar(sys.psi_j(j, y))


def eval_phi0(sys: BumpSystem, y):
    """High-frequency cutoff ``sum_{j >= 1} psi_j(y)``; raises for ``y == 0``."""
    return _scalar(sys.phi0(y))
