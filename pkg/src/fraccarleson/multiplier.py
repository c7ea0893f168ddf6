"""Fourier multipliers of the fractional-monomial kernels.

For parity ``even`` the kernel is ``exp(i A |t|^eps) / t`` and for ``odd``
it is ``exp(i A sgn(t) |t|^eps) / t``; the multiplier is

    m(lambda) = PV int exp(i A branch(t)|t|^eps - i lambda t) dt / t.

All quadrature is delegated to :mod:`fraccarleson.oscquad`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .oscquad import (BudgetExceededError, DivergenceError, OscIntegrand, OscQuadError,
                      PhaseSpec, Reciprocal, principal_value_symmetric)
from .records import Table

__all__ = ["MultiplierQuery", "SweepResult", "BlowupResult", "multiplier", "scaling_check",
           "signed_log_grid", "sweep", "blowup_probe_even_at_one", "SWEEP_HEADER"]

SWEEP_HEADER = ("parity", "epsilon", "lambda", "re", "im", "err")
BLOWUP_HEADER = ("k", "lambda", "re", "closed_form")


@dataclass(frozen=True)
class MultiplierQuery:
    parity: str
    epsilon: float
    frequency: float = 0.0
    coefficient: float = 1.0
    tol: float = 1e-9

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        for name in ("epsilon", "frequency", "coefficient"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.coefficient > 0:
            raise ValueError("coefficient must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def phase(self):
        return PhaseSpec.monomial(self.coefficient, self.epsilon, self.parity, self.frequency)


def multiplier(q: MultiplierQuery, full_output=False):
    """``m(lambda)`` for the query; with ``full_output`` also the error bound.

    Raises ``DivergenceError`` for the odd kernel at ``eps = 0`` (the sign
    kernel ``sgn(t)/t`` has no principal value).
    """
    if q.parity == "odd" and q.epsilon == 0.0:
        raise DivergenceError("odd kernel with eps = 0 is sgn(t)/t, which has no principal value")
    ig = OscIntegrand(q.phase(), Reciprocal(), (-math.inf, math.inf))
    return principal_value_symmetric(ig, tol=q.tol, full_output=full_output)


def scaling_check(parity, epsilon, coefficient, frequency, tol=1e-9):
    """``(m_A(lambda), m_1(A**(-1/eps) * lambda))``; the two should agree."""
    if not coefficient > 0:
        raise ValueError("coefficient must be positive")
    if epsilon == 0:
        raise ValueError("scaling needs eps != 0")
    lhs = multiplier(MultiplierQuery(parity, epsilon, frequency, coefficient, tol))
    rescaled = coefficient ** (-1.0 / epsilon) * frequency
    rhs = multiplier(MultiplierQuery(parity, epsilon, rescaled, 1.0, tol))
    return lhs, rhs


def signed_log_grid(lo=1e-3, hi=1e3, per_decade=64):
    """``-hi .. -lo, lo .. hi`` with ``per_decade`` points per decade on each side."""
    if not 0 < lo <= hi:
        raise ValueError("need 0 < lo <= hi")
    if per_decade < 1:
        raise ValueError("per_decade must be >= 1")
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    pos = np.logspace(math.log10(lo), math.log10(hi), n)
    return np.concatenate([-pos[::-1], pos])


def excluded(parity, epsilon):
    """Parameters where the operator is known to be unbounded."""
    return (parity == "even" and epsilon == 1.0) or (parity == "odd" and epsilon == 0.0)


@dataclass
class SweepResult:
    parity: str
    table: Table
    tol: float
    failures: list = field(default_factory=list)

    @property
    def rows(self):
        return self.table.rows

    def values(self):
        return np.array([complex(r[3], r[4]) for r in self.rows])

    @property
    def sup(self):
        """Largest finite ``|m|`` over the table (0 for an empty table)."""
        return self._best()[0]

    @property
    def argmax(self):
        """``(epsilon, lambda)`` where the sup is attained, or ``None``."""
        return self._best()[1]

    def _best(self):
        best, where = 0.0, None
        for r in self.rows:
            v = math.hypot(r[3], r[4])
            if math.isfinite(v) and v > best:
                best, where = v, (r[1], r[2])
        return best, where

    def summary(self):
        return {"sup_abs_m": self.sup, "argmax": list(self.argmax) if self.argmax else None,
                "rows": len(self.rows), "failures": len(self.failures)}


def _row(args):
    parity, eps, lam, tol = args
    try:
        v, e = multiplier(MultiplierQuery(parity, eps, lam, 1.0, tol), full_output=True)
        return (parity, eps, lam, v.real, v.imag, e), None
    except BudgetExceededError as exc:
        est = complex(exc.estimate)
        return (parity, eps, lam, est.real, est.imag, math.inf), str(exc)
    except OscQuadError as exc:
        return (parity, eps, lam, math.nan, math.nan, math.inf), str(exc)


def sweep(parity, eps_grid, lam_grid, tol=1e-9, workers=1):
    """Tabulate ``m`` over the product grid; failures are recorded, never raised."""
    eps_grid = [float(e) for e in eps_grid]
    lam_grid = [float(x) for x in lam_grid]
    bad = [e for e in eps_grid if excluded(parity, e)]
    if bad:
        raise ValueError(f"{parity} parity at eps={bad[0]} is unbounded; use the blow-up probe")
    jobs = [(parity, e, x, tol) for e in eps_grid for x in lam_grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_row, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        out = [_row(j) for j in jobs]
    table = Table(SWEEP_HEADER)
    failures = []
    for row, msg in out:
        table.append(row)
        if msg is not None:
            failures.append({"epsilon": row[1], "lambda": row[2], "message": msg})
    return SweepResult(parity, table, tol, failures)


@dataclass
class BlowupResult:
    table: Table

    def real_parts(self):
        return np.array(self.table.column("re"))

    def closed_forms(self):
        return np.array(self.table.column("closed_form"))

    def strictly_increasing(self):
        return bool(np.all(np.diff(self.real_parts()) > 0))


def blowup_probe_even_at_one(k_max, tol=1e-9, k_min=4):
    """``Re m`` of the even ``eps = 1`` kernel at ``lambda = 1 - 2**-k``.

    The exact value is ``ln((1+lambda)/(1-lambda)) = ln(2**(k+1) - 1)``,
    unbounded as ``k`` grows.
    """
    if k_max < k_min or k_min < 1:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    table = Table(BLOWUP_HEADER)
    for k in range(k_min, k_max + 1):
        lam = 1.0 - 2.0 ** (-k)
        v = multiplier(MultiplierQuery("even", 1.0, lam, 1.0, tol))
        table.append((k, lam, v.real, math.log(2.0 ** (k + 1) - 1.0)))
    return BlowupResult(table)
