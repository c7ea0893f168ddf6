"""Critical points of a phase: geometric sign-change scan plus Brent polish."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

_RATIO = 1.01
_FAR = 1e30
_NEAR = 1e-12


def _geometric(d0, d1):
    if not d1 > d0:
        return np.array([d0])
    # in logs: the band can span e^-690 .. e^690
    n = int(math.ceil((math.log(d1) - math.log(d0)) / math.log(_RATIO))) + 1
    return np.exp(math.log(d0) + math.log(_RATIO) * np.arange(n))


def _common_affine(phase):
    affines = {tm.affine for tm in phase.terms if tm.exponent != 0}
    return affines.pop() if len(affines) == 1 else None


def _dominance_band(phase):
    """Band ``[s_min, s_max]`` of ``|s|`` holding every critical point.

    Only available when all non-constant terms share one affine argument
    ``s``; then ``phi'`` is a signed sum of powers of ``|s|`` and the
    extreme-exponent terms dominate outside the band.  Returns ``None`` if
    not applicable and ``()`` if ``phi'`` cannot vanish.
    """
    if _common_affine(phase) is None:
        return None
    k = {}
    for tm in phase.terms:
        if tm.exponent == 0:
            continue
        q = tm.exponent - 1.0
        k[q] = k.get(q, 0.0) + abs(tm.coeff * tm.exponent)
    k = {q: v for q, v in k.items() if v > 0}
    if len(k) < 2:
        return ()
    qs = sorted(k)
    n = len(qs)
    q_top, q_low = qs[-1], qs[0]
    # logs keep extreme coefficient ratios (e.g. lambda = 1e-268) finite
    log_max = max((math.log(n * k[q]) - math.log(k[q_top])) / (q_top - q) for q in qs[:-1])
    log_min = min((math.log(k[q_low]) - math.log(n * k[q])) / (q - q_low) for q in qs[1:])
    clamp = 690.0
    return (math.exp(min(max(log_min, -clamp), clamp)), math.exp(min(max(log_max, -clamp), clamp)))


def _grid_between(l, r):
    """Scan points for a kink-free open interval ``(l, r)``."""
    if math.isinf(l) and math.isinf(r):
        return np.concatenate([_grid_between(-math.inf, 0.0), [0.0], _grid_between(0.0, math.inf)])
    if math.isinf(r):
        scale = max(1.0, abs(l))
        return l + _geometric(_NEAR * scale, _FAR * scale)
    if math.isinf(l):
        return (-_grid_between(-r, math.inf))[::-1]
    width = r - l
    half = 0.5 * width
    d = _geometric(_NEAR * width, half)
    return np.unique(np.concatenate([l + d, r - d, np.linspace(l, r, 2001)[1:-1]]))


def _candidate_grid(phase, l, r):
    band = _dominance_band(phase)
    if band == ():
        return np.array([])
    if band is None:
        return _grid_between(l, r)
    alpha, beta = _common_affine(phase)
    s = _geometric(band[0] / _RATIO, band[1] * _RATIO)
    t = np.concatenate([(-s[::-1] - beta) / alpha, (s - beta) / alpha])
    t = t[(t > l) & (t < r)]
    ends = [x for x in (l, r) if math.isfinite(x)]
    return np.unique(np.concatenate([t, ends]))


def stationary_points(phase, interval):
    """Sorted zeros of ``phi'`` inside the open interval, kinks excluded.

    Kinks are available separately from ``phase.kinks()``.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise ValueError("interval must satisfy lo < hi")
    cuts = [k for k in phase.kinks() if lo < k < hi]
    bounds = [lo] + cuts + [hi]
    found = []

    def dphi(t):
        return float(phase.deriv(t))

    for l, r in zip(bounds[:-1], bounds[1:]):
        grid = _candidate_grid(phase, l, r)
        grid = grid[(grid > l) & (grid < r)]
        if grid.size == 0:
            continue
        with np.errstate(all="ignore"):
            f = phase.deriv(grid)
        ok = np.isfinite(f)
        grid, f = grid[ok], f[ok]
        found.extend(grid[f == 0.0].tolist())
        sgn = np.sign(f)
        idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
        for i in idx:
            a, b = grid[i], grid[i + 1]
            root = brentq(dphi, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
            found.append(root)
    return sorted(set(found))
