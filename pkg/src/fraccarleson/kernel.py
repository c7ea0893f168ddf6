"""TT* kernels of the single-scale operators and their bad sets.

The kernel at scale ``j`` with modulation ratio ``h`` is

    K(xi) = int exp(i c (|eta|^eps - |xi - h eta|^eps))
                * psi0(eta)/eta * psi0(xi - h eta)/(xi - h eta) d eta

with ``c = 2**(-j*eps)`` (scales ``j <= 0``) or ``c = 2**j`` together with a
base ``2**(1/n)`` bump system (the uniform large-exponent variant, ``j >= 0``).
K is even in ``xi``: the substitution ``eta -> -eta`` maps the integrand at
``-xi`` onto the one at ``xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, stats

from .bump import BumpSystem
from .oscquad import (BumpQuotient, OscIntegrand, PhaseSpec, PhaseTerm, Product,
                      integrate_oscillatory)
from .records import Table

__all__ = ["KernelParams", "DecayFit", "KernelProfile", "tt_kernel", "kernel_profile",
           "default_xi_grid", "fit_decay", "decay_fit", "bad_set_measure",
           "badset_exponent_check", "h_threshold_check", "uniform_kernel_check",
           "UniformKernelResult", "BADSET_WINDOW", "KERNEL_HEADER", "BADSET_HEADER"]

KERNEL_HEADER = ("j", "h", "xi", "re", "im", "abs")
BADSET_HEADER = ("j", "h", "xi", "measure")
# the window (1/2, 5/2) of the bad-set definition, independent of the bump support
BADSET_WINDOW = (0.5, 2.5)
# h at or below this value makes the phase derivative bounded below
H0 = 0.1


@dataclass(frozen=True)
class KernelParams:
    epsilon: float
    j: int
    h: float = 1.0
    base: float = 2.0
    theta2: float | None = None
    theta1: float | None = None
    uniform: bool = False

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or self.epsilon == 0:
            raise ValueError("epsilon must be finite and nonzero")
        if self.epsilon == 1.0 and not self.uniform:
            raise ValueError("epsilon = 1 is excluded")
        if not 0 < self.h <= 1:
            raise ValueError(f"h must lie in (0, 1], got {self.h}")
        if not self.base > 1:
            raise ValueError("base must exceed 1")
        if int(self.j) != self.j:
            raise ValueError("j must be an integer")
        object.__setattr__(self, "j", int(self.j))
        t2 = min(abs(self.epsilon), 1.0) / 2.0 if self.theta2 is None else float(self.theta2)
        if not t2 > 0:
            raise ValueError("theta2 must be positive")
        if not self.uniform and self.epsilon > 0 and not t2 < self.epsilon:
            raise ValueError("theta2 must be smaller than epsilon")
        object.__setattr__(self, "theta2", t2)
        t1 = t2 / 4.0 if self.theta1 is None else float(self.theta1)
        if not t1 > 0:
            raise ValueError("theta1 must be positive")
        object.__setattr__(self, "theta1", t1)

    @property
    def system(self):
        return BumpSystem(self.base)

    @property
    def phase_scale(self):
        return 2.0 ** self.j if self.uniform else 2.0 ** (-self.j * self.epsilon)

    @property
    def band(self):
        """Half-width of the inside band of ``xi``."""
        if self.uniform:
            return self.epsilon * 2.0 ** (-self.j / 4.0)
        return 2.0 ** (self.theta1 * self.j)

    @property
    def threshold(self):
        """Smallness level ``2**(theta2 * j)`` of the bad set."""
        return 2.0 ** (self.theta2 * self.j)


def _overlap(p, xi):
    """Hull of ``{|eta| in [lo, hi]} & {|xi - h eta| in [lo, hi]}`` or ``None``."""
    lo, hi = p.system.support(0)
    h = p.h
    pieces = []
    for s1 in (-1.0, 1.0):
        a1, b1 = sorted((s1 * lo, s1 * hi))
        for s2 in (-1.0, 1.0):
            # xi - h eta in [a2, b2]  <=>  eta in [(xi - b2)/h, (xi - a2)/h]
            a2, b2 = sorted((s2 * lo, s2 * hi))
            a, b = max(a1, (xi - b2) / h), min(b1, (xi - a2) / h)
            if b > a:
                pieces.append((a, b))
    if not pieces:
        return None
    return min(a for a, _ in pieces), max(b for _, b in pieces)


def _integrand(p, xi, interval):
    c = p.phase_scale
    phase = PhaseSpec.of(PhaseTerm(c, p.epsilon, (1.0, 0.0), "even"),
                         PhaseTerm(-c, p.epsilon, (-p.h, xi), "even"))
    sys = p.system
    amp = Product(BumpQuotient(sys, 0, (1.0, 0.0)), BumpQuotient(sys, 0, (-p.h, xi)))
    return OscIntegrand(phase, amp, interval)


def tt_kernel(p: KernelParams, xi_tilde, tol=1e-9, full_output=False):
    """``K(xi)`` without the prefactor ``2**j A**(1/eps)``; exactly 0 off the support."""
    xi = abs(float(xi_tilde))
    iv = _overlap(p, xi)
    if iv is None:
        return (0j, 0.0) if full_output else 0j
    return integrate_oscillatory(_integrand(p, xi, iv), tol=tol, full_output=full_output)


def default_xi_grid(p: KernelParams, refine=1, half_width=3.0):
    """Symmetric grid on ``[-half_width, half_width]`` fine enough for the band."""
    step = min(p.band, 1.0) / (8.0 * refine)
    n = int(math.ceil(half_width / step))
    pos = np.linspace(0.0, half_width, n + 1)
    band = np.array([p.band]) if p.band < half_width else np.array([])
    pos = np.unique(np.concatenate([pos, band]))
    return np.concatenate([-pos[:0:-1], pos])


@dataclass
class KernelProfile:
    params: KernelParams
    table: Table
    inside_sup: float
    outside_sup: float


def kernel_profile(p: KernelParams, xi_grid, tol=1e-9, strict=True, polish=0):
    """Suprema of ``|K|`` inside and outside ``|xi| <= band`` over the grid.

    ``polish > 0`` refines the ``polish`` largest grid values of each region
    by a bounded 1D maximization over the neighbouring grid cells; the
    extra evaluations are appended to the table.
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if xi_grid.size == 0:
        raise ValueError("xi grid is empty")
    if strict and not p.uniform:
        g = np.sort(xi_grid)
        if g[0] > -3.0 or g[-1] < 3.0:
            raise ValueError("xi grid must cover [-3, 3]")
        if g.size > 1 and np.max(np.diff(g)) > p.band / 8.0 * (1 + 1e-9):
            raise ValueError(f"xi spacing must be <= {p.band / 8.0:.3g}")
    values = {}
    for x in np.unique(np.abs(xi_grid)):
        values[x] = tt_kernel(p, x, tol)
    table = Table(KERNEL_HEADER)
    for x in xi_grid:
        v = values[abs(x)]
        table.append((p.j, p.h, float(x), v.real, v.imag, abs(v)))
    if polish > 0:
        for x, v in _polish(p, values, tol, polish).items():
            values[x] = v
            table.append((p.j, p.h, float(x), v.real, v.imag, abs(v)))
    # K is continuous, so the sup over the open set |xi| > band includes the
    # limit at the band edge
    inside = max((abs(v) for x, v in values.items() if x <= p.band), default=0.0)
    outside = max((abs(v) for x, v in values.items() if x >= p.band), default=0.0)
    return KernelProfile(p, table, inside, outside)


def _polish(p, values, tol, count):
    """Local maxima of ``|K|`` near the largest grid values of each region."""
    xs = np.array(sorted(values))
    mags = np.array([abs(values[x]) for x in xs])
    found = {}
    for region in (xs <= p.band, xs >= p.band):
        idx = np.flatnonzero(region)
        for i in idx[np.argsort(mags[idx])[::-1][:count]]:
            if mags[i] == 0.0:
                continue
            lo = xs[max(i - 1, idx[0])]
            hi = xs[min(i + 1, idx[-1])]
            if not hi > lo:
                continue
            res = optimize.minimize_scalar(lambda x: -abs(tt_kernel(p, x, tol)), bounds=(lo, hi),
                                           method="bounded",
                                           options={"xatol": (hi - lo) * 1e-3, "maxiter": 40})
            x = float(res.x)
            found[x] = tt_kernel(p, x, tol)
    return found


@dataclass
class DecayFit:
    """Least-squares fit ``log2(value) = log2(prefactor) - exponent * direction * j``.

    ``direction = -1`` (default) describes decay as ``j -> -inf`` like
    ``2**(exponent * j)``; ``direction = +1`` decay as ``j -> +inf``.
    """

    rows: list
    exponent: float
    prefactor: float
    r2: float
    degenerate: bool = False
    note: str = ""
    extra: dict = field(default_factory=dict)

    def summary(self):
        return {"exponent": self.exponent, "prefactor": self.prefactor, "r2": self.r2,
                "degenerate": self.degenerate, "note": self.note, **self.extra}


def fit_decay(js, values, direction=-1, floor=1e-12):
    """Fit a geometric decay rate to ``values`` indexed by scale ``js``."""
    js = np.asarray(js, dtype=float)
    values = np.asarray(values, dtype=float)
    rows = [(int(j), float(v)) for j, v in zip(js, values)]
    if js.size < 2:
        return DecayFit(rows, math.nan, math.nan, math.nan, True, "fewer than two points")
    if np.all(values < floor):
        return DecayFit(rows, math.nan, math.nan, math.nan, True,
                        f"all values below {floor:g}")
    use = values >= floor
    if np.count_nonzero(use) < 2:
        return DecayFit(rows, math.nan, math.nan, math.nan, True,
                        "fewer than two values above the floor")
    y = np.log2(values[use])
    x = js[use]
    if np.ptp(y) == 0.0:
        return DecayFit(rows, 0.0, float(2.0 ** y[0]), math.nan, True, "constant data")
    if y.size == 2:
        # a line through two points says nothing about fit quality
        slope = (y[1] - y[0]) / (x[1] - x[0])
        return DecayFit(rows, float(-direction * slope), float(2.0 ** (y[0] - slope * x[0])),
                        math.nan, True, "only two values above the floor")
    fit = stats.linregress(x, y)
    note = "" if use.all() else f"{np.count_nonzero(~use)} values below {floor:g} skipped"
    return DecayFit(rows, float(-direction * fit.slope), float(2.0 ** fit.intercept),
                    float(fit.rvalue ** 2), False, note)


def decay_fit(template: KernelParams, j_range, xi_grid=None, tol=1e-9, refine=1, polish=2):
    """Fit the outside-band sup of ``|K|`` against ``j``.

    ``xi_grid=None`` builds a compliant grid for each ``j`` (refined by
    ``refine``).  ``polish`` is passed to :func:`kernel_profile`.
    """
    j_range = [int(j) for j in j_range]
    if len(j_range) < 4:
        raise ValueError("need at least four scales")
    if not template.uniform and not set(j_range) <= set(range(-8, -1)):
        raise ValueError("j range must lie in -8..-2")
    sups, tables = [], []
    for j in j_range:
        p = replace(template, j=j)
        grid = default_xi_grid(p, refine) if xi_grid is None else xi_grid
        prof = kernel_profile(p, grid, tol, strict=xi_grid is None, polish=polish)
        sups.append(prof.outside_sup)
        tables.append(prof.table)
    # values within a few tolerances of zero carry no slope information
    fit = fit_decay(j_range, sups, direction=+1 if template.uniform else -1, floor=10 * tol)
    fit.extra["tables"] = tables
    return fit


# --------------------------------------------------------------- bad sets

def _window_samples(samples):
    lo, hi = BADSET_WINDOW
    return lo + (hi - lo) * (np.arange(samples) + 0.5) / samples


def bad_set_measure(p: KernelParams, xi_tilde, samples=1_000_000, threshold=None):
    """Measure of ``{eta in W: h eta - xi in W, |eta^(eps-1) - h (h eta - xi)^(eps-1)| <= thr}``.

    ``W = (1/2, 5/2)`` and ``thr = 2**(theta2 j)`` unless given.  Estimated on
    ``samples`` midpoints of ``W``.
    """
    if samples < 100_000:
        raise ValueError("need at least 1e5 samples")
    xi = float(xi_tilde)
    if abs(xi) < p.band * (1 - 1e-12):
        raise ValueError(f"|xi| must be at least 2**(theta1 j) = {p.band:.6g}")
    thr = p.threshold if threshold is None else float(threshold)
    eta = _window_samples(samples)
    return _measure(eta, p.epsilon, p.h, xi, thr)


def _measure(eta, eps, h, xi, thr):
    lo, hi = BADSET_WINDOW
    w = h * eta - xi
    inside = (w > lo) & (w < hi)
    if not inside.any():
        return 0.0
    e, ww = eta[inside], w[inside]
    gap = np.abs(e ** (eps - 1.0) - h * ww ** (eps - 1.0))
    return float(np.count_nonzero(gap <= thr)) * (hi - lo) / eta.size


def _xi_points(p, xi_policy):
    if callable(xi_policy):
        pts = np.asarray(xi_policy(p), dtype=float)
    elif xi_policy is None:
        grid = np.linspace(-3.0, 3.0, 241)
        pts = np.concatenate([grid, [-p.band, p.band]])
    else:
        pts = np.asarray(xi_policy, dtype=float)
    return np.unique(pts[np.abs(pts) >= p.band * (1 - 1e-12)])


def badset_exponent_check(template: KernelParams, j_range, h_grid=None, xi_policy=None,
                          samples=100_000):
    """Fit the decay of ``max |E|`` over ``(h, xi)`` against ``j``.

    The returned fit carries ``bound = theta2/2 - 0.05`` and ``passed`` in
    ``extra``; a fit whose every measure vanishes is flagged degenerate.
    """
    if not math.isclose(template.theta1, template.theta2 / 4.0):
        raise ValueError("theta1 must equal theta2/4")
    h_grid = np.linspace(0.1, 1.0, 19)[1:] if h_grid is None else np.asarray(h_grid, float)
    eta = _window_samples(samples)
    table = Table(BADSET_HEADER)
    maxima = []
    for j in j_range:
        p = replace(template, j=int(j))
        best = 0.0
        for h in h_grid:
            for xi in _xi_points(p, xi_policy):
                m = _measure(eta, p.epsilon, float(h), float(xi), p.threshold)
                if m > 0:
                    table.append((p.j, float(h), float(xi), m))
                best = max(best, m)
        maxima.append(best)
    fit = fit_decay(list(j_range), maxima)
    bound = template.theta2 / 2.0 - 0.05
    fit.extra.update({"bound": bound, "table": table,
                      "passed": (not fit.degenerate) and fit.exponent >= bound})
    return fit


def h_threshold_check(p: KernelParams, xi_tilde, samples=100_000, n_h=17):
    """True when every ``h`` in ``[1 - 2**(theta2 j/2), 1]`` (and ``p.h`` if it
    lies there) gives an empty bad set at ``xi``."""
    if not p.epsilon > 1:
        raise ValueError("the h threshold applies to epsilon > 1")
    h_crit = 1.0 - 2.0 ** (p.theta2 * p.j / 2.0)
    hs = list(np.linspace(max(h_crit, 1e-12), 1.0, n_h))
    if p.h >= h_crit:
        hs.append(p.h)
    eta = _window_samples(samples)
    xi = float(xi_tilde)
    if abs(xi) < p.band * (1 - 1e-12):
        raise ValueError(f"|xi| must be at least 2**(theta1 j) = {p.band:.6g}")
    return all(_measure(eta, p.epsilon, float(h), xi, p.threshold) == 0.0 for h in hs)


# ------------------------------------------------------ uniform variant

@dataclass
class UniformKernelResult:
    n: int
    fit: DecayFit
    inside_sup: float
    inside_constant: float
    profiles: list


def uniform_kernel_check(n, j_range, xi_grid=None, tol=1e-9, h=0.95):
    """Base ``2**(1/n)`` kernel with phase ``2**j (|eta|^n - |xi - h eta|^n)``.

    Reports the inside-band sup (``|xi| <= n 2**(-j/4)``) with its constant
    ``C = n * sup`` and a decay fit of the outside-band sup.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    j_range = [int(j) for j in j_range]
    if any(j < 0 for j in j_range):
        raise ValueError("scales must be non-negative")
    sups, inside, profiles = [], 0.0, []
    for j in j_range:
        p = KernelParams(float(n), j, h, 2.0 ** (1.0 / n), theta2=1.0, uniform=True)
        grid = _uniform_grid(p) if xi_grid is None else np.asarray(xi_grid, float)
        prof = kernel_profile(p, grid, tol, strict=False)
        profiles.append(prof)
        sups.append(prof.outside_sup)
        inside = max(inside, prof.inside_sup)
    fit = fit_decay(j_range, sups, direction=+1, floor=10 * tol)
    return UniformKernelResult(n, fit, inside, n * inside, profiles)


def _uniform_grid(p, points=161):
    """Grid over the support sumset ``|xi| <= (1 + h) * base`` plus the band edge."""
    reach = (1.0 + p.h) * p.base
    pos = np.linspace(0.0, reach, points)
    pos = np.unique(np.concatenate([pos, [min(p.band, reach)]]))
    return np.concatenate([-pos[:0:-1], pos])
