"""Vectorized adaptive Gauss-Legendre panels for sums of phased pieces.

The integrand on a kink-free interval is

    amp(t) * sum_k w_k * exp(i * (phi_k(t) - phi_k(ref)))

with ``w_k = c_k * exp(i * phi_k(ref))`` so large absolute phases never
enter the per-node arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BudgetExceededError

_NODES = 16
_X, _W = np.polynomial.legendre.leggauss(_NODES)
_EPS = np.finfo(float).eps
# phase change allowed across one initial panel
_MAX_PHASE_PER_PANEL = 6.0


class Budget:
    """Panel counter shared by every numeric call of one integral."""

    def __init__(self, limit=200_000):
        self.limit = int(limit)
        self.used = 0

    def spend(self, n, estimate=0.0, error=math.inf):
        self.used += int(n)
        if self.used > self.limit:
            raise BudgetExceededError(
                f"panel budget of {self.limit} exhausted", estimate=estimate, error=error)


def _nodes(lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return mid[:, None] + half[:, None] * _X[None, :], half


class PanelIntegrand:
    """Evaluates per-piece integrand values at a batch of panels."""

    def __init__(self, pieces, amp, ref):
        self.phases = [ph for _, ph in pieces]
        self.ref = float(ref)
        angles, self.phase_noise = zip(*(ph.reduced(self.ref) for ph in self.phases))
        self.phase_noise = np.array(self.phase_noise)
        self.weights = np.array([c * np.exp(1j * a) for (c, _), a in zip(pieces, angles)],
                                dtype=complex)
        self.amp = amp

    def panel_values(self, lo, hi):
        """Per-panel complex integrals of each piece (unweighted) and abs mass."""
        t, half = _nodes(lo, hi)
        a = self.amp(t)
        out = np.empty((len(self.phases), lo.size), dtype=complex)
        for k, ph in enumerate(self.phases):
            d = ph.delta(t, self.ref)
            out[k] = (a * np.exp(1j * d)) @ _W * half
        mass = np.abs(a) @ _W * np.abs(half)
        return out, mass

    def max_rate(self, lo, hi):
        t, _ = _nodes(lo, hi)
        rate = np.zeros(lo.size)
        for ph in self.phases:
            rate = np.maximum(rate, np.max(np.abs(ph.deriv(t)), axis=1))
        return rate


def _presplit(ig, lo, hi, limit):
    for _ in range(8):
        rate = ig.max_rate(lo, hi)
        rate = np.where(np.isfinite(rate), rate, 0.0)
        # clip before the cast so huge stretches just hit the budget
        with np.errstate(over="ignore"):
            m = np.ceil(np.minimum(rate * (hi - lo) / _MAX_PHASE_PER_PANEL, 2.0 * limit + 2))
        m = m.astype(np.int64)
        m = np.maximum(m, 1)
        if np.all(m == 1):
            break
        if m.sum() > limit:
            m = np.maximum(1, (m * (limit / m.sum())).astype(np.int64))
        last = np.cumsum(m) - 1
        rep_w = np.repeat((hi - lo) / m, m)
        idx = np.arange(m.sum()) - np.repeat(last + 1 - m, m)
        new_lo = np.repeat(lo, m) + idx * rep_w
        new_hi = np.empty_like(new_lo)
        new_hi[:-1] = new_lo[1:]
        new_hi[last] = hi
        lo, hi = new_lo, new_hi
    return lo, hi


def integrate_panels(pieces, amp, lo, hi, tol, budget, grade=(False, False), ref=None):
    """Integrate ``amp * sum c_k exp(i phi_k)`` over ``[lo, hi]`` (finite).

    ``grade`` requests geometric refinement toward the left/right end.
    Returns ``(value, error, per_piece_values)``.
    """
    if not hi > lo:
        return 0j, 0.0, np.zeros(len(pieces), dtype=complex)
    ref = 0.5 * (lo + hi) if ref is None else ref
    ig = PanelIntegrand(pieces, amp, ref)
    edges = [lo, hi]
    width = hi - lo
    for pole in getattr(amp, "singular_points", lambda: [])():
        near, far = (lo, hi) if pole <= lo else (hi, lo)
        if (pole <= lo or pole >= hi) and abs(far - pole) > 4.0 * abs(near - pole) > 0:
            n = int(math.log2(abs(far - pole) / abs(near - pole)))
            edges += [pole + (near - pole) * 2.0 ** k for k in range(1, n + 1)]
    if grade[0]:
        edges += [lo + width * 2.0 ** (-k) for k in range(1, 40)]
    if grade[1]:
        edges += [hi - width * 2.0 ** (-k) for k in range(1, 40)]
    if not (grade[0] or grade[1]):
        edges += [lo + width * f for f in (0.25, 0.5, 0.75)]
    edges = np.unique(np.array(edges))
    plo, phi = _presplit(ig, edges[:-1], edges[1:], budget.limit)

    done_val = np.zeros(len(pieces), dtype=complex)
    done_err = 0.0
    while True:
        budget.spend(plo.size)
        mid = 0.5 * (plo + phi)
        whole, _ = ig.panel_values(plo, phi)
        left, mass_l = ig.panel_values(plo, mid)
        right, mass_r = ig.panel_values(mid, phi)
        halves = left + right
        comb_h = ig.weights @ halves
        comb_w = ig.weights @ whole
        err = np.abs(comb_h - comb_w)
        noise = 50.0 * _EPS * (mass_l + mass_r) * np.sum(np.abs(ig.weights))
        err = np.maximum(err, 0.0)
        settled = err <= noise
        err = np.where(settled, noise, err)
        total_err = done_err + err.sum()
        n_active = plo.size
        thresh = tol / (2.0 * max(n_active, 1))
        split = (err > thresh) & ~settled & ((phi - plo) > 64 * _EPS * np.maximum(np.abs(plo), np.abs(phi)))
        keep = ~split
        if total_err <= tol or not np.any(split):
            done_val += halves.sum(axis=1)
            done_err = total_err
            break
        done_val += halves[:, keep].sum(axis=1)
        done_err += err[keep].sum()
        plo = np.concatenate([plo[split], mid[split]])
        phi = np.concatenate([mid[split], phi[split]])
        if budget.used + plo.size > budget.limit:
            est = ig.weights @ (done_val + halves[:, split].sum(axis=1))
            raise BudgetExceededError(
                "panel budget exhausted during refinement",
                estimate=complex(est), error=float(total_err))
    per_piece = ig.weights * done_val
    phase_err = float(np.sum(np.abs(per_piece) * ig.phase_noise))
    return complex(per_piece.sum()), float(done_err + phase_err), per_piece
