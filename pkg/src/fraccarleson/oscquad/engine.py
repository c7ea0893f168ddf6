"""Phase-aware integration of ``amp(t) * sum_k c_k exp(i phi_k(t))``.

The interval is cut at kinks and amplitude breakpoints.  Near a singular or
infinite end where the phases settle to finite limits, the pieces are kept
together (their cancellation is what makes the integral converge) and
integrated on geometric panels with a ratio-extrapolated remainder.
Everywhere else each piece is handled on its own: a numeric window around
each stationary point, and on the monotone stretches in between either
plain panels or the integration-by-parts antiderivative, trusted only
between probe points where its series is verified to converge.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from . import ibp
from .errors import BudgetExceededError, DivergenceError
from .numeric import Budget, PanelIntegrand, integrate_panels
from .stationary import _common_affine, _dominance_band, stationary_points

__all__ = ["OscIntegrand", "integrate_oscillatory", "principal_value_symmetric",
           "integrate_pieces"]

# phase offset of the numeric window around each stationary point
WINDOW_PHASE = 40.0
# monotone stretches with less total phase than this are integrated directly
DIRECT_PHASE = 600.0
# plain phases may move this much across the near-end region
NEAR_END_PHASE = 1.0
_MAX_GEOMETRIC = 1100
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class OscIntegrand:
    """``exp(i * phase(t)) * amplitude(t)`` on ``interval`` (ends may be infinite)."""

    phase: object
    amplitude: object
    interval: tuple = (-math.inf, math.inf)


class _Tally:
    def __init__(self):
        self.value = 0j
        self.error = 0.0

    def add(self, value, error):
        self.value += value
        self.error += error


def _merge_pieces(pieces):
    merged = {}
    for c, ph in pieces:
        merged[ph] = merged.get(ph, 0j) + complex(c)
    return [(c, ph) for ph, c in merged.items() if c != 0]


# ----------------------------------------------------------------- geometry

def _offset_points(phase, start, toward, targets):
    """Points ``t`` between ``start`` and ``toward`` with ``|phi(t)-phi(start)| = target``.

    Assumes ``|phi - phi(start)|`` increases monotonically on the way.
    Unreachable targets come back as ``nan``.
    """
    targets = np.asarray(targets, dtype=float)
    direction = 1.0 if toward > start else -1.0
    log_step = math.log(1.5)
    if math.isinf(toward):
        h0 = max(abs(start), 1.0) * 1e-13
        n = int(math.ceil((math.log(1e300) - math.log(h0)) / log_step)) + 1
        t = start + direction * np.exp(math.log(h0) + log_step * np.arange(n))
    else:
        span = abs(toward - start)
        n = int(math.ceil(280 * math.log(10) / log_step))
        d = np.exp(math.log(span) - 280 * math.log(10) + log_step * np.arange(n))
        d = d[d < span]
        # graded from both ends; points near ``toward`` are built from it so
        # that they stay resolvable when ``toward`` is a blow-up point
        t = np.concatenate([start + direction * d, toward - direction * d])
    t = np.concatenate([[start], t])
    t = t[np.argsort(direction * t, kind="stable")]
    if not math.isinf(toward):
        t = t[direction * (t - toward) < 0]
    with np.errstate(all="ignore"):
        g = np.abs(phase.delta(t, start))
    g = np.where(np.isfinite(g), g, np.inf)
    g = np.maximum.accumulate(g)
    idx = np.searchsorted(g, targets, side="left")
    out = np.full(targets.shape, np.nan)
    reach = idx < len(t)
    idx_r = idx[reach]
    hi = t[idx_r].copy()
    lo = t[np.maximum(idx_r - 1, 0)].copy()
    tg = targets[reach]
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        with np.errstate(all="ignore"):
            gm = np.abs(phase.delta(mid, start))
        up = gm >= tg
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    out[reach] = hi
    return out


def _finite_mid(l, r):
    if math.isinf(l) and math.isinf(r):
        return 0.0
    if math.isinf(r):
        return l + max(1.0, abs(l))
    if math.isinf(l):
        return r - max(1.0, abs(r))
    return 0.5 * (l + r)


# ------------------------------------------------------------ single piece

def _tail_decays(phase, amp, end):
    """Whether ``amp / phi'`` (the boundary term) vanishes at an oscillatory end."""
    order = amp.order_at(end)
    if math.isinf(end):
        p = max(tm.exponent for tm in phase.terms)
        return order - (p - 1.0) < 0
    p = min(tm.exponent for tm in phase.terms if tm.kink == end)
    return order - p + 1.0 > 0


def _numeric(coef, phase, amp, a, b, tol, budget, grade=(False, False)):
    v, e, _ = integrate_panels([(coef, phase)], amp, a, b, tol, budget, grade=grade)
    return v, e


def _checkpoints(phase, a, b, a_osc, b_osc):
    """Geometrically spaced probe points inside ``(a, b)``.

    Spacing is geometric in the distance ``|s|`` to the common kink of the
    phase, so every power-law crossover between terms gets sampled.  Toward
    an oscillatory end the points run past the band where the terms of
    ``phi'`` compete, into the regime ruled by a single term.
    """
    affine = _common_affine(phase)
    if affine is None:
        kinks = phase.kinks()
        ref = min(kinks, key=lambda k: min(abs(k - a), abs(k - b))) if kinks else 0.0
        affine = (1.0, -ref)
    alpha, beta = affine
    sa = alpha * a + beta if math.isfinite(a) else math.copysign(math.inf, alpha * a)
    sb = alpha * b + beta if math.isfinite(b) else math.copysign(math.inf, alpha * b)
    sigma = 1.0 if (sa + sb) > 0 or (sa == 0 and sb > 0) or (sb == 0 and sa > 0) else -1.0
    ma, mb = abs(sa), abs(sb)
    lo_m, hi_m = min(ma, mb), max(ma, mb)
    band = _dominance_band(phase)
    if band is None:
        band_lo, band_hi = 1e-30, 1e30
    elif band == ():
        band_lo, band_hi = math.inf, 0.0
    else:
        band_lo, band_hi = band
    finite = [m for m in (lo_m, hi_m) if 0 < m < math.inf]
    if math.isinf(hi_m):
        hi_m = 16.0 * max(band_hi, max(finite, default=1.0) * 1e3)
    if lo_m == 0.0:
        near_osc = (a_osc and ma == 0) or (b_osc and mb == 0)
        if near_osc:
            lo_m = min(band_lo, min(finite, default=1.0) * 1e-3) / 16.0
        else:
            lo_m = max(finite, default=1.0) * 1e-10
    if not hi_m > lo_m:
        return np.array([])
    n = int(math.ceil((math.log(hi_m) - math.log(lo_m)) / math.log(1.2)))
    m = np.exp(math.log(lo_m) + math.log(1.2) * np.arange(1, n))
    m = m[(m > min(ma, mb)) & (m < max(ma, mb))]
    t = (sigma * m - beta) / alpha
    return np.sort(t)


def _extension(pts, a, b, end):
    """A batch of probes running about 30 decades further toward ``end``."""
    steps = 1.2 ** np.arange(1, 380)
    if pts.size:
        edge = pts[0] if end == a else pts[-1]
    else:
        edge = 0.5 * (a + b) if math.isfinite(a) and math.isfinite(b) else (
            (b - 1.0 if b > 0 else 2.0 * b - 1.0) if math.isfinite(b) else
            (a + 1.0 if a < 0 else 2.0 * a + 1.0))
    if math.isfinite(end):
        return end + (edge - end) / steps
    if edge == 0.0:
        edge = math.copysign(1e-300, end)
    return edge * steps if edge * end > 0 else edge + math.copysign(1.0, end) * steps


def _monotone(coef, phase, amp, a, b, a_osc, b_osc, tol, budget):
    """Integral over a stretch where ``phi'`` keeps one sign."""
    finite = math.isfinite(a) and math.isfinite(b)
    if finite and not (a_osc or b_osc):
        if not amp.has_jets:
            return _numeric(coef, phase, amp, a, b, tol, budget)
        variation = abs(float(phase.delta(b, a)))
        if variation <= DIRECT_PHASE:
            return _numeric(coef, phase, amp, a, b, tol, budget)
    if not amp.has_jets:
        raise ValueError("amplitude without jets cannot be integrated over an oscillatory end")
    for end, osc in ((a, a_osc), (b, b_osc)):
        if osc and not _tail_decays(phase, amp, end):
            raise DivergenceError(f"oscillatory tail at {end} does not converge")
    probes = list(_checkpoints(phase, a, b, a_osc, b_osc))
    if not a_osc:
        probes.insert(0, a)
    if not b_osc:
        probes.append(b)
    pts = np.array(probes, dtype=float)
    share = tol / 4.0
    thr = 0.02 * share
    if pts.size:
        values, errors, ok, _ = ibp.antiderivative(coef, phase, amp, pts, threshold=thr)
    else:
        values = errors = np.array([], dtype=complex)
        ok = np.array([], dtype=bool)
    for end, osc in ((a, a_osc), (b, b_osc)):
        if not osc:
            continue
        for _ in range(12):
            if pts.size and ok[0 if end == a else -1]:
                break
            ext = _extension(pts, a, b, end)
            ev, ee, eok, _ = ibp.antiderivative(coef, phase, amp, ext, threshold=thr)
            pts, values, errors, ok = (np.concatenate(z) if end == b else np.concatenate(z[::-1])
                                       for z in ((pts, ext[::-1] if end == a else ext),
                                                 (values, ev[::-1] if end == a else ev),
                                                 (errors, ee[::-1] if end == a else ee),
                                                 (ok, eok[::-1] if end == a else eok)))
    # nodes: (t, E(t), err, ok); osc ends carry E = 0 exactly
    nodes = [(float(t), complex(v), float(e), bool(k)) for t, v, e, k in zip(pts, values, errors, ok)]
    if a_osc:
        nodes.insert(0, (a, 0j, 0.0, True))
    if b_osc:
        nodes.append((b, 0j, 0.0, True))
    total = _Tally()
    stretches = []
    run_start = None
    for i in range(len(nodes) - 1):
        (t0, e0, r0, k0), (t1, e1, r1, k1) = nodes[i], nodes[i + 1]
        if k0 and k1:
            if run_start is None:
                run_start = i
            continue
        if run_start is not None:
            total.add(nodes[i][1] - nodes[run_start][1], nodes[i][2] + nodes[run_start][2])
            run_start = None
        if stretches and stretches[-1][1] == t0:
            stretches[-1] = (stretches[-1][0], t1)
        else:
            stretches.append((t0, t1))
    if run_start is not None:
        total.add(nodes[-1][1] - nodes[run_start][1], nodes[-1][2] + nodes[run_start][2])
    for g0, g1 in stretches:
        if math.isinf(g0) or math.isinf(g1) or (a_osc and g0 == a) or (b_osc and g1 == b):
            raise BudgetExceededError("integration by parts never becomes accurate toward the end",
                                      total.value, math.inf)
        part = share / len(stretches)
        bound = _window_bound(phase, amp, g0, g1)
        if bound <= part:
            total.add(0j, bound)
        else:
            total.add(*_numeric(coef, phase, amp, g0, g1, part, budget))
    return total.value, total.error


def _window_bound(phase, amp, a, b, n=65):
    """Second-derivative (van der Corput) bound on a stationary window.

    ``|int amp e^{i phi}| <= 8 (sup|amp| + var amp) / sqrt(min|phi''|)``, with
    sup and variation read off ``n`` samples.  Lets windows whose phase is far
    too large to resolve in double precision be dropped when they cannot
    matter.
    """
    t = np.linspace(a, b, n)
    d2 = np.asarray(phase.deriv(t, 2), dtype=float)
    if not np.all(np.isfinite(d2)) or not (np.all(d2 > 0) or np.all(d2 < 0)):
        return math.inf
    v = np.abs(np.asarray(amp(t), dtype=complex))
    if not np.all(np.isfinite(v)):
        return math.inf
    return 8.0 * (v.max() + np.abs(np.diff(v)).sum()) / math.sqrt(np.abs(d2).min())


def _piece(coef, phase, amp, l, r, l_osc, r_osc, tol, budget):
    """Integral of one phased piece over ``[l, r]`` (no kinks inside)."""
    if math.isfinite(l) and math.isfinite(r) and not amp.has_jets:
        return _numeric(coef, phase, amp, l, r, tol, budget)
    crit = stationary_points(phase, (l, r)) if r > l else []
    bounds = [l] + [0.5 * (x + y) for x, y in zip(crit[:-1], crit[1:])] + [r]
    pieces = []  # (a, b, kind) with kind 'window' or 'mono'
    cursor = l
    for i, t0 in enumerate(crit):
        lo_b, hi_b = max(bounds[i], cursor), bounds[i + 1]
        wl = _offset_points(phase, t0, lo_b, [WINDOW_PHASE])[0]
        wr = _offset_points(phase, t0, hi_b, [WINDOW_PHASE])[0]
        wl = lo_b if not np.isfinite(wl) else wl
        wr = hi_b if not np.isfinite(wr) else wr
        if wl > cursor:
            pieces.append((cursor, wl, "mono"))
        pieces.append((max(wl, cursor), wr, "window"))
        cursor = wr
    if cursor < r:
        pieces.append((cursor, r, "mono"))
    n = max(len(pieces), 1)
    total = _Tally()
    for a, b, kind in pieces:
        if kind == "window":
            if math.isinf(a) or math.isinf(b):
                raise BudgetExceededError("stationary window reaches an infinite end", 0j, math.inf)
            bound = _window_bound(phase, amp, a, b)
            if bound <= tol / n:
                total.add(0j, bound)
            else:
                total.add(*_numeric(coef, phase, amp, a, b, tol / n, budget))
        else:
            total.add(*_monotone(coef, phase, amp, a, b, l_osc and a == l, r_osc and b == r,
                                 tol / n, budget))
    return total.value, total.error


# --------------------------------------------------------------- near ends

def _near_end_extent(plain, end, inner, other):
    """Boundary of the near-end region at ``end`` (plain phases nearly frozen)."""
    def settled(x):
        for _, ph in plain:
            lim = ph.limit(end, 1 if inner > end else -1)
            if abs(float(ph.value(x)) - lim) > NEAR_END_PHASE:
                return False
        return True

    if math.isinf(end):
        sign = 1.0 if end > 0 else -1.0
        x = sign * max(1.0, 2.0 * abs(inner) if math.isfinite(inner) else 1.0)
        for _ in range(2000):
            if settled(x) and (not math.isfinite(other) or sign * (x - other) > 0):
                return x
            x *= 2.0
        raise DivergenceError("phases do not settle toward the infinite end")
    d = abs(inner - end)
    direction = 1.0 if inner > end else -1.0
    for _ in range(1100):
        x = end + direction * d
        if settled(x):
            return x
        d *= 0.5
    return end + direction * d


def _near_end(plain, amp, end, start, tol, budget):
    """Integral from ``start`` to ``end`` over geometric panels, pieces combined."""
    ig = PanelIntegrand(plain, amp, start)
    weights = ig.weights
    infinite = math.isinf(end)
    contributions = []
    err_sum = 0.0
    value = 0j
    k = 0
    block = 24
    while k < _MAX_GEOMETRIC:
        ks = np.arange(k, k + block, dtype=float)
        if infinite:
            a = start * 2.0 ** ks
            b = start * 2.0 ** (ks + 1)
        else:
            a = end + (start - end) * 2.0 ** (-ks)
            b = end + (start - end) * 2.0 ** (-ks - 1)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        budget.spend(block)
        mid = 0.5 * (lo + hi)
        with np.errstate(all="ignore"):
            whole = weights @ ig.panel_values(lo, hi)[0]
            left, m1 = ig.panel_values(lo, mid)
            right, m2 = ig.panel_values(mid, hi)
        halves = weights @ (left + right)
        noise = 50.0 * _EPS * (m1 + m2) * np.sum(np.abs(weights))
        perr = np.maximum(np.abs(halves - whole), noise)
        if not np.all(np.isfinite(halves)):
            raise DivergenceError("integrand not finite near the end")
        for i in range(block):
            c = halves[i]
            e = perr[i]
            if e > tol / 64 and hi[i] > lo[i]:
                v, e, _ = integrate_panels(plain, amp, lo[i], hi[i], tol / 64, budget, ref=start)
                c = v
            contributions.append(c)
            value += c
            err_sum += e
        k += block
        if infinite and abs(start) * 2.0 ** k > 1e300:
            break
        if not infinite and abs(start - end) * 2.0 ** (-k) <= 4 * _EPS * max(abs(end), 1e-300):
            break
        mags = np.abs(np.array(contributions[-8:]))
        if np.all(mags <= 100.0 * noise[-1]):
            # only roundoff of the cancelling pieces is left
            return value, err_sum + mags[-1]
        ratio = float(np.max(mags[1:] / np.maximum(mags[:-1], 1e-300)))
        if ratio < 0.98:
            bound = mags[-1] * ratio / (1.0 - ratio)
            if bound < tol / 8:
                rho = contributions[-1] / contributions[-2] if contributions[-2] != 0 else 0.0
                if abs(rho) < 0.98:
                    value += contributions[-1] * rho / (1.0 - rho)
                return value, err_sum + bound
        if len(contributions) >= 200:
            old = abs(contributions[-150])
            if mags[-1] > 0.9 * old and old > 0:
                raise DivergenceError("geometric panel contributions do not decay")
    mags = np.abs(np.array(contributions[-8:]))
    ratio = float(np.max(mags[1:] / np.maximum(mags[:-1], 1e-300)))
    if ratio >= 1.0:
        raise DivergenceError("geometric panel contributions do not decay")
    bound = mags[-1] * ratio / (1.0 - ratio)
    return value, err_sum + bound


# ---------------------------------------------------------------- driver

def _blows_up(ph, point):
    return ph.blows_up_at(point)


def _subinterval(pieces, amp, l, r, tol, budget):
    """Split into near-end groups and single pieces; see the module docstring.

    If a finite end where some phase blows up defeats the piecewise
    treatment (a blow-up too slow to oscillate within floating-point
    range), the pieces are integrated together toward that end instead;
    that works whenever their combination is integrable there.
    """
    try:
        return _subinterval_impl(pieces, amp, l, r, tol, budget, False, False)
    except (BudgetExceededError, DivergenceError):
        group_l = math.isfinite(l) and any(_blows_up(ph, l) for _, ph in pieces)
        group_r = math.isfinite(r) and any(_blows_up(ph, r) for _, ph in pieces)
        if not (group_l or group_r):
            raise
        exc_info = sys.exc_info()
        try:
            return _subinterval_impl(pieces, amp, l, r, tol, budget, group_l, group_r)
        except (BudgetExceededError, DivergenceError):
            raise exc_info[1] from None


def _subinterval_impl(pieces, amp, l, r, tol, budget, group_l, group_r):
    singular = set(amp.singular_points())

    def classify(e, group):
        if math.isinf(e):
            special = True
        else:
            special = e in singular or any(_blows_up(ph, e) for _, ph in pieces)
        if group:
            return special, [], list(pieces)
        osc = [p for p in pieces if _blows_up(p[1], e)]
        plain = [p for p in pieces if not _blows_up(p[1], e)]
        return special, osc, plain

    def extent(plain, end, inner, other):
        settled = [p for p in plain if not _blows_up(p[1], end)]
        if len(settled) < len(plain):
            # grouped end: blowing-up phases never settle, start at ``inner``
            if not settled:
                return inner
            x = _near_end_extent(settled, end, inner, other)
            return x if abs(x - end) < abs(inner - end) else inner
        return _near_end_extent(plain, end, inner, other)

    l_special, l_osc, l_plain = classify(l, group_l)
    r_special, r_osc, r_plain = classify(r, group_r)
    total = _Tally()
    n_parts = len(pieces) + 2
    share = tol / n_parts
    pl, pr = l, r
    if l_special and l_plain:
        if math.isfinite(r):
            inner = l + 0.25 * (r - l) if math.isfinite(l) else r - max(1.0, abs(r))
        else:
            inner = l + max(1.0, abs(l)) if math.isfinite(l) else -1.0
        pl = extent(l_plain, l, inner, r)
    if r_special and r_plain:
        if math.isfinite(l):
            inner = r - 0.25 * (r - l) if math.isfinite(r) else max(pl, l + max(1.0, abs(l)))
        else:
            inner = pl if math.isfinite(pl) else 1.0
        pr = extent(r_plain, r, inner, pl if math.isfinite(pl) else -math.inf)
        if math.isfinite(pl) and pr < pl:
            pr = pl
    if l_special and l_plain:
        total.add(*_near_end(l_plain, amp, l, pl, share, budget))
    if r_special and r_plain:
        total.add(*_near_end(r_plain, amp, r, pr, share, budget))
    osc_l = {id(p) for p in l_osc}
    osc_r = {id(p) for p in r_osc}
    for p in pieces:
        c, ph = p
        a_osc = l_special and id(p) in osc_l
        b_osc = r_special and id(p) in osc_r
        a = l if (a_osc or not l_special) else pl
        b = r if (b_osc or not r_special) else pr
        if not b > a:
            continue
        total.add(*_piece(c, ph, amp, a, b, a_osc, b_osc, share, budget))
    return total.value, total.error


def integrate_pieces(pieces, amp, interval, tol=1e-9, budget=None):
    """Integrate ``amp * sum c_k exp(i phi_k)``; returns ``(value, error)``."""
    lo, hi = float(interval[0]), float(interval[1])
    if not tol >= 1e-12:
        raise ValueError("tol must be at least 1e-12")
    budget = Budget() if budget is None else budget
    pieces = _merge_pieces(pieces)
    h_lo, h_hi = amp.hull()
    lo, hi = max(lo, h_lo), min(hi, h_hi)
    if not pieces or not hi > lo:
        return 0j, 0.0
    cuts = set()
    for _, ph in pieces:
        cuts.update(ph.kinks())
    cuts.update(amp.breakpoints())
    cuts = sorted(x for x in cuts if lo < x < hi)
    edges = [lo] + cuts + [hi]
    total = _Tally()
    share = tol / (len(edges) - 1)
    for l, r in zip(edges[:-1], edges[1:]):
        total.add(*_subinterval(pieces, amp, l, r, share, budget))
    return total.value, total.error


def _result(value, error, full_output):
    return (value, error) if full_output else value


def integrate_oscillatory(ig, tol=1e-9, part="full", full_output=False, panel_budget=200_000):
    """Integrate ``exp(i phi) * amp`` over ``ig.interval``.

    ``part='real'`` gives ``int amp cos(phi)`` and ``part='imag'`` gives
    ``i * int amp sin(phi)``; these converge in cases where the full
    integrand does not, e.g. ``sin(t)/t`` at the origin.
    """
    lo, hi = ig.interval
    if lo == hi:
        return _result(0j, 0.0, full_output)
    if part == "full":
        pieces = [(1.0, ig.phase)]
    elif part == "real":
        pieces = [(0.5, ig.phase), (0.5, -ig.phase)]
    elif part == "imag":
        pieces = [(0.5, ig.phase), (-0.5, -ig.phase)]
    else:
        raise ValueError(f"part must be 'full', 'real' or 'imag', got {part!r}")
    sign = 1.0
    if lo > hi:
        lo, hi, sign = hi, lo, -1.0
    value, error = integrate_pieces(pieces, ig.amplitude, (lo, hi), tol, Budget(panel_budget))
    return _result(sign * value, error, full_output)


def principal_value_symmetric(ig, tol=1e-9, full_output=False, panel_budget=200_000):
    """Principal value of ``int exp(i phi(t)) / (alpha*t + beta) dt``.

    The interval must be symmetric about the pole ``c``.  Writing
    ``t = c +- s`` pairs the two sides into

        int_0^R (exp(i phi(c+s)) - exp(i phi(c-s))) / (alpha*s) ds,

    whose integrand stays bounded at ``s = 0`` whenever the PV exists.
    """
    from .amplitude import Reciprocal
    from .phase import PhaseSpec, PhaseTerm

    amp = ig.amplitude
    if not isinstance(amp, Reciprocal):
        raise TypeError("principal_value_symmetric needs a Reciprocal amplitude")
    c = amp.pole
    lo, hi = ig.interval
    radius = hi - c
    if not math.isclose(c - lo, radius, rel_tol=1e-12, abs_tol=1e-300) and not (
            math.isinf(lo) and math.isinf(hi)):
        raise ValueError("interval must be symmetric about the pole")
    if not radius > 0:
        return _result(0j, 0.0, full_output)

    def shifted(sign):
        return PhaseSpec(tuple(
            PhaseTerm(tm.coeff, tm.exponent, (sign * tm.affine[0], tm.affine[0] * c + tm.affine[1]),
                      tm.parity) for tm in ig.phase.terms))

    pieces = [(1.0, shifted(1.0)), (-1.0, shifted(-1.0))]
    value, error = integrate_pieces(pieces, Reciprocal(amp.alpha, 0.0), (0.0, radius), tol,
                                    Budget(panel_budget))
    return _result(value, error, full_output)
