"""Asymptotic antiderivative of ``amp * exp(i phi)`` by repeated integration by parts.

On a stretch where ``phi'`` has no zero,

    int amp * e^{i phi} = e^{i phi} * (D_0 - D_1 + D_2 - ...),
    D_0 = amp / (i phi'),  D_{k+1} = D_k' / (i phi'),

an asymptotic series that we truncate at its first sufficiently small term.
Derivatives come from Taylor jets, so no finite differences are involved.
The jets are taken in the local variable ``tau = t / H`` with ``H`` the
distance to the nearest kink or pole, which keeps every coefficient O(1)
even at ``t = 1e-200`` or ``1e200``.
"""

from __future__ import annotations

import numpy as np

from . import jets

ORDER = 14
_EPS = np.finfo(float).eps


def local_scale(phase, amp, t):
    """Distance from each point to the nearest kink or pole (or ``max(|t|, 1)``)."""
    marks = sorted(set(phase.kinks()) | set(getattr(amp, "singular_points", lambda: [])()))
    if not marks:
        return np.maximum(np.abs(t), 1.0)
    dist = np.min(np.abs(t[None, :] - np.array(marks)[:, None]), axis=0)
    return np.where(dist > 0, dist, 1.0)


def series_terms(phase, amp, t, order=ORDER, threshold=0.0):
    """Terms ``(-1)^k D_k(t)`` as an array of shape ``(K, npts)``.

    Generation stops early once every point has a term below ``threshold``
    or has started to diverge.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    scale = local_scale(phase, amp, t)
    # in tau: D_0 = H * amp / (i dphi/dtau), D_{k+1} = (dD_k/dtau) / (i dphi/dtau)
    dphi = jets.deriv(phase.jet(t, order, scale))
    iphi = 1j * dphi
    u = (amp.jet(t, order - 1, scale) * scale).astype(complex)
    terms = []
    sign = 1.0
    done = np.zeros(t.size, dtype=bool)
    growing = np.zeros(t.size, dtype=int)
    while len(u) >= 1:
        d = jets.div(u, iphi[: len(u)])
        term = sign * d[0]
        if terms:
            growing = np.where(np.abs(term) > np.abs(terms[-1]), growing + 1, 0)
        terms.append(term)
        done |= np.abs(term) <= threshold
        if np.all(done | (growing >= 2)) or len(d) < 2:
            break
        u = jets.deriv(d)
        sign = -sign
    return np.array(terms)


def antiderivative(coef, phase, amp, t, threshold):
    """``coef * E(t)`` at each point with truncation error, and a validity mask.

    Returns ``(value, error, ok, lead)`` where ``lead = |coef * S(t)|``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    # extreme probe points may overflow the jets; they are simply not valid
    with np.errstate(all="ignore"):
        terms = series_terms(phase, amp, t, threshold=threshold / max(abs(coef), 1e-300))
    mag = np.abs(terms)
    below = mag * abs(coef) <= threshold
    ok = np.any(below, axis=0) & np.all(np.isfinite(terms), axis=0)
    first = np.where(ok, np.argmax(below, axis=0), mag.shape[0] - 1)
    keep = np.arange(mag.shape[0])[:, None] <= first[None, :]
    s = np.sum(np.where(keep, terms, 0), axis=0)
    trunc = mag[first, np.arange(t.size)]
    with np.errstate(all="ignore"):
        phi = phase.value(t)
        noise = np.minimum(2.0, 8.0 * _EPS * phase.magnitude(t))
    s = np.where(ok, s, 0.0)
    lead = np.abs(coef * s)
    # redo rounding-limited absolute phases in extended precision
    for i in np.flatnonzero(ok & (lead * noise > 1e-3 * threshold)):
        phi[i], noise[i] = phase.reduced(t[i])
    rot = np.exp(1j * np.where(ok, phi, 0.0))
    value = coef * rot * s
    error = abs(coef) * trunc + lead * noise
    return value, error, ok, lead
