"""Truncated Taylor series ("jets") evaluated at many points at once.

A jet of order ``N`` at points ``t`` is an array of shape ``(N + 1, npts)``
holding ``f^(m)(t) / m!``.  Only the handful of operations the
integration-by-parts expansion needs are provided.
"""

from __future__ import annotations

import numpy as np


def power_jet(s0, alpha, p, order, odd=False, scale=1.0):
    """Jet in ``h`` of ``branch(s) |s|**p`` at ``s = s0 + alpha*scale*h``.

    ``branch`` is 1 (``odd=False``) or ``sign(s)``.  Requires ``s0 != 0``.
    A ``scale`` comparable to ``|s0/alpha|`` keeps the coefficients O(1).
    """
    s0 = np.asarray(s0, dtype=float)
    ratio = alpha * scale / s0
    out = np.empty((order + 1,) + s0.shape)
    lead = np.abs(s0) ** p
    if odd:
        lead = lead * np.sign(s0)
    binom = 1.0
    rpow = np.ones_like(s0)
    for m in range(order + 1):
        out[m] = lead * binom * rpow
        binom *= (p - m) / (m + 1)
        rpow = rpow * ratio
    return out


def constant_jet(value, npts, order):
    out = np.zeros((order + 1, npts), dtype=np.result_type(value, float))
    out[0] = value
    return out


def mul(a, b):
    n = min(len(a), len(b))
    out = np.zeros((n,) + a.shape[1:], dtype=np.result_type(a, b))
    for m in range(n):
        out[m] = np.sum(a[: m + 1] * b[m::-1], axis=0)
    return out


def div(a, b):
    """``a / b``; ``b[0]`` must be nonzero everywhere."""
    n = min(len(a), len(b))
    out = np.zeros((n,) + a.shape[1:], dtype=np.result_type(a, b, float))
    inv0 = 1.0 / b[0]
    for m in range(n):
        acc = a[m] - np.sum(out[:m] * b[m:0:-1], axis=0) if m else a[0]
        out[m] = acc * inv0
    return out


def deriv(a):
    m = np.arange(1, len(a)).reshape((-1,) + (1,) * (a.ndim - 1))
    return a[1:] * m
