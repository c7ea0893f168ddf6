"""Hilbert transform along one-variable monomial curves on 2D grids.

``H f(x1, x2) = int f(x1 - t, x2 - u(x1) sgn(t) |t|^eps) dt / t``.

Periodic in ``x2``: a partial DFT turns each frequency ``xi2`` into a 1D
operator in ``x1`` with the odd phase ``-u(x1) xi2 sgn(t)|t|^eps``.  The
``t`` integral uses the half-integer offsets of :mod:`fraccarleson.operators`,
so the output sits at ``x1 + spacing1/2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

__all__ = ["SampledSignal2D", "CurveField", "hilbert_along_curve", "direct_along_curve",
           "plancherel_check", "band_limited_2d", "row_hilbert"]


@dataclass(frozen=True)
class SampledSignal2D:
    origins: tuple
    spacings: tuple
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 2 or min(s.shape) < 2:
            raise ValueError("need a rectangular 2D sample matrix")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        if len(self.spacings) != 2 or not all(d > 0 for d in self.spacings):
            raise ValueError("spacings must be two positive reals")
        object.__setattr__(self, "origins", tuple(float(o) for o in self.origins))
        object.__setattr__(self, "spacings", tuple(float(d) for d in self.spacings))
        object.__setattr__(self, "samples", s)

    @property
    def shape(self):
        return self.samples.shape

    def axis(self, k):
        return self.origins[k] + self.spacings[k] * np.arange(self.shape[k])

    def norm(self):
        return float(math.sqrt(self.spacings[0] * self.spacings[1])
                     * np.linalg.norm(self.samples))

    def with_samples(self, samples, shift1=0.0):
        return SampledSignal2D((self.origins[0] + shift1, self.origins[1]), self.spacings,
                               samples)

    def to_csv(self):
        """Metadata line ``# {json}``, then one row per ``x1`` with ``re,im`` pairs."""
        meta = {"origins": list(self.origins), "spacings": list(self.spacings),
                "shape": list(self.shape)}
        head = ",".join(f"re_{k},im_{k}" for k in range(self.shape[1]))
        lines = ["# " + json.dumps(meta), head]
        for row in self.samples:
            lines.append(",".join(f"{v.real!r},{v.imag!r}" for v in row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CurveField:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError("curve field values must be finite")
        object.__setattr__(self, "values", v)

    def check(self, f):
        if self.values.size != f.shape[0]:
            raise ValueError("curve field must align with the x1 grid")


def _frequencies(f):
    return 2 * np.pi * sfft.fftfreq(f.shape[1], f.spacings[1])


def _offsets(f):
    n = f.shape[0]
    d = np.arange(n)[:, None] - np.arange(n)[None, :] + 0.5
    return d * f.spacings[0]


def _odd_power(y, eps):
    return np.sign(y) * np.abs(y) ** eps


def _check(f, u, eps):
    if eps == 0 or not math.isfinite(eps):
        raise ValueError("eps must be finite and nonzero")
    u.check(f)


def hilbert_along_curve(f: SampledSignal2D, u: CurveField, eps) -> SampledSignal2D:
    """Fiberwise evaluation: DFT in ``x2``, one ``x1`` operator per frequency."""
    _check(f, u, eps)
    fhat = sfft.fft(f.samples, axis=1)
    y = _offsets(f)
    base = f.spacings[0] / y
    curve = _odd_power(y, eps)
    out = np.empty_like(fhat)
    for k, xi in enumerate(_frequencies(f)):
        a = -u.values[:, None] * xi
        out[:, k] = (base * np.exp(1j * a * curve)) @ fhat[:, k]
    return f.with_samples(sfft.ifft(out, axis=1), shift1=f.spacings[0] / 2)


def direct_along_curve(f: SampledSignal2D, u: CurveField, eps) -> SampledSignal2D:
    """Physical-space double sum over ``t``, with ``f`` at shifted ``x2`` taken
    from its trigonometric interpolant (exact for band-limited periodic rows)."""
    _check(f, u, eps)
    n1, n2 = f.shape
    fhat = sfft.fft(f.samples, axis=1) / n2
    xi = _frequencies(f)
    x2 = f.axis(1) - f.origins[1]
    y = _offsets(f)
    out = np.empty((n1, n2), dtype=complex)
    for n in range(n1):
        shift = u.values[n] * _odd_power(y[n], eps)  # one per source row m
        # f(x1_m, x2 - shift_m) for all x2, via the interpolant of row m
        phase = np.exp(1j * xi[None, None, :] * (x2[None, :, None] - shift[:, None, None]))
        vals = np.einsum("mjk,mk->mj", phase, fhat)
        out[n] = (f.spacings[0] / y[n]) @ vals
    return f.with_samples(out, shift1=f.spacings[0] / 2)


def plancherel_check(f: SampledSignal2D, u: CurveField, eps):
    """``(||H f|| direct, ||H f|| fiberwise)``."""
    return direct_along_curve(f, u, eps).norm(), hilbert_along_curve(f, u, eps).norm()


def row_hilbert(f: SampledSignal2D) -> SampledSignal2D:
    """Discrete Hilbert transform in ``x1`` applied to every ``x2`` row."""
    y = _offsets(f)
    return f.with_samples((f.spacings[0] / y) @ f.samples, shift1=f.spacings[0] / 2)


def band_limited_2d(seed, n1=32, n2=32, extent=(16.0, 2 * math.pi), modes=8):
    """Seeded random ``f``: Gaussian-windowed waves in ``x1``, trigonometric
    polynomial of degree ``< n2/4`` in the periodic ``x2``."""
    rng = np.random.default_rng(seed)
    d1, d2 = extent[0] / n1, extent[1] / n2
    x1 = -extent[0] / 2 + d1 * (np.arange(n1) + 0.5)
    x2 = d2 * np.arange(n2)
    k2 = rng.integers(-(n2 // 4) + 1, n2 // 4, modes)
    w1 = rng.uniform(-0.25, 0.25, modes) * math.pi / d1
    c = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    env = np.exp(-0.5 * (x1 / (extent[0] / 8)) ** 2)
    f = sum(ci * np.exp(1j * wi * x1)[:, None] * np.exp(1j * ki * 2 * math.pi / extent[1]
                                                         * x2)[None, :]
            for ci, wi, ki in zip(c, w1, k2))
    return SampledSignal2D((x1[0], 0.0), (d1, d2), env[:, None] * f)
