"""Phases built from signed powers of affine arguments.

Every phase in the toolkit is a finite sum of terms

    coeff * branch(alpha*t + beta) * |alpha*t + beta| ** exponent

with ``branch = 1`` ("even") or ``sign`` ("odd").  Linear frequencies are
odd terms of exponent 1, constants are even terms of exponent 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import jets

_EPS = np.finfo(float).eps

__all__ = ["PhaseTerm", "PhaseSpec"]

_PARITIES = ("even", "odd")


@dataclass(frozen=True)
class PhaseTerm:
    coeff: float
    exponent: float
    affine: tuple = (1.0, 0.0)
    parity: str = "even"

    def __post_init__(self):
        if self.parity not in _PARITIES:
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if not math.isfinite(self.exponent):
            raise ValueError("exponent must be finite")
        alpha, beta = self.affine
        if alpha == 0 or not math.isfinite(alpha) or not math.isfinite(beta):
            raise ValueError("affine argument needs finite alpha != 0 and finite beta")
        if not math.isfinite(self.coeff):
            raise ValueError("coeff must be finite")
        object.__setattr__(self, "affine", (float(alpha), float(beta)))

    @property
    def analytic(self):
        p = self.exponent
        if p < 0 or p != int(p):
            return False
        return (int(p) % 2 == 0) == (self.parity == "even")

    @property
    def kink(self):
        """Zero of the affine argument when the term is not smooth there."""
        if self.analytic:
            return None
        alpha, beta = self.affine
        return -beta / alpha

    def normalized(self):
        alpha, beta = self.affine
        if alpha > 0:
            return self
        coeff = self.coeff if self.parity == "even" else -self.coeff
        return PhaseTerm(coeff, self.exponent, (-alpha, -beta), self.parity)

    def _arg(self, t):
        alpha, beta = self.affine
        return alpha * np.asarray(t, dtype=float) + beta

    def value(self, t):
        s = self._arg(t)
        p = self.exponent
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.analytic:
                return self.coeff * s ** int(p)
            out = np.abs(s) ** p
            if self.parity == "odd":
                out = out * np.sign(s)
        return self.coeff * out

    def deriv(self, t, order=1):
        s = self._arg(t)
        alpha = self.affine[0]
        p = self.exponent
        fall = 1.0
        for m in range(order):
            fall *= p - m
        if fall == 0.0:
            return np.zeros_like(s)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.analytic:
                return self.coeff * fall * alpha ** order * s ** (int(p) - order)
            odd = (self.parity == "odd") != (order % 2 == 1)
            out = np.abs(s) ** (p - order)
            if odd:
                out = out * np.sign(s)
        return self.coeff * fall * alpha ** order * out

    def jet(self, t, order, scale=1.0):
        """Taylor coefficients in ``h`` at ``t + scale*h``."""
        s0 = self._arg(t)
        alpha = self.affine[0]
        if self.analytic:
            p = int(self.exponent)
            out = np.zeros((order + 1,) + s0.shape)
            binom = 1.0
            step = alpha * np.asarray(scale, dtype=float)
            for m in range(min(order, p) + 1):
                out[m] = binom * s0 ** (p - m) * step ** m
                binom *= (p - m) / (m + 1)
            return self.coeff * out
        return self.coeff * jets.power_jet(s0, alpha, self.exponent, order,
                                           odd=self.parity == "odd", scale=scale)

    def delta(self, t, ref):
        """``value(t) - value(ref)`` without cancellation (no kink in between)."""
        t = np.asarray(t, dtype=float)
        alpha, beta = self.affine
        s0 = alpha * ref + beta
        ds = alpha * (t - ref)
        p = self.exponent
        if p == 0:
            return np.zeros_like(t)
        if self.analytic:
            # s**p - s0**p = (s - s0) * sum_k s**k * s0**(p-1-k), no cancellation
            q = int(p)
            s = s0 + ds
            acc = np.zeros_like(s)
            for k in range(q):
                acc = acc + s ** k * s0 ** (q - 1 - k)
            return self.coeff * ds * acc
        if s0 == 0:
            return self.value(t) - self.value(ref)
        x = ds / s0
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.expm1(p * np.log1p(x))
        lead = abs(s0) ** p * (np.sign(s0) if self.parity == "odd" else 1.0)
        out = self.coeff * lead * rel
        # far from ref the direct difference is accurate and log1p is not
        bad = ~(np.abs(x) <= 0.5)
        if np.any(bad):
            out = np.where(bad, self.value(t) - self.value(ref), out)
        return out


def _canonical(terms):
    merged = {}
    for term in terms:
        term = term.normalized()
        key = (term.exponent, term.affine, term.parity)
        merged[key] = merged.get(key, 0.0) + term.coeff
    out = [PhaseTerm(c, k[0], k[1], k[2]) for k, c in merged.items() if c != 0.0]
    out.sort(key=lambda tm: (tm.exponent, tm.affine, tm.parity))
    return tuple(out)


@dataclass(frozen=True)
class PhaseSpec:
    """Finite sum of :class:`PhaseTerm`; like terms are merged on construction."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", _canonical(self.terms))

    @classmethod
    def of(cls, *terms):
        return cls(tuple(terms))

    @classmethod
    def monomial(cls, coeff, exponent, parity="even", frequency=0.0):
        """``coeff * branch(t)|t|**exponent - frequency * t``."""
        terms = [PhaseTerm(coeff, exponent, (1.0, 0.0), parity)]
        if frequency:
            terms.append(PhaseTerm(-frequency, 1.0, (1.0, 0.0), "odd"))
        return cls(tuple(terms))

    def __bool__(self):
        return bool(self.terms)

    def __neg__(self):
        return PhaseSpec(tuple(PhaseTerm(-tm.coeff, tm.exponent, tm.affine, tm.parity)
                               for tm in self.terms))

    def __add__(self, other):
        return PhaseSpec(self.terms + other.terms)

    def reflected(self):
        """Phase of ``t -> phi(-t)``."""
        return PhaseSpec(tuple(PhaseTerm(tm.coeff, tm.exponent, (-tm.affine[0], tm.affine[1]),
                                         tm.parity) for tm in self.terms))

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for tm in self.terms:
            out = out + tm.value(t)
        return out

    def deriv(self, t, order=1):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for tm in self.terms:
            out = out + tm.deriv(t, order)
        return out

    def magnitude(self, t):
        """Sum of absolute term values; sets the rounding scale of ``value``."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for tm in self.terms:
            out = out + np.abs(tm.value(t))
        return out

    def reduced(self, t):
        """``value(t)`` reduced mod ``2 pi`` at a scalar ``t``, and its rounding error.

        Large absolute phases are summed and reduced in extended precision: the
        inputs are exact doubles, so only the final rounding remains.
        """
        t = float(t)
        value = float(self.value(t))
        magnitude = float(self.magnitude(t))
        if not math.isfinite(magnitude) or 8.0 * _EPS * magnitude <= 1e-13:
            return value, min(2.0, 8.0 * _EPS * magnitude)
        with mpmath.workdps(25 + int(math.log10(magnitude))):
            total = mpmath.mpf(0)
            for tm in self.terms:
                alpha, beta = tm.affine
                s = mpmath.mpf(alpha) * mpmath.mpf(t) + mpmath.mpf(beta)
                if tm.analytic:
                    term = s ** int(tm.exponent)
                else:
                    term = abs(s) ** mpmath.mpf(tm.exponent)
                    if tm.parity == "odd" and s < 0:
                        term = -term
                total += mpmath.mpf(tm.coeff) * term
            return float(mpmath.fmod(total, 2 * mpmath.pi)), 8.0 * _EPS

    def delta(self, t, ref):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for tm in self.terms:
            out = out + tm.delta(t, ref)
        return out

    def delta_magnitude(self, t, ref):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for tm in self.terms:
            out = out + np.abs(tm.delta(t, ref))
        return out

    def jet(self, t, order, scale=1.0):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((order + 1,) + t.shape)
        for tm in self.terms:
            out = out + tm.jet(t, order, scale)
        return out

    def kinks(self):
        pts = {tm.kink for tm in self.terms if tm.kink is not None}
        return sorted(pts)

    def blows_up_at(self, point, side=1):
        """True if ``|phi| -> inf`` approaching ``point`` (``+-inf`` allowed)."""
        if math.isinf(point):
            return any(tm.exponent > 0 and not (tm.exponent == 0) for tm in self.terms)
        for tm in self.terms:
            if tm.exponent < 0 and tm.kink is not None and tm.kink == point:
                return True
        return False

    def limit(self, point, side=1):
        """One-sided limit at ``point`` from ``side`` (+1 right, -1 left)."""
        if self.blows_up_at(point, side):
            return math.inf
        total = 0.0
        for tm in self.terms:
            alpha, beta = tm.affine
            if math.isinf(point):
                if tm.exponent < 0:
                    continue
                # exponent == 0 here
                sgn = math.copysign(1.0, alpha * point)
                total += tm.coeff * (sgn if tm.parity == "odd" else 1.0)
                continue
            s = alpha * point + beta
            if s == 0.0 and not tm.analytic:
                if tm.exponent > 0:
                    continue
                sgn = math.copysign(1.0, alpha * side)
                total += tm.coeff * (sgn if tm.parity == "odd" else 1.0)
            else:
                total += float(tm.value(point))
        return total
