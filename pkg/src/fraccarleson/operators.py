"""Discrete Carleson-type operators on uniformly sampled signals.

Every singular convolution samples its kernel at half-integer offsets
``y = (d + 1/2) * spacing``.  The output of such a transform therefore lives
on the staggered grid ``x_n + spacing/2``: it is exactly antisymmetric, never
touches ``y = 0``, and makes modulation identities such as
``T_A f = e^{iAx} H(e^{-iA.} f)`` hold to rounding.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy import signal as ssignal
from scipy import stats

from .bump import BumpSystem
from .records import Table

__all__ = ["SampledSignal1D", "ModulationField", "discrete_hilbert", "hl_maximal",
           "maximal_hilbert", "modulated_transform", "carleson_maximal", "high_low_split",
           "domination_check", "single_scale_norm", "single_scale_sweep", "norm_estimate",
           "default_a_grid", "test_function", "seeded_pair", "DominationResult", "NormEstimate",
           "SingleScaleSweep", "NORM_HEADER", "SIGNAL_HEADER"]

SIGNAL_HEADER = ("x", "value")
COMPLEX_SIGNAL_HEADER = ("x", "re", "im")
NORM_HEADER = ("trial", "ratio")
FAMILIES = ("gaussian", "modulated", "noise")


@dataclass(frozen=True)
class SampledSignal1D:
    origin: float
    spacing: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if not np.iscomplexobj(s):
            s = s.astype(float)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("need a 1D signal with at least two samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, fn, lo, hi, n):
        """Midpoint samples of ``fn`` on ``[lo, hi]``."""
        spacing = (hi - lo) / n
        sig = cls(lo + spacing / 2, spacing, np.zeros(n))
        return cls(sig.origin, spacing, fn(sig.x))

    @property
    def x(self):
        return self.origin + self.spacing * np.arange(self.samples.size)

    @property
    def size(self):
        return self.samples.size

    def norm(self):
        return float(np.sqrt(self.spacing) * np.linalg.norm(self.samples))

    def with_samples(self, samples, shift=0.0):
        return SampledSignal1D(self.origin + shift, self.spacing, samples)

    def nearest(self, x):
        """Sample value at the grid point nearest ``x``."""
        k = int(round((x - self.origin) / self.spacing))
        return self.samples[min(max(k, 0), self.size - 1)]

    def to_table(self):
        if np.iscomplexobj(self.samples):
            t = Table(COMPLEX_SIGNAL_HEADER)
            for x, v in zip(self.x, self.samples):
                t.append((float(x), float(v.real), float(v.imag)))
        else:
            t = Table(SIGNAL_HEADER)
            for x, v in zip(self.x, self.samples):
                t.append((float(x), float(v)))
        return t


@dataclass(frozen=True)
class ModulationField:
    """Positive values ``A(x_n)`` aligned with a signal grid."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)) or not np.all(v > 0):
            raise ValueError("modulation values must be finite and positive")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, f: SampledSignal1D, value):
        return cls(np.full(f.size, float(value)))

    @classmethod
    def random(cls, f: SampledSignal1D, rng, lo=0.5, hi=2.0, correlation=4.0):
        """Smooth log-uniform field in ``[lo, hi]`` with the given correlation length."""
        noise = rng.standard_normal(f.size)
        width = max(correlation / f.spacing, 1.0)
        k = np.arange(-int(4 * width), int(4 * width) + 1)
        smooth = np.convolve(noise, np.exp(-0.5 * (k / width) ** 2), mode="same")
        smooth = (smooth - smooth.min()) / max(np.ptp(smooth), 1e-300)
        return cls(lo * (hi / lo) ** smooth)

    def check(self, f):
        if self.values.size != f.size:
            raise ValueError("modulation field and signal have different lengths")


# ------------------------------------------------------------ convolution

def _offsets(n):
    """Half-integer offsets ``d + 1/2`` for ``d = -(n-1) .. n-1``."""
    return np.arange(-(n - 1), n) + 0.5


def _branch(y, eps, parity):
    mag = np.abs(y) ** eps
    return mag if parity == "even" else np.sign(y) * mag


def _check_parity(parity):
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


class _Convolver:
    """Linear convolution of one signal with many kernels on its half grid."""

    def __init__(self, f: SampledSignal1D):
        self.f = f
        n = f.size
        self.length = sfft.next_fast_len(3 * n - 2)
        self.fhat = sfft.fft(f.samples, self.length)
        self.y = _offsets(n) * f.spacing

    def apply(self, kernel):
        """``g_n = sum_m f_m kernel[n - m]`` with ``kernel`` indexed by offset."""
        n = self.f.size
        full = sfft.ifft(self.fhat * sfft.fft(kernel, self.length))
        return full[n - 1:2 * n - 1]

    def output(self, values):
        return self.f.with_samples(values, shift=self.f.spacing / 2)


def _hilbert_kernel(y, spacing):
    # complex from the start so A = 0 follows the exact same FFT path
    return (spacing / y).astype(complex)


def discrete_hilbert(f: SampledSignal1D) -> SampledSignal1D:
    """``PV int f(x - y) dy / y`` on the staggered grid, kernel cut at the window."""
    conv = _Convolver(f)
    return conv.output(conv.apply(_hilbert_kernel(conv.y, f.spacing)))


def _modulated_kernel(y, spacing, a, eps, parity):
    k = _hilbert_kernel(y, spacing)
    if a == 0:
        return k
    return k * np.exp(1j * a * _branch(y, eps, parity))


def modulated_transform(f: SampledSignal1D, a, parity, eps) -> SampledSignal1D:
    """``int exp(i A branch(y)|y|^eps) f(x - y) dy / y`` for constant ``A >= 0``."""
    _check_parity(parity)
    if not (math.isfinite(a) and a >= 0):
        raise ValueError("A must be finite and non-negative")
    conv = _Convolver(f)
    return conv.output(conv.apply(_modulated_kernel(conv.y, f.spacing, a, eps, parity)))


def default_a_grid(per_decade=48, lo=2.0 ** -20, hi=2.0 ** 20):
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    return np.logspace(math.log10(lo), math.log10(hi), n)


def carleson_maximal(f: SampledSignal1D, a_grid, parity, eps) -> SampledSignal1D:
    """Pointwise ``max_A |T_A f|`` over a finite grid of positive ``A``."""
    _check_parity(parity)
    a_grid = [float(a) for a in a_grid]
    if not a_grid:
        raise ValueError("A grid is empty")
    if any(not a > 0 for a in a_grid):
        raise ValueError("A grid must be positive")
    conv = _Convolver(f)
    best = np.zeros(f.size)
    for a in a_grid:
        g = conv.apply(_modulated_kernel(conv.y, f.spacing, a, eps, parity))
        np.maximum(best, np.abs(g), out=best)
    return conv.output(best)


# --------------------------------------------------------- maximal functions

def hl_maximal(f: SampledSignal1D, staggered=False) -> SampledSignal1D:
    """Centered maximal average of ``|f|`` over radii ``spacing * 2**k``.

    The largest radius covers the whole window; ``f`` is zero outside it.
    On the grid points the window sums use the trapezoid rule; with
    ``staggered`` the values sit at ``x_n + spacing/2`` and the windows hold
    whole cells.
    """
    a = np.abs(f.samples)
    n = a.size
    pad = np.concatenate([np.zeros(n + 1), a, np.zeros(n + 1)])
    csum = np.concatenate([[0.0], np.cumsum(pad)])
    idx = np.arange(n) + n + 1

    def window(lo, hi):  # sum of pad[lo..hi] inclusive
        return csum[hi + 1] - csum[lo]

    best = np.zeros(n)
    r = 1
    while True:
        if staggered:
            total = window(idx - r + 1, idx + r)
        else:
            total = window(idx - r, idx + r) - 0.5 * (pad[idx - r] + pad[idx + r])
        np.maximum(best, total / (2 * r), out=best)
        if r >= n:
            break
        r = min(2 * r, n)
    shift = f.spacing / 2 if staggered else 0.0
    return f.with_samples(best, shift=shift)


def maximal_hilbert(f: SampledSignal1D) -> SampledSignal1D:
    """``sup_delta |int_{|y| > delta} f(x - y) dy / y|`` over ``delta = 0, spacing, 2 spacing, ...``.

    Values sit on the staggered grid, like :func:`discrete_hilbert`.
    """
    conv = _Convolver(f)
    k = _hilbert_kernel(conv.y, f.spacing)
    best = np.abs(conv.apply(k))
    delta = f.spacing
    while delta < f.size * f.spacing:
        np.maximum(best, np.abs(conv.apply(np.where(np.abs(conv.y) > delta, k, 0.0))), out=best)
        delta *= 2
    return conv.output(best)


# ----------------------------------------------------------- high/low split

def _split_weights(u, eps, j_cap, base):
    """Weights ``sum_{j>0} psi_j(u)`` and ``sum_{-J<=j<=0} psi_j(u)``.

    The partition telescopes: ``sum_{j=-J}^{K} psi_j(u) = eta(b^-J u) - eta(b^(K+1) u)``.
    For negative ``eps`` the roles of large and small ``u`` swap, so the scale
    index is mirrored.
    """
    sys = BumpSystem(base)
    if eps > 0:
        high = sys.eta(base * u)
        low = sys.eta(base ** (-j_cap) * u) - high
    else:
        # sum_{j<0} psi_j(u) = 1 - eta(u); sum_{0<=j<=J} psi_j(u) = eta(u) - eta(b^(J+1) u)
        high = 1.0 - sys.eta(u)
        low = sys.eta(u) - sys.eta(base ** (j_cap + 1) * u)
    return high, low


def high_low_split(f: SampledSignal1D, field_a: ModulationField, parity, eps, j_cap=30,
                   base=2.0, block=256):
    """``(high, low)`` parts of ``T_{A(x)} f`` by direct summation per output point.

    Output ``n`` (at ``x_n + spacing/2``) uses the field value ``A(x_n)``.
    """
    _check_parity(parity)
    if eps == 0:
        raise ValueError("eps must be nonzero")
    if j_cap < 1:
        raise ValueError("J must be a positive integer")
    field_a.check(f)
    n = f.size
    high = np.zeros(n, dtype=complex)
    low = np.zeros(n, dtype=complex)
    m = np.arange(n)
    for start in range(0, n, block):
        rows = np.arange(start, min(start + block, n))
        y = (rows[:, None] - m[None, :] + 0.5) * f.spacing
        a = field_a.values[rows][:, None]
        kern = np.exp(1j * a * _branch(y, eps, parity)) * (f.spacing / y)
        wh, wl = _split_weights(a ** (1.0 / eps) * np.abs(y), eps, j_cap, base)
        high[rows] = (kern * wh) @ f.samples
        low[rows] = (kern * wl) @ f.samples
    shift = f.spacing / 2
    return f.with_samples(high, shift), f.with_samples(low, shift)


@dataclass
class DominationResult:
    constant: float
    ratios: np.ndarray
    flagged: bool
    high: SampledSignal1D
    bound: SampledSignal1D

    def summary(self):
        return {"constant": self.constant, "flagged": self.flagged}


def domination_check(f: SampledSignal1D, field_a: ModulationField, parity, eps, j_cap=30):
    """Smallest ``C`` with ``|high| <= C (M f + H* f)`` on the staggered grid."""
    high, _ = high_low_split(f, field_a, parity, eps, j_cap)
    bound = hl_maximal(f, staggered=True).samples + maximal_hilbert(f).samples
    lhs = np.abs(high.samples)
    pos = bound > 0
    flagged = bool(np.any(lhs[~pos] > 0))
    ratios = np.zeros_like(lhs)
    ratios[pos] = lhs[pos] / bound[pos]
    c = float(ratios.max()) if ratios.size else 0.0
    return DominationResult(c, ratios, flagged, high, f.with_samples(bound, f.spacing / 2))


# -------------------------------------------------------------- test families

def test_function(kind, x, rng, width, frequency):
    """Seeded test function on points ``x`` (not a pytest test).

    ``width`` sets the envelope scale and ``frequency`` the largest
    modulation or band edge.
    """
    w = width * math.exp(rng.uniform(-1.0, 1.0))
    c = rng.uniform(-0.5, 0.5) * width
    env = np.exp(-0.5 * ((x - c) / w) ** 2)
    if kind == "gaussian":
        return env.astype(complex)
    if kind == "modulated":
        return env * np.exp(1j * rng.uniform(-frequency, frequency) * x)
    if kind == "noise":
        noise = rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size)
        freqs = 2 * np.pi * sfft.fftfreq(x.size, x[1] - x[0])
        band = sfft.ifft(np.where(np.abs(freqs) <= frequency, sfft.fft(noise), 0))
        return env * band
    raise ValueError(f"unknown test family {kind!r}")


def seeded_pair(seed, n, window=64.0, bandwidth=4.0, modes=12, a_range=(0.5, 2.0)):
    """Band-limited ``f`` and smooth field ``A`` drawn as continuous functions.

    Both are sampled at ``n`` midpoints of ``[-window/2, window/2]``, so a
    larger ``n`` refines the same pair.
    """
    rng = _rng(seed, 7)
    freq = rng.uniform(-bandwidth, bandwidth, modes)
    coef = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    width = window / 8 * math.exp(rng.uniform(-0.5, 0.5))
    a_freq = rng.uniform(0.0, 0.5, 4)
    a_phase = rng.uniform(0.0, 2 * math.pi, 4)
    lo, hi = a_range

    def fn(x):
        wave = np.exp(1j * np.outer(x, freq)) @ coef
        return wave * np.exp(-0.5 * (x / width) ** 2)

    def afn(x):
        s = np.mean(np.cos(np.outer(x, a_freq) + a_phase), axis=1)
        return lo * (hi / lo) ** (0.5 + 0.5 * s)

    f = SampledSignal1D.from_function(fn, -window / 2, window / 2, n)
    return f, ModulationField(afn(f.x))


def _rng(seed, *keys):
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + [int(k) + 1000 for k in keys]))


def _scale_grid(eps, j, base):
    """Annulus ``[lo, hi]`` of scale ``j`` in ``u = A^(1/eps) y`` and a step resolving it."""
    lo, hi = BumpSystem(base).support(j)
    omega = abs(eps) * max(lo ** (eps - 1.0), hi ** (eps - 1.0))
    step = min(math.pi / (4.0 * omega), lo / 16.0)
    return lo, hi, omega, step


def _scale_kernel(eps, parity, a, j, base, spacing):
    """Sampled ``exp(i A branch(y)|y|^eps) psi_j(A^(1/eps) y) / y * spacing`` on its support."""
    lo, hi = BumpSystem(base).support(j)
    s = a ** (-1.0 / eps)
    dmax = int(math.ceil(hi * s / spacing)) + 1
    y = (np.arange(-dmax, dmax) + 0.5) * spacing
    u = np.abs(y) / s
    keep = (u >= lo) & (u <= hi)
    y = y[keep]
    psi = BumpSystem(base).psi_j(j, y / s)
    return np.exp(1j * a * _branch(y, eps, parity)) * psi * spacing / y


def _single_trial(args):
    eps, parity, j, base, seed, trial, kind = args
    rng = _rng(seed, j, trial)
    a = math.exp(rng.uniform(math.log(0.25), math.log(4.0)))
    lo, hi, omega, step = _scale_grid(eps, j, base)
    s = a ** (-1.0 / eps)
    spacing = step * s
    if kind == "spike":
        f = np.array([1.0 + 0j])
    else:
        width = min(hi, 2000 * step) / 2
        half = 4 * 2.7183 * width + 0.5 * width
        x = np.arange(-half, half, step)
        f = test_function(kind, x, rng, width, 1.5 * omega)
    k = _scale_kernel(eps, parity, a, j, base, spacing)
    g = ssignal.oaconvolve(f, k, mode="full") if f.size > 1 else f[0] * k
    return float(np.linalg.norm(g) / np.linalg.norm(f))


def single_scale_norm(eps, parity, j, trials=20, seed=0, base=2.0, workers=1, full_output=False):
    """Largest ``||T^j f|| / ||f||`` over a seeded family and random constant ``A``.

    ``T^j f(x) = int exp(i A branch(y)|y|^eps) psi_j(A^(1/eps) y) f(x - y) dy / y``.
    Work happens in ``u = A^(1/eps) y`` units, with a step that resolves the
    phase on the scale-``j`` annulus.
    """
    _check_parity(parity)
    if j > 0:
        raise ValueError("j must be <= 0")
    if trials < 20:
        raise ValueError("need at least 20 trials")
    if eps == 0:
        raise ValueError("eps must be nonzero")
    jobs = [(eps, parity, j, base, seed, t, FAMILIES[t % len(FAMILIES)]) for t in range(trials)]
    ratios = _map(_single_trial, jobs, workers)
    table = Table(NORM_HEADER, [(t, r) for t, r in enumerate(ratios)])
    best = max(ratios)
    return (best, table) if full_output else best


def single_scale_spike_ratio(eps, parity, j, seed=0, base=2.0):
    """Ratio for a one-sample spike together with the kernel's L1 mass."""
    rng = _rng(seed, j, 0)
    a = math.exp(rng.uniform(math.log(0.25), math.log(4.0)))
    _, _, _, step = _scale_grid(eps, j, base)
    spacing = step * a ** (-1.0 / eps)
    k = _scale_kernel(eps, parity, a, j, base, spacing)
    ratio = _single_trial((eps, parity, j, base, seed, 0, "spike"))
    return ratio / math.sqrt(spacing), float(np.sum(np.abs(k)))


@dataclass
class SingleScaleSweep:
    js: list
    norms: list
    slope: float
    r2: float
    table: Table = field(default=None)

    def summary(self):
        return {"sigma": self.slope, "r2": self.r2,
                "log2_norms": [math.log2(v) for v in self.norms]}


def single_scale_sweep(eps, parity, js=range(0, -9, -1), trials=20, seed=0, workers=1):
    """Single-scale norms over ``js`` and the slope of ``log2`` norm against ``j``."""
    js = [int(j) for j in js]
    norms = []
    table = Table(("j", "trial", "ratio"))
    for j in js:
        best, t = single_scale_norm(eps, parity, j, trials, seed, workers=workers,
                                    full_output=True)
        norms.append(best)
        for row in t.rows:
            table.append((j,) + tuple(row))
    fit = stats.linregress(js, np.log2(norms))
    return SingleScaleSweep(js, norms, float(fit.slope), float(fit.rvalue ** 2), table)


# ------------------------------------------------------------ norm estimates

@dataclass
class NormEstimate:
    value: float
    table: Table

    def summary(self):
        return {"estimate": self.value, "trials": len(self.table.rows)}


def _norm_trial(args):
    eps, parity, a_grid, seed, trial, window, n, kind, witness = args
    grid = SampledSignal1D.from_function(lambda x: np.zeros_like(x), -window / 2, window / 2, n)
    if kind == "witness":
        taper = ssignal.windows.tukey(n, 0.25)
        f = grid.with_samples(taper * np.exp(1j * witness * grid.x))
    else:
        rng = _rng(seed, trial)
        f = grid.with_samples(test_function(kind, grid.x, rng, window / 16,
                                            0.5 * math.pi / grid.spacing))
    g = carleson_maximal(f, a_grid, parity, eps)
    return g.norm() / f.norm()


def norm_estimate(eps, parity, a_grid=None, trials=50, seed=0, window=64.0, n=1024,
                  witnesses=(), workers=1):
    """Empirical lower bound ``max ||C f|| / ||f||`` for the maximal operator.

    ``witnesses`` adds tapered exponentials ``exp(i lambda x)`` to the family,
    one per frequency.
    """
    _check_parity(parity)
    if trials < 50:
        raise ValueError("need at least 50 trials")
    a_grid = default_a_grid() if a_grid is None else np.asarray(a_grid, dtype=float)
    a_grid = tuple(float(a) for a in a_grid)
    jobs = [(eps, parity, a_grid, seed, t, window, n, FAMILIES[t % len(FAMILIES)], None)
            for t in range(trials)]
    jobs += [(eps, parity, a_grid, seed, trials + i, window, n, "witness", float(w))
             for i, w in enumerate(witnesses)]
    ratios = _map(_norm_trial, jobs, workers)
    table = Table(NORM_HEADER, [(t, r) for t, r in enumerate(ratios)])
    return NormEstimate(max(ratios), table)


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]
