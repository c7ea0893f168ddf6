import math

import numpy as np
import pytest

from fraccarleson.operators import (ModulationField, SampledSignal1D, carleson_maximal,
                                    default_a_grid, discrete_hilbert, domination_check,
                                    high_low_split, hl_maximal, maximal_hilbert,
                                    modulated_transform, norm_estimate, seeded_pair,
                                    single_scale_norm, single_scale_sweep)
from fraccarleson.operators import single_scale_spike_ratio


def gauss(n=512, half=16.0, freq=2.0):
    return SampledSignal1D.from_function(lambda x: np.exp(-x ** 2 / 4) * np.cos(freq * x),
                                         -half, half, n)


def zero(n=64):
    return SampledSignal1D.from_function(np.zeros_like, -4, 4, n)


class TestSignal:
    def test_rejects_short_or_nonfinite(self):
        with pytest.raises(ValueError):
            SampledSignal1D(0.0, 1.0, [1.0])
        with pytest.raises(ValueError):
            SampledSignal1D(0.0, 1.0, [1.0, np.nan])

    def test_norm_is_spacing_weighted(self):
        f = SampledSignal1D(0.0, 0.25, np.ones(8))
        assert f.norm() == pytest.approx(math.sqrt(2.0))

    def test_field_positive(self):
        with pytest.raises(ValueError):
            ModulationField([1.0, 0.0])

    def test_csv_headers(self):
        f = gauss(16)
        assert f.to_table().header == ("x", "value")
        assert discrete_hilbert(f).to_table().header == ("x", "re", "im")


class TestHilbert:
    def test_sine_gives_minus_pi_cosine(self):
        half = 200 * math.pi
        f = SampledSignal1D.from_function(np.sin, -half, half, 2 ** 15)
        h = discrete_hilbert(f)
        mid = np.abs(h.x) < half / 4
        np.testing.assert_allclose(h.samples[mid].real, -math.pi * np.cos(h.x[mid]), atol=0.02 * math.pi)

    def test_constant_annihilated_at_center(self):
        f = SampledSignal1D.from_function(np.ones_like, -10, 10, 400)
        assert abs(discrete_hilbert(f).nearest(0.0)) < 1e-10

    def test_zero(self):
        assert not np.any(discrete_hilbert(zero()).samples)

    def test_output_is_staggered(self):
        f = gauss(64)
        assert discrete_hilbert(f).origin == f.origin + f.spacing / 2


class TestModulated:
    def test_zero_modulation_is_hilbert(self):
        f = gauss()
        assert np.array_equal(modulated_transform(f, 0.0, "even", 0.5).samples,
                              discrete_hilbert(f).samples)

    @pytest.mark.parametrize("a", [0.3, 2.3, 17.0])
    def test_odd_linear_conjugation(self, a):
        f = gauss()
        lhs = modulated_transform(f, a, "odd", 1.0).samples
        inner = f.with_samples(np.exp(-1j * a * f.x) * f.samples)
        rhs = np.exp(1j * a * (f.x + f.spacing / 2)) * discrete_hilbert(inner).samples
        np.testing.assert_allclose(lhs, rhs, atol=1e-8)

    def test_linearity(self):
        f, g = gauss(freq=1.0), gauss(freq=3.0)
        s = f.with_samples(2.5j * f.samples + g.samples)
        lhs = modulated_transform(s, 1.3, "even", 2.0).samples
        rhs = (2.5j * modulated_transform(f, 1.3, "even", 2.0).samples
               + modulated_transform(g, 1.3, "even", 2.0).samples)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_translation_covariance(self):
        n, k = 512, 7
        base = np.zeros(n, dtype=complex)
        base[200:260] = np.hanning(60)
        f = SampledSignal1D(0.0, 0.05, base)
        g = SampledSignal1D(0.0, 0.05, np.roll(base, k))
        tf = modulated_transform(f, 1.7, "odd", 0.5).samples
        tg = modulated_transform(g, 1.7, "odd", 0.5).samples
        # the kernel is cut at the window, so compare away from the edges
        np.testing.assert_allclose(tg[150 + k:300 + k], tf[150:300], atol=1e-12)

    def test_zero_signal(self):
        assert not np.any(modulated_transform(zero(), 3.0, "odd", 2.0).samples)


class TestMaximal:
    def chi(self):
        return SampledSignal1D.from_function(lambda x: (np.abs(x) <= 1) * 1.0, -8, 8, 1024)

    def test_hl_indicator(self):
        f = self.chi()
        m = hl_maximal(f)
        assert m.nearest(3.0) == pytest.approx(0.25, abs=f.spacing)
        assert m.nearest(0.0) == pytest.approx(1.0)
        assert not np.any(hl_maximal(zero()).samples)

    def test_hl_staggered_close_to_grid(self):
        f = gauss()
        a, b = hl_maximal(f), hl_maximal(f, staggered=True)
        assert np.max(np.abs(a.samples[1:] - b.samples[:-1])) < 0.05

    def test_maximal_hilbert_symmetry(self):
        h = maximal_hilbert(self.chi())
        assert h.nearest(0.0) < 1e-12
        assert h.nearest(2.0) > 0.5

    def test_maximal_hilbert_dominates_hilbert(self):
        f = gauss()
        assert np.all(maximal_hilbert(f).samples >= np.abs(discrete_hilbert(f).samples) - 1e-12)


class TestCarleson:
    def test_singleton(self):
        f = gauss()
        a = carleson_maximal(f, [2.0], "even", 0.5).samples
        np.testing.assert_allclose(a, np.abs(modulated_transform(f, 2.0, "even", 0.5).samples))

    def test_monotone_in_grid(self):
        f = gauss()
        small = carleson_maximal(f, [0.5, 2.0], "odd", 2.0).samples
        big = carleson_maximal(f, [0.5, 1.0, 2.0, 8.0], "odd", 2.0).samples
        assert np.all(small <= big)

    def test_sublinear(self):
        f, g = gauss(freq=1.0), gauss(freq=-2.0)
        grid = default_a_grid(4, 2.0 ** -4, 2.0 ** 4)
        s = f.with_samples(f.samples + g.samples)
        lhs = carleson_maximal(s, grid, "odd", 0.5).samples
        rhs = (carleson_maximal(f, grid, "odd", 0.5).samples
               + carleson_maximal(g, grid, "odd", 0.5).samples)
        assert np.all(lhs <= rhs + 1e-10)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            carleson_maximal(gauss(), [], "odd", 1.0)

    def test_default_grid(self):
        g = default_a_grid()
        assert g[0] == pytest.approx(2.0 ** -20) and g[-1] == pytest.approx(2.0 ** 20)


class TestSplit:
    def test_reconstructs_constant_modulation(self):
        f = gauss(256)
        high, low = high_low_split(f, ModulationField.constant(f, 1.7), "even", 2.0, j_cap=40)
        full = modulated_transform(f, 1.7, "even", 2.0).samples
        np.testing.assert_allclose(high.samples + low.samples, full, atol=1e-6)

    def test_negative_epsilon_reconstructs(self):
        f = gauss(256)
        high, low = high_low_split(f, ModulationField.constant(f, 0.8), "odd", -0.5, j_cap=40)
        full = modulated_transform(f, 0.8, "odd", -0.5).samples
        np.testing.assert_allclose(high.samples + low.samples, full, atol=1e-6)

    def test_zero(self):
        f = zero()
        high, low = high_low_split(f, ModulationField.constant(f, 1.0), "odd", 0.5)
        assert not np.any(high.samples) and not np.any(low.samples)

    def test_domination_finite_and_stable(self):
        cs = [max(domination_check(*seeded_pair(s, n), "even", 2.0).constant for s in range(5))
              for n in (512, 1024)]
        assert all(math.isfinite(c) and c > 0 for c in cs)
        assert abs(cs[1] - cs[0]) / cs[1] < 0.2

    def test_domination_zero_signal(self):
        f = zero()
        r = domination_check(f, ModulationField.constant(f, 1.0), "odd", 0.5)
        assert r.constant == 0.0 and not r.flagged


class TestSingleScale:
    def test_top_scale_order_one(self):
        v = single_scale_norm(2.0, "even", 0, trials=20, seed=3)
        assert 0.1 < v < 10

    def test_seeded(self):
        assert single_scale_norm(0.5, "odd", -2, seed=5) == single_scale_norm(0.5, "odd", -2, seed=5)

    @pytest.mark.parametrize("eps, parity, j", [(2.0, "even", -3), (0.5, "odd", -4)])
    def test_spike_below_l1_mass(self, eps, parity, j):
        ratio, mass = single_scale_spike_ratio(eps, parity, j)
        assert ratio <= mass

    def test_decay_for_quadratic(self):
        r = single_scale_sweep(2.0, "even", js=range(0, -6, -1))
        assert r.slope > 0 and r.r2 > 0.85

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            single_scale_norm(2.0, "even", 1)
        with pytest.raises(ValueError):
            single_scale_norm(2.0, "even", -1, trials=5)


class TestNormEstimate:
    def test_carleson_case_stable(self):
        grid = default_a_grid(8, 2.0 ** -6, 2.0 ** 6)
        a = norm_estimate(1.0, "odd", grid, trials=50, window=64.0, n=512).value
        b = norm_estimate(1.0, "odd", grid, trials=50, window=128.0, n=1024).value
        assert math.isfinite(a) and abs(a - b) / b < 0.2

    def test_even_linear_grows_with_witness(self):
        grid = [1.0]
        vals = [norm_estimate(1.0, "even", grid, trials=50, window=4096.0, n=2 ** 14,
                              witnesses=[1.0 - 2.0 ** -k]).table.rows[-1][1] for k in (3, 6)]
        assert vals[1] > vals[0]
        # windowed exponentials pick up the multiplier's logarithmic growth
        assert vals[1] >= 0.8 * math.log(2.0 ** 7 - 1) / math.pi

    def test_needs_trials(self):
        with pytest.raises(ValueError):
            norm_estimate(1.0, "odd", [1.0], trials=10)
