import math

import numpy as np
import pytest
from scipy.integrate import quad

from fraccarleson.bump import BumpSystem
from fraccarleson.kernel import (KernelParams, bad_set_measure, badset_exponent_check,
                                 decay_fit, default_xi_grid, fit_decay, h_threshold_check,
                                 kernel_profile, tt_kernel, uniform_kernel_check)
from fraccarleson.kernel import _integrand, _overlap


def psi_energy(base=2.0):
    sys = BumpSystem(base)
    lo, hi = sys.support(0)
    val, _ = quad(lambda e: sys.psi(e) ** 2 / e ** 2, lo, hi, epsabs=1e-14, epsrel=1e-14,
                  limit=200)
    return -2.0 * val


def midpoint(p, xi, n=2_000_000):
    iv = _overlap(p, abs(xi))
    ig = _integrand(p, abs(xi), iv)
    h = (iv[1] - iv[0]) / n
    t = iv[0] + h * (np.arange(n) + 0.5)
    return np.sum(ig.amplitude(t) * np.exp(1j * ig.phase.value(t))) * h


class TestParams:
    def test_defaults(self):
        p = KernelParams(2.0, -4)
        assert p.theta2 == 0.5 and p.theta1 == 0.125
        assert p.band == 2.0 ** (-0.5)

    def test_small_epsilon_theta(self):
        p = KernelParams(0.5, -4)
        assert p.theta2 == 0.25

    @pytest.mark.parametrize("kw", [dict(epsilon=1.0, j=-2), dict(epsilon=2.0, j=-2, h=0.0),
                                    dict(epsilon=2.0, j=-2, h=1.5),
                                    dict(epsilon=0.5, j=-2, theta2=0.7)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            KernelParams(**kw)


class TestKernel:
    def test_cancelled_phase_invariant(self):
        ref = psi_energy()
        vals = [tt_kernel(KernelParams(e, j, 1.0), 0.0, 1e-10)
                for e in (0.5, 2.0) for j in (-8, -3, 0)]
        for v in vals:
            assert abs(v - ref) < 1e-8
            assert abs(v - vals[0]) < 1e-10

    @pytest.mark.parametrize("eps, j, h, xi", [(2.0, -4, 0.7, 0.3), (0.5, -6, 0.3, -0.8),
                                               (0.5, -2, 1.0, 2.5), (2.0, -3, 0.95, 1.9)])
    def test_against_midpoint(self, eps, j, h, xi):
        p = KernelParams(eps, j, h)
        assert abs(tt_kernel(p, xi, 1e-10) - midpoint(p, xi)) < 1e-9

    def test_even_in_xi(self):
        p = KernelParams(0.5, -5, 0.7)
        assert tt_kernel(p, 1.1) == tt_kernel(p, -1.1)

    def test_zero_off_support(self):
        p = KernelParams(2.0, -4, 0.5)
        assert tt_kernel(p, 4.5) == 0j

    def test_profile_grid_rules(self):
        p = KernelParams(0.5, -4, 0.7)
        with pytest.raises(ValueError):
            kernel_profile(p, [])
        with pytest.raises(ValueError):
            kernel_profile(p, np.linspace(-3, 3, 11))
        g = default_xi_grid(p)
        assert g[0] == -3.0 and g[-1] == 3.0
        assert np.max(np.diff(g)) <= p.band / 8 + 1e-15

    def test_profile_csv(self):
        p = KernelParams(0.5, -2, 0.3)
        prof = kernel_profile(p, default_xi_grid(p), 1e-8)
        assert prof.table.to_csv().splitlines()[0] == "j,h,xi,re,im,abs"
        absvals = np.array(prof.table.column("abs"))
        assert max(prof.inside_sup, prof.outside_sup) == absvals.max()

    def test_outside_sup_includes_band_edge(self):
        # |K| falls steeply across the band edge; the open-set sup is its limit there
        p = KernelParams(2.0, -2, 0.7)
        edge = abs(tt_kernel(p, p.band))
        for refine in (1, 2):
            prof = kernel_profile(p, default_xi_grid(p, refine), 1e-9)
            assert prof.outside_sup == pytest.approx(edge, rel=1e-9)

    def test_polish_never_lowers_sup(self):
        p = KernelParams(0.5, -3, 0.3)
        g = default_xi_grid(p)
        plain = kernel_profile(p, g, 1e-9)
        tuned = kernel_profile(p, g, 1e-9, polish=2)
        assert tuned.inside_sup >= plain.inside_sup
        assert tuned.outside_sup >= plain.outside_sup
        assert len(tuned.table.rows) > len(plain.table.rows)

    def test_outside_sup_shrinks(self):
        # stationary-phase regime: finer scale gives a smaller outside sup
        a = kernel_profile(KernelParams(2.0, -6, 0.3), default_xi_grid(KernelParams(2.0, -6)))
        b = kernel_profile(KernelParams(2.0, -2, 0.3), default_xi_grid(KernelParams(2.0, -2)))
        assert a.outside_sup < b.outside_sup


class TestFit:
    def test_exact_geometric(self):
        js = np.arange(-8, -1)
        fit = fit_decay(js, 3.0 * 2.0 ** (0.4 * js))
        assert fit.exponent == pytest.approx(0.4) and fit.r2 == pytest.approx(1.0)
        assert fit.prefactor == pytest.approx(3.0)

    def test_constant_is_degenerate(self):
        fit = fit_decay(range(-8, -1), [0.5] * 7)
        assert fit.degenerate and fit.exponent == 0.0

    def test_zeros_are_degenerate(self):
        fit = fit_decay(range(-8, -1), [0.0] * 7)
        assert fit.degenerate and math.isnan(fit.exponent)

    def test_two_points_above_floor_are_degenerate(self):
        fit = fit_decay(range(-8, -1), [1e-14] * 5 + [1e-5, 1e-3], floor=1e-8)
        assert fit.degenerate and math.isnan(fit.r2)
        assert fit.exponent == pytest.approx(math.log2(100.0))

    def test_decay_fit_small_epsilon(self):
        fit = decay_fit(KernelParams(0.5, -8, 0.7), range(-8, -1))
        assert fit.exponent > 0 and fit.r2 > 0.9

    def test_decay_fit_needs_range(self):
        with pytest.raises(ValueError):
            decay_fit(KernelParams(0.5, -8, 0.7), [-3, -2])


class TestBadSet:
    def test_exact_case(self):
        # |0.75 eta - 0.5| <= 0.1 on (1/2, 5/2) is [8/15, 4/5]
        p = KernelParams(2.0, 0, 0.5)
        assert bad_set_measure(p, -1.0, threshold=0.1) == pytest.approx(4 / 15, abs=1e-3)

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            bad_set_measure(KernelParams(2.0, -2, 0.5), -1.0, samples=1000)

    def test_band_precondition(self):
        with pytest.raises(ValueError):
            bad_set_measure(KernelParams(2.0, -2, 0.5), 0.01)

    def test_small_h_empty(self):
        p = KernelParams(2.0, -8, 0.05)
        assert all(bad_set_measure(p, x, samples=100_000) == 0.0 for x in (-2.0, -1.0, 1.0))

    def test_exponent_fit(self):
        fit = badset_exponent_check(KernelParams(2.0, -8), range(-8, -1),
                                    h_grid=np.linspace(0.15, 1.0, 8),
                                    xi_policy=lambda p: np.linspace(-3, 3, 61))
        assert fit.extra["passed"]

    def test_h_threshold_far_xi(self):
        # positive xi keeps (1 - h^2) eta + h xi away from zero
        assert h_threshold_check(KernelParams(2.0, -6, 0.9), 1.5)

    def test_h_threshold_close_xi(self):
        # xi = -(1 - h^2) eta / h is reachable at moderate j
        assert not h_threshold_check(KernelParams(2.0, -6, 0.9), -0.8)

    def test_h_threshold_needs_large_epsilon(self):
        with pytest.raises(ValueError):
            h_threshold_check(KernelParams(0.5, -6, 0.9), 1.5)


class TestUniform:
    def test_inside_band_scales_like_one_over_n(self):
        r4 = uniform_kernel_check(4, range(0, 4))
        r16 = uniform_kernel_check(16, range(0, 4))
        assert r16.inside_sup < r4.inside_sup / 2

    def test_n4_outside_decay(self):
        r = uniform_kernel_check(4, range(0, 13))
        assert not r.fit.degenerate and r.fit.exponent >= 0.2

    def test_rejects_negative_scales(self):
        with pytest.raises(ValueError):
            uniform_kernel_check(8, [-1, 0, 1])
