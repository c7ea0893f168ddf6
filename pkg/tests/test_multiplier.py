import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraccarleson.multiplier import (MultiplierQuery, blowup_probe_even_at_one, multiplier,
                                     scaling_check, signed_log_grid, sweep)
from fraccarleson.oscquad import DivergenceError


class TestQuery:
    def test_rejects_bad_parity(self):
        with pytest.raises(ValueError):
            MultiplierQuery("neither", 0.5)

    def test_rejects_nonpositive_coefficient(self):
        with pytest.raises(ValueError):
            MultiplierQuery("even", 0.5, 1.0, coefficient=0.0)


class TestMultiplier:
    @pytest.mark.parametrize("eps", [0.6, 0.8, 1.0, 1.4, 2.0, 3.0])
    def test_odd_at_zero_frequency(self, eps):
        v = multiplier(MultiplierQuery("odd", eps, 0.0))
        assert abs(v - 1j * math.pi / eps) < 1e-8

    def test_odd_negative_exponent_is_positive_imaginary(self):
        # substituting u = t^eps reverses orientation, giving i*pi/|eps|
        v = multiplier(MultiplierQuery("odd", -0.5, 0.0))
        assert abs(v - 2j * math.pi) < 1e-8

    @pytest.mark.parametrize("eps", [-0.4, 0.0, 0.3, 2.0])
    def test_even_at_zero_frequency(self, eps):
        assert abs(multiplier(MultiplierQuery("even", eps, 0.0))) < 1e-10

    def test_odd_eps_zero_diverges(self):
        with pytest.raises(DivergenceError):
            multiplier(MultiplierQuery("odd", 0.0, 1.0))

    @pytest.mark.parametrize("lam", [-5.0, -0.3, 0.7, 4.0])
    def test_carleson_case(self, lam):
        # odd eps = 1: PV int exp(i(1 - lam)t)/t dt = i pi sgn(1 - lam)
        v = multiplier(MultiplierQuery("odd", 1.0, lam))
        assert abs(v - 1j * math.pi * math.copysign(1.0, 1 - lam)) < 1e-8

    def test_even_eps_one_closed_form(self):
        # Frullani: Re m = ln((1 + lam)/(1 - lam)) for 0 < lam < 1
        lam = 0.4
        v = multiplier(MultiplierQuery("even", 1.0, lam))
        assert abs(v.real - math.log((1 + lam) / (1 - lam))) < 1e-8

    def test_error_estimate_returned(self):
        v, err = multiplier(MultiplierQuery("even", 0.4, 2.0, tol=1e-8), full_output=True)
        assert 0 <= err <= 1e-8

    @given(eps=st.floats(0.55, 1.45), lam=st.floats(-50, 50))
    @settings(max_examples=20, deadline=None)
    def test_odd_is_imaginary(self, eps, lam):
        v = multiplier(MultiplierQuery("odd", eps, lam, tol=1e-8))
        assert abs(v.real) <= 2e-8

    @given(eps=st.floats(-0.45, 0.45), lam=st.floats(0.01, 50))
    @settings(max_examples=20, deadline=None)
    def test_even_is_odd_in_frequency(self, eps, lam):
        a = multiplier(MultiplierQuery("even", eps, lam, tol=1e-8))
        b = multiplier(MultiplierQuery("even", eps, -lam, tol=1e-8))
        assert abs(a + b) <= 2e-8


class TestScaling:
    def test_fixed_point_at_zero_frequency(self):
        a, b = scaling_check("odd", 2.0, 16.0, 0.0)
        assert abs(a - 0.5j * math.pi) < 1e-8 and abs(b - 0.5j * math.pi) < 1e-8

    def test_identity_coefficient(self):
        a, b = scaling_check("odd", 2.0, 1.0, 3.0)
        assert a == b

    @pytest.mark.parametrize("parity, eps, A, lam", [
        ("even", 0.4, 5.0, 2.0), ("even", -0.3, 5.0, 2.0), ("odd", 0.7, 0.3, -1.5),
        ("odd", 2.5, 3.0, 4.0)])
    def test_rescaled_frequency(self, parity, eps, A, lam):
        a, b = scaling_check(parity, eps, A, lam, tol=1e-9)
        assert abs(a - b) <= 2e-9


class TestSweep:
    def test_signed_grid(self):
        g = signed_log_grid(1e-3, 1e3, 64)
        assert g.size == 2 * (6 * 64 + 1)
        np.testing.assert_allclose(g, -g[::-1])
        assert np.all(np.diff(g) > 0)

    def test_empty_grid(self):
        r = sweep("even", [0.3], [], tol=1e-8)
        assert r.rows == [] and r.sup == 0.0 and r.argmax is None

    def test_carleson_rows_have_modulus_pi(self):
        r = sweep("odd", [1.0], signed_log_grid(1e-3, 1e3, 4), tol=1e-9)
        assert len(r.rows) == 2 * 25
        lam = np.array([row[2] for row in r.rows])
        vals = r.values()
        np.testing.assert_allclose(np.abs(vals[lam != 1.0]), math.pi, atol=1e-6)
        # at lambda = 1 the kernel is 1/t itself, whose PV vanishes
        assert abs(vals[lam == 1.0][0]) < 1e-9

    def test_summary_matches_rows(self):
        r = sweep("even", [-0.4, 0.0, 0.4], signed_log_grid(1e-2, 1e2, 2), tol=1e-7)
        mags = [math.hypot(row[3], row[4]) for row in r.rows]
        assert r.sup == max(mags)
        i = int(np.argmax(mags))
        assert r.argmax == (r.rows[i][1], r.rows[i][2])

    def test_refinement_stable(self):
        coarse = sweep("even", [-0.4, 0.0, 0.4], signed_log_grid(1e-3, 1e3, 4), tol=1e-7)
        fine = sweep("even", [-0.4, 0.0, 0.4], signed_log_grid(1e-3, 1e3, 8), tol=5e-8)
        assert math.isfinite(coarse.sup)
        assert abs(fine.sup - coarse.sup) / coarse.sup < 0.05

    def test_rejects_unbounded_parameters(self):
        with pytest.raises(ValueError):
            sweep("even", [1.0], [0.5])
        with pytest.raises(ValueError):
            sweep("odd", [0.0], [0.5])

    def test_workers_do_not_change_results(self):
        grid = signed_log_grid(1e-1, 1e1, 2)
        a = sweep("odd", [0.8], grid, tol=1e-8, workers=1)
        b = sweep("odd", [0.8], grid, tol=1e-8, workers=2)
        assert a.rows == b.rows

    def test_csv_header(self):
        r = sweep("odd", [0.8], [0.0], tol=1e-8)
        text = r.table.to_csv()
        assert text.splitlines()[0] == "parity,epsilon,lambda,re,im,err"


class TestBlowup:
    def test_matches_log_closed_form(self):
        res = blowup_probe_even_at_one(10)
        np.testing.assert_allclose(res.real_parts(), res.closed_forms(), rtol=0.02)
        assert res.table.column("k") == list(range(4, 11))

    def test_known_values(self):
        res = blowup_probe_even_at_one(8)
        re = dict(zip(res.table.column("k"), res.real_parts()))
        assert re[4] == pytest.approx(math.log(31), rel=0.02)
        assert re[8] == pytest.approx(math.log(511), rel=0.02)

    def test_increasing_with_log2_steps(self):
        res = blowup_probe_even_at_one(14)
        assert res.strictly_increasing()
        np.testing.assert_allclose(np.diff(res.real_parts())[-4:], math.log(2), atol=1e-3)

    def test_requires_k_at_least_four(self):
        with pytest.raises(ValueError):
            blowup_probe_even_at_one(3)


class TestExtremeStationaryPoints:
    def test_far_stationary_point_meets_tol(self):
        # stationary point near t = 6.7e15, absolute phase about 1e13 rad
        q = MultiplierQuery("odd", 0.8720319747576702, 0.008225636825695862, 1.0, 1e-9)
        v, err = multiplier(q, full_output=True)
        assert err <= 1e-9 and abs(v.real) <= 2e-9
        tight = multiplier(MultiplierQuery("odd", q.epsilon, q.frequency, 1.0, 1e-11))
        assert abs(v - tight) <= 2e-9

    def test_subulp_stationary_window(self):
        # stationary point near t = 5.8e85, far below one ulp wide
        lhs, rhs = scaling_check("odd", 0.9859848065494934, 0.563232477180596,
                                 0.03487837292853444, 1e-8)
        assert abs(lhs - rhs) <= 2e-8

    def test_exponent_next_to_linear(self):
        v = multiplier(MultiplierQuery("odd", 1.0002141722970364, -0.5469399842165982, 1.0, 1e-8))
        assert math.isfinite(abs(v)) and abs(v.real) <= 2e-8
