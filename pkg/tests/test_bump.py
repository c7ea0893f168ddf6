import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraccarleson.bump import BumpSystem, eval_phi0, eval_psi


class TestBump:
    @pytest.mark.parametrize("base", [2.0, 2.0 ** 0.25, 3.0])
    def test_partition_of_unity(self, base):
        sys = BumpSystem(base)
        y = np.geomspace(1e-3, 1e3, 97)
        total = sum(sys.psi_j(j, y) for j in range(-80, 80))
        np.testing.assert_allclose(total, 1.0, atol=1e-12)

    def test_support(self):
        sys = BumpSystem()
        lo, hi = sys.support(2)
        assert (lo, hi) == (0.125, 0.5)
        assert eval_psi(sys, 2, 0.12) == 0.0 and eval_psi(sys, 2, 0.51) == 0.0
        assert eval_psi(sys, 2, 0.25) > 0

    def test_even(self):
        sys = BumpSystem()
        y = np.linspace(0.1, 3, 50)
        np.testing.assert_array_equal(sys.psi(y), sys.psi(-y))

    def test_phi0_telescopes(self):
        sys = BumpSystem()
        y = np.geomspace(1e-4, 4, 40)
        np.testing.assert_allclose(sys.phi0(y), sum(sys.psi_j(j, y) for j in range(1, 60)),
                                   atol=1e-12)
        with pytest.raises(ValueError):
            eval_phi0(sys, 0.0)

    def test_uniform_base(self):
        assert BumpSystem.uniform(8).base == pytest.approx(2.0 ** 0.125)

    @pytest.mark.parametrize("base", [1.0, 0.5, np.inf])
    def test_rejects_base(self, base):
        with pytest.raises(ValueError):
            BumpSystem(base)

    @given(st.floats(1e-6, 1e6))
    @settings(max_examples=50)
    def test_values_in_unit_interval(self, y):
        v = eval_psi(BumpSystem(), 0, y)
        assert 0.0 <= v <= 1.0
