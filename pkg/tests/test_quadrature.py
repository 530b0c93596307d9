import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expsampling.kernels import as_psi, mellin_bspline, mellin_fejer
from expsampling.quadrature import (
    QuadratureSpec,
    durrmeyer_coefficient,
    integrate_log,
    integrate_mellin,
    kantorovich_coefficient,
)
from expsampling.signals import F, G, Signal, constant
from oracles import coefficient

FEJER = mellin_fejer(math.pi)
B2 = mellin_bspline(2)


class TestQuadratureSpec:
    @pytest.mark.parametrize("kwargs", [dict(truncation_radius=0), dict(panels=3), dict(panels=0),
                                        dict(abs_tol=0), dict(rule="trapezoid")])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)

    def test_for_kernel_meets_target(self):
        spec = QuadratureSpec.for_kernel(FEJER, abs_tol=1e-4)
        assert FEJER.tail_bound(spec.truncation_radius) <= 1e-4 * (1 + 1e-9)
        capped = QuadratureSpec.for_kernel(FEJER, abs_tol=1e-9)
        assert capped.truncation_radius == 1e4


class TestIntegrateMellin:
    def test_fejer_unit_integral(self):
        spec = QuadratureSpec(truncation_radius=600.0)
        res = integrate_mellin(FEJER.evaluate, spec, tail=FEJER.tail_bound)
        T = spec.truncation_radius
        closed = res.value + float(FEJER.mass(-np.inf, -T) + FEJER.mass(T, np.inf))
        assert closed == pytest.approx(1.0, abs=1e-8)
        assert res.est_error >= FEJER.tail_bound(T)
        assert abs(res.value - 1.0) <= res.est_error

    @pytest.mark.parametrize("T", [1.0, 2.5, 10.0])
    def test_bspline(self, T):
        res = integrate_mellin(B2.evaluate, QuadratureSpec(truncation_radius=T), breakpoints=B2.knots)
        assert res.value == pytest.approx(1.0, abs=1e-10)

    def test_indicator(self):
        ind = lambda t: ((t >= 1) & (t <= math.e)).astype(float)
        res = integrate_mellin(ind, QuadratureSpec(truncation_radius=3.0), breakpoints=(0.0, 1.0))
        assert res.value == pytest.approx(1.0, abs=1e-10)

    def test_non_finite_sample_reported(self):
        bad = lambda t: np.where(np.abs(np.log(t) - 0.5) < 1e-3, np.nan, 1.0)
        with pytest.raises(ValueError, match="non-finite integrand sample"):
            integrate_mellin(bad, QuadratureSpec(truncation_radius=1.0, panels=1000))

    def test_error_includes_tail(self):
        res = integrate_mellin(FEJER.evaluate, QuadratureSpec(truncation_radius=20.0), tail=FEJER.tail_bound)
        assert res.est_error >= FEJER.tail_bound(20.0)
        assert not res.within_tol

    def test_polynomial_exact(self):
        assert integrate_log(lambda x: x ** 3 - x, 0.0, 2.0, 2).value == pytest.approx(2.0, abs=1e-10)


class TestDurrmeyerCoefficient:
    @pytest.mark.parametrize("n,k", [(1, 0), (5, 3), (20, -7), (80, 40)])
    def test_unit_signal(self, n, k):
        assert durrmeyer_coefficient(FEJER, constant(1.0), n, k).value == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("c", [0.0, 0.3, 1.0])
    def test_constant_signal(self, c):
        assert durrmeyer_coefficient(FEJER, constant(c), 10, 2).value == pytest.approx(c, abs=1e-8)

    def test_f_against_dense_oracle(self):
        # compact window [0.1, 3]: the oracle integrates the same window exactly
        val = durrmeyer_coefficient(FEJER, F, 5, 0, domain=(0.1, 3.0)).value
        assert val == pytest.approx(coefficient(FEJER, F, 5, 0, (0.1, 3.0)), abs=1e-6)

    def test_f_whole_line_against_trapezoid(self):
        # explicit part on [-T, 5 log 3] by a 10x denser trapezoid; the left tail, where f is
        # constant to machine precision, by the exact kernel mass
        T = 256.0
        val = durrmeyer_coefficient(FEJER, F, 5, 0, QuadratureSpec(truncation_radius=T)).value
        x = np.linspace(-T, 5 * math.log(3.0), int((T + 6) * 640) + 1)
        y = FEJER.profile(x) * F.evaluate(np.exp(x / 5))
        ref = np.trapezoid(y, x) if hasattr(np, "trapezoid") else np.trapz(y, x)
        ref += float(FEJER.mass(-np.inf, -T)) * float(F.evaluate(1e-300))
        assert val == pytest.approx(ref, abs=1e-6)

    def test_g_breakpoints_as_panel_edges(self):
        for k in range(-3, 20):
            val = durrmeyer_coefficient(FEJER, G, 10, k, domain=(0.1, 3.0)).value
            assert val == pytest.approx(coefficient(FEJER, G, 10, k, (0.1, 3.0)), abs=1e-8)

    def test_compact_psi(self):
        psi = as_psi(B2)
        for k in range(-5, 5):
            assert durrmeyer_coefficient(psi, F, 4, k).value == pytest.approx(coefficient(psi, F, 4, k), abs=1e-9)

    @given(st.floats(0, 1), st.floats(0, 1), st.integers(-5, 15))
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, a, b, k):
        combo = Signal("combo", lambda u: a * F.func(u) + b * G.func(u), (0.0, 3.0), (0.0, a + b), G.breakpoints)
        r = durrmeyer_coefficient(FEJER, combo, 8, k)
        rf = durrmeyer_coefficient(FEJER, F, 8, k)
        rg = durrmeyer_coefficient(FEJER, G, 8, k)
        tol = 2 * (r.est_error + a * rf.est_error + b * rg.est_error) + 1e-12
        assert abs(r.value - (a * rf.value + b * rg.value)) <= tol

    @pytest.mark.parametrize("k", [-2, 0, 4, 9])
    def test_refinement_within_estimate(self, k):
        coarse = durrmeyer_coefficient(FEJER, F, 6, k, QuadratureSpec(panels=64), (0.1, 3.0))
        fine = durrmeyer_coefficient(FEJER, F, 6, k, QuadratureSpec(panels=128), (0.1, 3.0))
        assert abs(coarse.value - fine.value) <= max(coarse.est_error, 1e-13)

    @pytest.mark.parametrize("n,k", [(5, 2), (10, -4), (20, 11)])
    def test_translation_covariance(self, n, k):
        # h(u) with index k equals h(u e^{1/n}) with index k - 1
        shift = math.exp(1.0 / n)
        moved = Signal("moved", lambda u: F.func(u * shift), (0.0, 3.0 / shift), (0.0, 1.0))
        a = durrmeyer_coefficient(FEJER, F, n, k)
        b = durrmeyer_coefficient(FEJER, moved, n, k - 1)
        assert abs(a.value - b.value) <= 2 * (a.est_error + b.est_error) + 1e-10

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            durrmeyer_coefficient(FEJER, F, 0, 0)


class TestKantorovichCoefficient:
    def test_constant(self):
        assert kantorovich_coefficient(constant(0.4), 7, 3).value == pytest.approx(0.4, abs=1e-14)

    def test_linear_in_log(self):
        # h(e^v) = v on the cell [k/n, (k+1)/n] averages to (k + 1/2)/n
        h = Signal("log", lambda u: np.log(u), (1.0, math.exp(10)), (0.0, 10.0))
        assert kantorovich_coefficient(h, 4, 5).value == pytest.approx(5.5 / 4, abs=1e-13)

    def test_jump_cell(self):
        # cell containing g's jump at u = 2: one-sided limits, not a shared node value
        from scipy.integrate import quad
        n, k = 15, 10
        cut = n * math.log(2.0) - k
        ref = quad(lambda x: float(G.evaluate(math.exp((x + k) / n))), 0, 1, points=[cut])[0]
        assert kantorovich_coefficient(G, n, k).value == pytest.approx(ref, abs=1e-8)
