import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from sandcal import (
    SoilState,
    TestCase,
    elaborate_td,
    integrate,
    integrate_population,
    integration_time_oe,
    integration_time_td,
    rate_oe,
)
from sandcal.errors import InputDataError
from conftest import W_VECTOR


class TestIntegrationTimes:
    def test_oe_hand_value(self):
        assert integration_time_oe(0.7, 0.6) == pytest.approx(
            -math.log(1 - 0.1 / 1.7), rel=1e-14)
        assert integration_time_oe(0.7, 0.6) == pytest.approx(0.060625, abs=5e-7)

    def test_oe_analytic_consistency(self):
        # e(t) = (1+e0) exp(-t) - 1 must hit e_fin at t_f
        e0, e_fin = 0.83, 0.66
        t_f = integration_time_oe(e0, e_fin)
        assert (1 + e0) * math.exp(-t_f) - 1 == pytest.approx(e_fin, rel=1e-14)

    def test_oe_rejects_non_compression(self):
        with pytest.raises(InputDataError):
            integration_time_oe(0.7, 0.7)

    def test_td_identity(self):
        assert integration_time_td(0.095) == 0.095

    def test_td_rejects_non_positive(self):
        with pytest.raises(InputDataError):
            integration_time_td(0.0)


class TestElaborateTD:
    def test_initial_point(self):
        eps_a, eps_v, q = elaborate_td([0.0], [-0.3], [-0.1], [0.7], 0.7)
        assert eps_a[0] == 0.0
        assert eps_v[0] == 0.0
        assert q[0] == pytest.approx(0.2)

    def test_compression_positive_volume(self):
        _, eps_v, _ = elaborate_td([0.0, 0.1], [-0.3, -0.4], [-0.1, -0.1],
                                   [0.7, 0.6], 0.7)
        assert eps_v[1] == pytest.approx(0.1 / 1.7, rel=1e-12)
        assert eps_v[1] > 0


class TestIntegrateOE:
    def test_single_step_definition(self, w_params, oe_test):
        curve = integrate(w_params, oe_test, 1)
        t_f = oe_test.t_f
        rate = rate_oe(w_params, oe_test.initial)
        assert curve.columns["sigma_v"][1] == pytest.approx(
            -(oe_test.initial.T1 + t_f * rate.dT1), rel=1e-14)
        assert curve.columns["e"][1] == pytest.approx(
            oe_test.initial.e + t_f * rate.de, rel=1e-14)

    def test_void_track_hits_terminal(self, w_params, oe_test):
        curve = integrate(w_params, oe_test, 100)
        assert curve.feasible
        assert len(curve) == 101
        assert abs(curve.columns["e"][-1] - oe_test.e_fin) <= 1e-4

    def test_observed_order_one(self, w_params, oe_test):
        # Euler error on the void-ratio track vs the exact exponential
        e0 = oe_test.initial.e
        t_f = oe_test.t_f
        exact = float(oracles.oe_void_ratio(e0, t_f))
        errs = []
        for n in (50, 100, 200, 400):
            curve = integrate(w_params, oe_test, n)
            errs.append(abs(curve.columns["e"][-1] - exact))
        for coarse, fine in zip(errs, errs[1:]):
            assert fine == pytest.approx(coarse / 2, rel=0.1)

    def test_infeasible_initial_state(self, w_params, oe_test):
        # initial void ratio above e_i at the initial pressure
        bad = TestCase("OE", 1, SoilState(-0.01, -0.005, 1.00), oe_test.data)
        curve = integrate(w_params, bad, 100)
        assert not curve.feasible
        assert len(curve) == 0
        assert curve.reached_fraction == 0.0

    def test_truncation_is_monotone(self, oe_test):
        # a candidate whose run dies mid-way emits no further points
        from sandcal import SHParameters
        v = list(W_VECTOR)
        v[6] = 0.649   # e_d0 close to the running void ratio
        p = SHParameters.from_vector(v)
        start = TestCase("OE", 1, SoilState(-0.01, -0.005, 0.640),
                         np.array([[0.64, 0.01], [0.55, 2.0]]))
        curve = integrate(p, start, 100)
        if not curve.feasible:
            assert 0 < len(curve) <= 100
            assert 0.0 <= curve.reached_fraction < 1.0


class TestIntegrateTD:
    def test_constant_radial_stress(self, w_params, td_test):
        curve = integrate(w_params, td_test, 100)
        assert curve.feasible
        # radial stress never drifts: checked through q vs the raw state
        # by rebuilding T2 from the closure residual accumulation
        # (|T2 - T2(0)| <= 1e-6 |T2(0)|)
        # the eps_a grid equals the time grid exactly
        t_f = td_test.t_f
        np.testing.assert_allclose(curve.columns["eps_a"],
                                   np.linspace(0.0, t_f, 101), rtol=0, atol=1e-15)

    def test_radial_drift_bound(self, w_params, td_test):
        pop = np.array([W_VECTOR])
        curves = integrate_population(pop, td_test, 100)
        # reconstruct T2 from q and the OE columns is not possible here;
        # use the internal state instead via a scalar march
        from sandcal.constitutive import rate_td, SoilState as S
        state = td_test.initial
        t2_0 = state.T2
        dt = td_test.t_f / 100
        d2 = None
        for _ in range(100):
            r, d2 = rate_td(w_params, state, d2_guess=d2)
            state = S(state.T1 + dt * r.dT1, state.T2 + dt * r.dT2,
                      state.e + dt * r.de)
            assert abs(state.T2 - t2_0) <= 1e-6 * abs(t2_0)

    def test_eps_v_starts_at_zero(self, w_params, td_test):
        curve = integrate(w_params, td_test, 100)
        assert curve.columns["eps_v"][0] == 0.0

    def test_deterministic(self, w_params, td_test):
        c1 = integrate(w_params, td_test, 100)
        c2 = integrate(w_params, td_test, 100)
        for k in c1.columns:
            np.testing.assert_array_equal(c1.columns[k], c2.columns[k])


class TestPopulationPath:
    def test_matches_scalar_oe(self, w_params, oe_test, td_test):
        rng = np.random.default_rng(3)
        lo = np.array([31.0, 700.0, 0.18, 0.85, 0.15, 0.8, 0.54, 1.06])
        hi = np.array([35.0, 2000.0, 0.35, 1.05, 0.35, 1.8, 0.64, 1.2])
        pop = lo + rng.random((20, 8)) * (hi - lo)
        for test in (oe_test, td_test):
            curves = integrate_population(pop, test, 60)
            for i, row in enumerate(pop):
                from sandcal import SHParameters
                scalar = integrate(SHParameters.from_vector(row), test, 60)
                assert bool(curves.feasible[i]) == scalar.feasible
                if not scalar.feasible:
                    continue
                for k, col in scalar.columns.items():
                    np.testing.assert_allclose(curves.columns[k][i], col,
                                               rtol=1e-9, atol=1e-12)

    def test_nan_after_truncation(self, oe_test):
        # unusable parameter rows yield all-NaN curves and zero reach
        pop = np.array([W_VECTOR, [33, 1000, 0.25, 0.95, 0.25, 1.5, 0.9999, 1.0001]])
        curves = integrate_population(pop, oe_test, 50)
        assert curves.feasible[0]
        assert not curves.feasible[1]
        assert np.all(np.isnan(curves.columns["e"][1]))

    def test_bad_shape_rejected(self, oe_test):
        with pytest.raises(InputDataError):
            integrate_population(np.zeros((3, 5)), oe_test, 10)


class TestTestCase:
    def test_terminal_values(self, oe_test, td_test):
        assert oe_test.e_fin == pytest.approx(0.64)
        assert td_test.eps_fin == pytest.approx(0.095)

    def test_empty_data_rejected(self):
        with pytest.raises(InputDataError):
            TestCase("OE", 1, SoilState(-0.01, -0.005, 0.7), np.empty((0, 2)))

    def test_unknown_kind_rejected(self):
        with pytest.raises(InputDataError):
            TestCase("XX", 1, SoilState(-0.01, -0.005, 0.7), np.array([[0.7, 0.1]]))

    @given(e0=st.floats(0.6, 1.0), drop=st.floats(0.01, 0.2))
    def test_oe_time_positive(self, e0, drop):
        assert integration_time_oe(e0, e0 - drop) > 0
