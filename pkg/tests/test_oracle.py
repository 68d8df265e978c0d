import numpy as np
import pytest
from scipy.optimize import brentq

import xpinn_bl as xb
from xpinn_bl import oracle
from xpinn_bl.oracle import ExactSolution, evaluate, evaluate_profile, mass_balance_residual


@pytest.fixture(scope="module")
def sol_m30():
    return ExactSolution.for_model(xb.FluxModel(30.0))


class TestEvaluate:
    def test_ahead_of_shock(self, oracle_m2):
        assert evaluate(oracle_m2, 0.9, 0.5) == 0.0

    def test_inlet(self, oracle_m2):
        assert evaluate(oracle_m2, 0.0, 0.3) == 1.0

    def test_initial_condition(self, oracle_m2):
        np.testing.assert_array_equal(
            evaluate_profile(oracle_m2, 0.0, [0.1, 0.5, 0.9]), [0.0, 0.0, 0.0]
        )

    def test_origin_uses_boundary_value(self, oracle_m2):
        assert evaluate(oracle_m2, 0.0, 0.0) == 1.0

    def test_rarefaction_value_vs_independent_root(self, oracle_m2, model_m2, analysis_m2):
        # independent oracle: brentq on f'(s) = x/t over [s*, 1]
        x, t = 0.3, 0.5
        expected = brentq(
            lambda s: model_m2.fractional_flow_derivative(s) - x / t,
            analysis_m2.s_star,
            1.0,
            xtol=1e-14,
        )
        assert evaluate(oracle_m2, x, t) == pytest.approx(expected, abs=1e-9)
        assert evaluate(oracle_m2, x, t) == pytest.approx(0.888, abs=1e-3)

    def test_non_finite_rejected(self, oracle_m2):
        with pytest.raises(ValueError):
            evaluate(oracle_m2, float("nan"), 0.5)
        with pytest.raises(ValueError):
            evaluate(oracle_m2, 0.5, float("inf"))


class TestProfile:
    def test_jump_location_m2(self, oracle_m2, analysis_m2):
        prof = evaluate_profile(oracle_m2, 0.5, np.asarray([0.0, 0.5561, 0.5562]))
        assert prof[0] == 1.0
        assert prof[1] == pytest.approx(analysis_m2.s_star, abs=1e-2)  # just behind the front
        assert prof[2] == 0.0  # just ahead (shock at sigma/2 ~ 0.55619)

    def test_jump_location_m30(self, sol_m30):
        x_shock = sol_m30.analysis.sigma * 0.9
        assert x_shock == pytest.approx(0.907444, abs=1e-5)
        prof = evaluate_profile(sol_m30, 0.9, np.asarray([x_shock - 1e-4, x_shock + 1e-4]))
        assert prof[0] > 0.9
        assert prof[1] == 0.0

    @pytest.mark.parametrize("t", [0.1, 0.35, 0.6, 0.89])
    def test_monotone_nonincreasing(self, oracle_m2, t):
        prof = evaluate_profile(oracle_m2, t, np.linspace(0.0, 1.0, 500))
        assert np.all(np.diff(prof) <= 1e-12)

    def test_self_similarity(self, oracle_m2):
        rng = np.random.default_rng(3)
        for _ in range(50):
            x, t = rng.uniform(0.01, 0.45, 2)
            for k in (0.5, 2.0):
                a = evaluate(oracle_m2, x, t)
                b = evaluate(oracle_m2, k * x, k * t)
                assert abs(a - b) < 1e-10


class TestConservation:
    @pytest.mark.parametrize("m_val", [2.0, 30.0])
    @pytest.mark.parametrize("t", [0.2, 0.5, 0.8])
    def test_mass_balance(self, m_val, t):
        sol = ExactSolution.for_model(xb.FluxModel(m_val))
        assert mass_balance_residual(sol, t, 10_000) < 1e-3

    def test_zero_time(self, oracle_m2):
        assert mass_balance_residual(oracle_m2, 0.0, 10) == 0.0

    def test_validation(self, oracle_m2):
        with pytest.raises(ValueError):
            mass_balance_residual(oracle_m2, 0.5, 100)
        with pytest.raises(ValueError):
            mass_balance_residual(oracle_m2, 0.95, 10_000)  # shock outside domain


class TestPdeConsistency:
    def test_rankine_hugoniot_at_front(self, oracle_m2, model_m2, analysis_m2):
        jump_speed = (model_m2.fractional_flow(analysis_m2.s_star) - 0.0) / (
            analysis_m2.s_star - 0.0
        )
        assert abs(jump_speed - analysis_m2.sigma) < 1e-10

    def test_residual_away_from_shock(self, oracle_m2, model_m2, analysis_m2):
        rng = np.random.default_rng(11)
        h = 1e-5
        count = 0
        while count < 100:
            x, t = rng.uniform(0.05, 0.95, 2)
            if t < 0.1 or abs(x - analysis_m2.sigma * t) <= 0.05 or x < 2 * h:
                continue
            count += 1
            st = (evaluate(oracle_m2, x, t + h) - evaluate(oracle_m2, x, t - h)) / (2 * h)
            fx = (
                model_m2.fractional_flow(evaluate(oracle_m2, x + h, t))
                - model_m2.fractional_flow(evaluate(oracle_m2, x - h, t))
            ) / (2 * h)
            assert abs(st + fx) < 1e-3


def test_profile_csv_export(tmp_path, oracle_m2):
    path = tmp_path / "profile.csv"
    oracle.export_profile_csv(oracle_m2, 0.5, np.linspace(0.0, 1.0, 11), path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x,t,s_exact"
    assert len(lines) == 12
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[2]) == 1.0
