import csv
import json

import numpy as np
import pytest

from xpinn_bl.metrics import (
    export_profile_slices,
    grade,
    post_shock_plateau,
    shock_location_estimate,
)
from xpinn_bl.oracle import evaluate_profile

from conftest import constant_net


@pytest.fixture(scope="module")
def oracle_fn(oracle_m2):
    # the graders evaluate one constant-t row at a time
    def f(x, t):
        return evaluate_profile(oracle_m2, float(np.atleast_1d(t)[0]), np.atleast_1d(x))
    return f


def test_oracle_graded_against_itself_is_exact(analysis_m2, oracle_m2, oracle_fn):
    rep = grade(oracle_fn, analysis_m2, oracle_m2, grid_nx=101, grid_nt=101)
    assert rep.l1_abs == pytest.approx(0.0, abs=1e-12)
    assert rep.l2_abs == pytest.approx(0.0, abs=1e-12)


def test_zero_predictor_has_unit_relative_error(analysis_m2, oracle_m2):
    rep = grade([constant_net(0.0), constant_net(0.0)], analysis_m2, oracle_m2,
                grid_nx=101, grid_nt=101)
    assert rep.l1_rel == pytest.approx(1.0)
    assert rep.l2_rel == pytest.approx(1.0)
    assert rep.l1_abs > 0.1


def test_grid_validation(analysis_m2, oracle_m2):
    with pytest.raises(ValueError):
        grade([constant_net(0.0)], analysis_m2, oracle_m2, grid_nx=50)


def test_report_json_round_trip(analysis_m2, oracle_m2, tmp_path):
    rep = grade([constant_net(0.5)], analysis_m2, oracle_m2,
                grid_nx=101, grid_nt=101, train_seconds=1.5)
    path = tmp_path / "report.json"
    rep.to_json(path)
    back = json.loads(path.read_text())
    assert back["l2_abs"] == rep.l2_abs
    assert back["train_seconds"] == 1.5
    assert back["eval_grid"] == "101x101"


def test_plateau_of_constant_net(analysis_m2):
    got = post_shock_plateau([constant_net(0.6), constant_net(0.3)], analysis_m2, 0.5)
    assert got == pytest.approx(0.3)  # probe region lies beyond the shock


def test_plateau_of_exact_solution_is_zero(analysis_m2, oracle_m2):
    got = post_shock_plateau(
        lambda x, t: evaluate_profile(oracle_m2, float(t[0]), x), analysis_m2, 0.5
    )
    assert got == pytest.approx(0.0, abs=1e-12)


def test_plateau_rejects_empty_probe_interval(analysis_m2):
    with pytest.raises(ValueError):
        post_shock_plateau([constant_net(0.0)], analysis_m2, 0.9)


def test_shock_location_of_exact_solution(analysis_m2, oracle_m2):
    got = shock_location_estimate(
        lambda x, t: evaluate_profile(oracle_m2, float(t[0]), x), analysis_m2, 0.5
    )
    assert got == pytest.approx(analysis_m2.sigma * 0.5, abs=2e-3)


def test_export_profile_slices(analysis_m2, oracle_m2, tmp_path):
    nets = [constant_net(1.0), constant_net(0.0)]
    paths = export_profile_slices(nets, analysis_m2, oracle_m2,
                                  tmp_path / "profile_t{t}.csv")
    assert len(paths) == 3
    with open(paths[1]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "t", "s_pred", "s_exact"]
    assert float(rows[1][1]) == 0.5
