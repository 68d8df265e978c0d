import csv

import numpy as np
import pytest

import xpinn_bl as xb
from xpinn_bl.sampling import DEFAULT_BAND_HALFWIDTH, SampleCounts, build_plan, stitch_prediction

from conftest import constant_net


def test_default_counts_match_reported_budget():
    c = SampleCounts()
    assert (c.n_ic, c.n_bc, c.n_pre, c.n_post, c.n_interface) == (200, 200, 2000, 2000, 200)
    assert c.n_ic + c.n_bc + c.n_pre + c.n_post + c.n_interface == 4600


def test_plan_counts(small_plan):
    assert small_plan.ic_points.shape == (20, 2)
    assert small_plan.bc_points.shape == (20, 2)
    assert small_plan.pre_shock.shape == (60, 2)
    assert small_plan.post_shock.shape == (60, 2)
    assert small_plan.interface.shape == (20, 2)


def test_ic_bc_placement(small_plan):
    assert np.all(small_plan.ic_points[:, 1] == 0.0)
    assert np.all(small_plan.ic_points[:, 0] > 0.0)
    assert np.all(small_plan.ic_points[:, 0] <= 1.0)
    assert np.all(small_plan.bc_points[:, 0] == 0.0)
    assert np.all((small_plan.bc_points[:, 1] >= 0.0) & (small_plan.bc_points[:, 1] <= 1.0))


def test_regions_respect_exclusion_band(small_plan, analysis_m2):
    s = analysis_m2.sigma
    pre_gap = s * small_plan.pre_shock[:, 1] - small_plan.pre_shock[:, 0]
    post_gap = small_plan.post_shock[:, 0] - s * small_plan.post_shock[:, 1]
    assert np.all(pre_gap > DEFAULT_BAND_HALFWIDTH)
    assert np.all(post_gap > DEFAULT_BAND_HALFWIDTH)


def test_interface_points_on_shock_line(small_plan, analysis_m2):
    x, t = small_plan.interface[:, 0], small_plan.interface[:, 1]
    np.testing.assert_allclose(x, analysis_m2.sigma * t)
    tmax = min(1.0, 1.0 / analysis_m2.sigma)
    assert t[0] > 0.0  # the t = 0 corner carries no jump and is excluded
    assert t[-1] == pytest.approx(tmax)
    np.testing.assert_allclose(np.diff(t), np.diff(t)[0])  # evenly spaced


def test_interface_stays_inside_unit_square():
    # sigma > 1 here, so the interface leaves the square before t = 1
    model = xb.FluxModel(2.0)
    analysis = xb.welge_analysis(model)
    assert analysis.sigma > 1.0
    plan = build_plan(analysis, SampleCounts(10, 10, 30, 30, 10))
    assert np.all(plan.interface[:, 0] <= 1.0 + 1e-12)


def test_determinism_and_seed_sensitivity(analysis_m2):
    counts = SampleCounts(10, 10, 30, 30, 10)
    a = build_plan(analysis_m2, counts, rng_seed=4)
    b = build_plan(analysis_m2, counts, rng_seed=4)
    c = build_plan(analysis_m2, counts, rng_seed=5)
    assert np.array_equal(a.pre_shock, b.pre_shock)
    assert not np.array_equal(a.pre_shock, c.pre_shock)


def test_single_domain_interior_folds_interface(small_plan):
    interior = small_plan.single_domain_interior()
    assert interior.shape == (60 + 60 + 20, 2)


def test_export_csv(small_plan, tmp_path):
    path = tmp_path / "plan.csv"
    small_plan.export_csv(path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "t", "region"]
    assert len(rows) == 1 + 20 + 20 + 60 + 60 + 20
    regions = {r[2] for r in rows[1:]}
    assert regions == {"ic", "bc", "pre", "post", "interface"}


def test_stitch_piecewise_selection(analysis_m2):
    nets = [constant_net(1.0), constant_net(0.0)]
    t = np.full(3, 0.5)
    mid = analysis_m2.sigma * 0.5
    x = np.array([mid - 0.1, mid, mid + 0.1])
    out = stitch_prediction(nets, analysis_m2, x, t)
    np.testing.assert_allclose(out, [1.0, 0.5, 0.0])


def test_stitch_single_net(analysis_m2):
    out = stitch_prediction([constant_net(0.3)], analysis_m2, np.array([0.1]), np.array([0.9]))
    assert out[0] == pytest.approx(0.3)


def test_stitch_accepts_callable(analysis_m2):
    out = stitch_prediction(lambda x, t: x + t, analysis_m2, np.array([0.25]), np.array([0.5]))
    assert out[0] == pytest.approx(0.75)
