"""Error grading against the exact solution and shock-front diagnostics."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass

import numpy as np

from .flux import ShockAnalysis
from .oracle import ExactSolution, evaluate_profile
from .sampling import stitch_prediction

DEFAULT_GRID = 201
_T_CUTOFF = 0.01  # skip the ambiguous IC/BC corner at (0, 0)


@dataclass(frozen=True)
class ErrorReport:
    l1_abs: float
    l2_abs: float
    l1_rel: float
    l2_rel: float
    train_seconds: float
    eval_grid: str

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2)
            fh.write("\n")


def grade(
    nets,
    analysis: ShockAnalysis,
    oracle: ExactSolution,
    grid_nx: int = DEFAULT_GRID,
    grid_nt: int = DEFAULT_GRID,
    train_seconds: float = 0.0,
) -> ErrorReport:
    """L1/L2 errors of the stitched prediction on a uniform space-time grid.

    L1 is the grid mean of |pred - exact| and L2 the root of the grid mean
    squared error; the relative versions are normalized by the same norms
    of the exact field.  Rows with t below 0.01 are excluded.
    """
    if grid_nx < 101 or grid_nt < 101:
        raise ValueError("grading grid must be at least 101 x 101")
    xs = np.linspace(0.0, 1.0, grid_nx)
    ts = np.linspace(0.0, 1.0, grid_nt)
    ts = ts[ts >= _T_CUTOFF]

    err_abs = []
    exact_all = []
    for t in ts:
        exact = evaluate_profile(oracle, t, xs)
        pred = stitch_prediction(nets, analysis, xs, np.full(xs.shape, t))
        err_abs.append(np.abs(pred - exact))
        exact_all.append(exact)
    err = np.concatenate(err_abs)
    exact = np.concatenate(exact_all)

    l1 = float(np.mean(err))
    l2 = float(np.sqrt(np.mean(err * err)))
    l1_exact = float(np.mean(np.abs(exact)))
    l2_exact = float(np.sqrt(np.mean(exact * exact)))
    return ErrorReport(
        l1_abs=l1,
        l2_abs=l2,
        l1_rel=l1 / l1_exact,
        l2_rel=l2 / l2_exact,
        train_seconds=train_seconds,
        eval_grid=f"{grid_nx}x{grid_nt}",
    )


def post_shock_plateau(nets, analysis: ShockAnalysis, t_probe: float, n_probe: int = 200) -> float:
    """Mean prediction ahead of the shock at one time (exact value: 0)."""
    lo = analysis.sigma * t_probe + 0.05
    if lo >= 1.0:
        raise ValueError("probe interval ahead of the shock is empty")
    xs = np.linspace(lo, 1.0, n_probe)
    pred = stitch_prediction(nets, analysis, xs, np.full(xs.shape, t_probe))
    return float(np.mean(pred))


def shock_location_estimate(nets, analysis: ShockAnalysis, t: float, nx: int = 1001) -> float:
    """x of steepest descent of the predicted profile at a fixed time."""
    xs = np.linspace(0.0, 1.0, nx)
    pred = stitch_prediction(nets, analysis, xs, np.full(xs.shape, t))
    slopes = np.diff(pred) / np.diff(xs)
    i = int(np.argmin(slopes))
    return float(0.5 * (xs[i] + xs[i + 1]))


def export_profile_slices(nets, analysis, oracle, path_pattern, times=(0.25, 0.5, 0.75), nx=401):
    """CSV slices (x, s_pred, s_exact) at fixed times for plotting.

    ``path_pattern`` must contain one ``{t}`` placeholder.
    """
    xs = np.linspace(0.0, 1.0, nx)
    written = []
    for t in times:
        pred = stitch_prediction(nets, analysis, xs, np.full(xs.shape, t))
        exact = evaluate_profile(oracle, t, xs)
        path = str(path_pattern).format(t=t)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "t", "s_pred", "s_exact"])
            for x, p, e in zip(xs, pred, exact):
                writer.writerow([repr(float(x)), repr(float(t)), repr(float(p)), repr(float(e))])
        written.append(path)
    return written
