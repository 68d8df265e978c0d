"""Exact entropy solution of the Buckley-Leverett Riemann problem.

Initial data S(x, 0) = 0 on (0, 1] with S(0, t) = 1 at the inlet.  The
solution is self-similar in v = x/t: a rarefaction fan S solving
f'(S) = v for v in (0, sigma), attached to a shock from s_star down to 0
moving at speed sigma.  Used as ground truth for every error metric and as
the shock path for the domain decomposition.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .flux import FluxModel, ShockAnalysis, fractional_flow_derivative_raw, welge_analysis

_INVERT_TOL = 1e-12
_INVERT_MAX_ITER = 500


@dataclass(frozen=True)
class ExactSolution:
    model: FluxModel
    analysis: ShockAnalysis

    @classmethod
    def for_model(cls, model: FluxModel) -> "ExactSolution":
        return cls(model=model, analysis=welge_analysis(model))


def _invert_rarefaction(sol: ExactSolution, v):
    """Solve f'(s) = v on [s_star, 1], where f' is strictly decreasing.

    Vectorized bisection; v must lie in (0, sigma).
    """
    v = np.asarray(v, dtype=float)
    lo = np.full(v.shape, sol.analysis.s_star)
    hi = np.ones(v.shape)
    M = sol.model.M
    for _ in range(_INVERT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        too_low = fractional_flow_derivative_raw(M, mid) > v
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
        if np.max(hi - lo) < _INVERT_TOL:
            break
    return 0.5 * (lo + hi)


def evaluate(sol: ExactSolution, x: float, t: float) -> float:
    """Saturation at one space-time point.

    At t = 0 the initial condition applies (with the inlet value at x = 0);
    on the shock line v = sigma the pre-shock value s_star is returned.
    """
    return float(evaluate_profile(sol, t, np.asarray([x], dtype=float))[0])


def evaluate_profile(sol: ExactSolution, t: float, grid) -> np.ndarray:
    """Elementwise solution on an ascending grid at a fixed time."""
    grid = np.asarray(grid, dtype=float)
    if not (np.isfinite(t) and np.all(np.isfinite(grid))):
        raise ValueError("non-finite oracle input")
    if t < 0.0 or np.any(grid < 0.0):
        raise ValueError("oracle requires x >= 0 and t >= 0")
    if t == 0.0:
        return np.where(grid == 0.0, 1.0, 0.0)
    v = grid / t
    sigma = sol.analysis.sigma
    out = np.zeros(grid.shape)
    fan = (v > 0.0) & (v < sigma + _INVERT_TOL)
    if np.any(fan):
        out[fan] = _invert_rarefaction(sol, np.minimum(v[fan], sigma))
    out[v > sigma + _INVERT_TOL] = 0.0
    out[v <= 0.0] = 1.0
    return out


def mass_balance_residual(sol: ExactSolution, t: float, n_quad: int) -> float:
    """|integral of S(., t) over [0, 1] minus injected volume t|.

    The inlet flux is f(1) = 1 and the outlet flux is 0 while the shock is
    inside the domain, so the held volume equals t exactly.  Composite
    trapezoid with the shock abscissa inserted as a breakpoint; the state
    ahead of the shock is identically zero and contributes nothing.
    """
    if t == 0.0:
        return 0.0
    if n_quad < 1000:
        raise ValueError("n_quad must be >= 1000")
    x_shock = sol.analysis.sigma * t
    if x_shock > 1.0:
        raise ValueError("shock must be inside the unit domain (sigma * t <= 1)")
    xs = np.linspace(0.0, x_shock, n_quad)
    vals = evaluate_profile(sol, t, xs)
    integral = np.trapezoid(vals, xs)
    return abs(integral - t)


def export_profile_csv(sol: ExactSolution, t: float, grid, path) -> None:
    """Write columns x, t, s_exact for one time slice."""
    vals = evaluate_profile(sol, t, grid)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "t", "s_exact"])
        for x, s in zip(np.asarray(grid, dtype=float), vals):
            writer.writerow([repr(float(x)), repr(float(t)), repr(float(s))])
