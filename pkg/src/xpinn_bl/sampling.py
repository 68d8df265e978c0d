"""Space-time collocation sampling around the moving shock line.

The unit square is split along x = sigma * t into a pre-shock region
(behind the front, containing the inlet and the rarefaction) and a
post-shock region (ahead of the front, identically zero in the exact
solution).  Interior points are rejection-sampled into the two regions with
an exclusion band of half-width eps around the shock line; interface points
sit exactly on it, one per time instance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .flux import ShockAnalysis
from .network import SubnetParams, evaluate

DEFAULT_BAND_HALFWIDTH = 0.007
_MAX_REJECTION_DRAWS = 10**6


@dataclass(frozen=True)
class SampleCounts:
    n_ic: int = 200
    n_bc: int = 200
    n_pre: int = 2000
    n_post: int = 2000
    n_interface: int = 200


@dataclass(frozen=True)
class CollocationPlan:
    """All sampled point sets, each an (n, 2) array of (x, t) pairs."""

    ic_points: np.ndarray
    bc_points: np.ndarray
    pre_shock: np.ndarray
    post_shock: np.ndarray
    interface: np.ndarray
    band_halfwidth: float
    rng_seed: int

    def single_domain_interior(self) -> np.ndarray:
        """Union of all interior points for single-net modes.

        The interface budget is folded into the interior set so the total
        collocation budget matches the two-subnet configuration.
        """
        return np.concatenate([self.pre_shock, self.post_shock, self.interface])

    def export_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "t", "region"])
            for region, pts in [
                ("ic", self.ic_points),
                ("bc", self.bc_points),
                ("pre", self.pre_shock),
                ("post", self.post_shock),
                ("interface", self.interface),
            ]:
                for x, t in pts:
                    writer.writerow([repr(float(x)), repr(float(t)), region])


def build_plan(
    analysis: ShockAnalysis,
    counts: SampleCounts = SampleCounts(),
    band_halfwidth: float = DEFAULT_BAND_HALFWIDTH,
    rng_seed: int = 0,
) -> CollocationPlan:
    """Sample every point set; deterministic for a fixed seed.

    IC points are uniform on x in (0, 1] at t = 0, BC points uniform on
    t in [0, 1] at x = 0.  Interior points are drawn uniformly on the unit
    square and assigned to whichever region they fall in (discarded inside
    the band or once a region is full).  Interface times are evenly spaced
    on [0, min(1, 1/sigma)] so the shock line never leaves the square.
    """
    rng = np.random.default_rng(rng_seed)
    sigma = analysis.sigma

    ic_x = 1.0 - rng.random(counts.n_ic)  # uniform on (0, 1]
    ic = np.column_stack([ic_x, np.zeros(counts.n_ic)])
    bc_t = rng.random(counts.n_bc)
    bc = np.column_stack([np.zeros(counts.n_bc), bc_t])

    pre: list[np.ndarray] = []
    post: list[np.ndarray] = []
    draws = 0
    while len(pre) < counts.n_pre or len(post) < counts.n_post:
        if draws >= _MAX_REJECTION_DRAWS:
            raise RuntimeError(
                f"rejection sampling exhausted {_MAX_REJECTION_DRAWS} draws "
                f"(band_halfwidth={band_halfwidth})"
            )
        chunk = rng.random((4096, 2))
        draws += len(chunk)
        shock_x = sigma * chunk[:, 1]
        for pt, sx in zip(chunk, shock_x):
            if pt[0] < sx - band_halfwidth:
                if len(pre) < counts.n_pre:
                    pre.append(pt)
            elif pt[0] > sx + band_halfwidth:
                if len(post) < counts.n_post:
                    post.append(pt)

    # evenly spaced interface times on (0, t_max]: at t = 0 the shock line
    # degenerates to the IC/BC corner where no jump exists yet, and a point
    # there only feeds the corner conflict into the interface loss
    t_max = min(1.0, 1.0 / sigma)
    t_if = np.linspace(0.0, t_max, counts.n_interface + 1)[1:]
    interface = np.column_stack([sigma * t_if, t_if])

    return CollocationPlan(
        ic_points=ic,
        bc_points=bc,
        pre_shock=np.asarray(pre),
        post_shock=np.asarray(post),
        interface=interface,
        band_halfwidth=band_halfwidth,
        rng_seed=rng_seed,
    )


def stitch_prediction(nets: list[SubnetParams], analysis: ShockAnalysis, x, t) -> np.ndarray:
    """Indicator-function stitching of subnet predictions.

    Pre-shock net where x < sigma*t, post-shock net where x > sigma*t, and
    the average of both exactly on the shock line (two subdomains share the
    interface, so each carries weight 1/2).  With a single net this is just
    the net's own evaluation.  A bare callable ``(x, t) -> u`` is accepted
    in place of the net list, which lets the graders score any predictor.
    """
    if callable(nets):
        return np.asarray(nets(np.atleast_1d(np.asarray(x, dtype=float)),
                               np.atleast_1d(np.asarray(t, dtype=float))), dtype=float)
    if len(nets) == 1:
        return evaluate(nets[0], x, t)
    if len(nets) != 2:
        raise ValueError("stitching expects one or two subnets")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u_pre = evaluate(nets[0], x, t)
    u_post = evaluate(nets[1], x, t)
    shock_x = analysis.sigma * t
    out = np.where(x < shock_x, u_pre, u_post)
    on_line = x == shock_x
    if np.any(on_line):
        out = np.where(on_line, 0.5 * (u_pre + u_post), out)
    return out
