"""Fractional-flow model for 1D immiscible two-phase displacement.

The water fractional flow is f(s) = s^2 / (s^2 + M (1 - s)^2), with a single
mobility ratio M > 0.  The flux is S-shaped (nonconvex), so the entropy
solution of the Riemann problem is a rarefaction attached to a shock.  The
frontal saturation s* is located by the Welge tangent construction: the
chord from the origin is tangent to f at s*, and the shock speed is
sigma = f(s*)/s*.

The raw ``*_raw`` helpers are plain arithmetic and accept floats, numpy
arrays, or autodiff Vars; the public operations validate their inputs and
are meant for physical saturations in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import autodiff as ad

#: Saturations this far outside [0, 1] are still accepted and clamped.
DOMAIN_TOL = 1e-12

#: Bisection settings for the tangency solve.
_BISECT_MAX_ITER = 200
_TANGENCY_TOL = 1e-12


class ModifiedFluxKind(Enum):
    ORIGINAL = "original"
    WELGE_AS_WRITTEN = "welge_as_written"
    WELGE_HULL = "welge_hull"
    OLEINIK = "oleinik"


def fractional_flow_raw(M, s):
    """f(s) without domain checks; generic over floats/arrays/Vars."""
    one_minus = 1.0 - s
    return s * s / (s * s + M * (one_minus * one_minus))


def fractional_flow_derivative_raw(M, s):
    """df/ds without domain checks; generic over floats/arrays/Vars."""
    one_minus = 1.0 - s
    d = s * s + M * (one_minus * one_minus)
    return 2.0 * M * s * one_minus / (d * d)


@dataclass(frozen=True)
class FluxModel:
    """Mobility-ratio parameterization of the water fractional flow."""

    M: float

    def __post_init__(self):
        if not np.isfinite(self.M) or self.M <= 0.0:
            raise ValueError(f"mobility ratio must be finite and > 0, got {self.M}")

    def fractional_flow(self, s):
        """f(s) = s^2 / (s^2 + M (1-s)^2) for s in [0, 1]."""
        s = _validate_saturation(s)
        return fractional_flow_raw(self.M, s)

    def fractional_flow_derivative(self, s):
        """df/ds = 2 M s (1-s) / (s^2 + M (1-s)^2)^2 for s in [0, 1]."""
        s = _validate_saturation(s)
        return fractional_flow_derivative_raw(self.M, s)


@dataclass(frozen=True)
class ShockAnalysis:
    """Frontal saturation and shock speed from the Welge tangency."""

    s_star: float
    sigma: float


def _validate_saturation(s):
    s = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s)):
        raise ValueError("saturation must be finite")
    if np.any(s < -DOMAIN_TOL) or np.any(s > 1.0 + DOMAIN_TOL):
        raise ValueError("saturation outside [0, 1]")
    out = np.clip(s, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def welge_analysis(model: FluxModel) -> ShockAnalysis:
    """Locate the tangency f(s)/s = f'(s) by bisection.

    Works on g(s) = f(s) - s f'(s), which changes sign exactly at the
    tangent point.  The bracket starts at [0.5, 1 - 1e-9] (sufficient for
    M >= 0.5) and is widened toward 0 if the tangency sits below 0.5.
    """
    M = model.M

    def g(s):
        return fractional_flow_raw(M, s) - s * fractional_flow_derivative_raw(M, s)

    lo, hi = 0.5, 1.0 - 1e-9
    if g(lo) >= 0.0:
        lo = 1e-9
    if not (g(lo) < 0.0 < g(hi)):
        raise RuntimeError(f"tangency bracket failed for M={M}")
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) < _TANGENCY_TOL and (hi - lo) < 1e-14:
            break
        if gm < 0.0:
            lo = mid
        else:
            hi = mid
    s_star = 0.5 * (lo + hi)
    sigma = fractional_flow_raw(M, s_star) / s_star
    return ShockAnalysis(s_star=s_star, sigma=sigma)


def s_star_closed_form(M: float) -> float:
    """sqrt(M / (M + 1)); cross-check only, never the source of truth."""
    return math.sqrt(M / (M + 1.0))


def modified_flux(model: FluxModel, kind: ModifiedFluxKind, analysis: ShockAnalysis, s):
    """Entropy-modified flux variants used by the single-net PINN modes."""
    s = _validate_saturation(s)
    return modified_flux_raw(model.M, kind, analysis, s)


def modified_flux_raw(M, kind: ModifiedFluxKind, analysis: ShockAnalysis, s):
    """Piecewise flux without domain checks; generic over Vars."""
    if kind is ModifiedFluxKind.ORIGINAL:
        return fractional_flow_raw(M, s)
    sv = ad.values(s)
    if kind is ModifiedFluxKind.WELGE_AS_WRITTEN:
        # Linear ramp s / f(s*) up to s*, then the original flux.  This form
        # is discontinuous at s* (its slope is not the hull chord slope).
        f_star = fractional_flow_raw(M, analysis.s_star)
        return ad.where(sv <= analysis.s_star, s / f_star, fractional_flow_raw(M, s))
    if kind is ModifiedFluxKind.WELGE_HULL:
        return ad.where(sv <= analysis.s_star, analysis.sigma * s, fractional_flow_raw(M, s))
    if kind is ModifiedFluxKind.OLEINIK:
        return ad.where(sv < analysis.s_star, analysis.sigma * s, fractional_flow_raw(M, s))
    raise ValueError(f"unknown flux kind {kind}")


def modified_flux_derivative_raw(M, kind: ModifiedFluxKind, analysis: ShockAnalysis, s):
    """d(modified flux)/ds, branch selection on raw values."""
    if kind is ModifiedFluxKind.ORIGINAL:
        return fractional_flow_derivative_raw(M, s)
    sv = ad.values(s)
    if kind is ModifiedFluxKind.WELGE_AS_WRITTEN:
        f_star = fractional_flow_raw(M, analysis.s_star)
        ramp = (1.0 / f_star) + 0.0 * s
        return ad.where(sv <= analysis.s_star, ramp, fractional_flow_derivative_raw(M, s))
    if kind in (ModifiedFluxKind.WELGE_HULL, ModifiedFluxKind.OLEINIK):
        chord = analysis.sigma + 0.0 * s
        return ad.where(sv < analysis.s_star, chord, fractional_flow_derivative_raw(M, s))
    raise ValueError(f"unknown flux kind {kind}")
