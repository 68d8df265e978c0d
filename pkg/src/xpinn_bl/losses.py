"""Loss terms: data, PDE residual, Rankine-Hugoniot interface coupling.

All weights are 1, so each total is the plain sum of its enabled terms.
Term formulas are written generically: fed with numpy arrays they return
floats (evaluation, tests), fed with tape Vars they stay differentiable
(training).  Network outputs are clamped to [-0.2, 1.2] with a
straight-through gradient wherever they feed a flux, which keeps early
epochs finite without mutating the raw predictions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import autodiff as ad
from .flux import (
    FluxModel,
    ModifiedFluxKind,
    ShockAnalysis,
    fractional_flow_raw,
    modified_flux_derivative_raw,
)
from .network import SubnetParams, forward_pass
from .sampling import CollocationPlan

log = logging.getLogger(__name__)

FLUX_CLAMP_LO = -0.2
FLUX_CLAMP_HI = 1.2

DEFAULT_DIFFUSIVITY_EPS = 2.5e-3
DEFAULT_RH_STABILIZER_EPS = 1e-8


class Mode(Enum):
    XPINN = "xpinn"
    XPINN_NO_INTERFACE = "xpinn_no_interface"
    STANDARD_PINN = "standard_pinn"
    DIFFUSIVITY_PINN = "diffusivity_pinn"
    WELGE_PINN = "welge_pinn"
    OLEINIK_PINN = "oleinik_pinn"


@dataclass(frozen=True)
class VariantConfig:
    mode: Mode
    diffusivity_eps: float = DEFAULT_DIFFUSIVITY_EPS
    rh_stabilizer_eps: float = DEFAULT_RH_STABILIZER_EPS
    enable_interface_average: bool = False
    welge_form: ModifiedFluxKind = ModifiedFluxKind.WELGE_AS_WRITTEN

    @property
    def n_subnets(self) -> int:
        return 2 if self.mode in (Mode.XPINN, Mode.XPINN_NO_INTERFACE) else 1

    @property
    def flux_kind(self) -> ModifiedFluxKind:
        if self.mode is Mode.WELGE_PINN:
            return self.welge_form
        if self.mode is Mode.OLEINIK_PINN:
            return ModifiedFluxKind.OLEINIK
        return ModifiedFluxKind.ORIGINAL

    @property
    def residual_eps(self) -> float:
        return self.diffusivity_eps if self.mode is Mode.DIFFUSIVITY_PINN else 0.0

    @property
    def residual_order(self) -> int:
        return 2 if self.mode is Mode.DIFFUSIVITY_PINN else 1


@dataclass(frozen=True)
class LossBreakdown:
    data_loss: float
    residual_loss: float
    interface_residual_loss: float = 0.0
    interface_average_loss: float = 0.0

    @property
    def total(self) -> float:
        return (
            self.data_loss
            + self.residual_loss
            + self.interface_residual_loss
            + self.interface_average_loss
        )


# -- generic term formulas (Var or ndarray) ---------------------------------


def ic_term(u_ic):
    """Mean squared deviation from S = 0 at t = 0."""
    return ad.mean(u_ic * u_ic)


def bc_term(u_bc):
    """Mean squared deviation from S = 1 at the inlet."""
    d = u_bc - 1.0
    return ad.mean(d * d)


def residual_term(model, kind, analysis, u, ux, ut, eps_diff=0.0, uxx=None):
    """Mean squared PDE residual u_t + f'(u) u_x - eps * u_xx.

    The flux chain rule is applied analytically with the derivative of the
    configured (possibly entropy-modified) flux.
    """
    uc = ad.clip_passthrough(u, FLUX_CLAMP_LO, FLUX_CLAMP_HI)
    fp = modified_flux_derivative_raw(model.M, kind, analysis, uc)
    r = ut + fp * ux
    if eps_diff != 0.0:
        r = r - eps_diff * uxx
    return ad.mean(r * r)


def rh_term(model, sigma, u_pre, u_post, eps=DEFAULT_RH_STABILIZER_EPS):
    """Mean squared deviation of the interface jump ratio from the shock
    speed: |(f(u_post) - f(u_pre)) / (u_post - u_pre + eps) - sigma|^2."""
    up = ad.clip_passthrough(u_pre, FLUX_CLAMP_LO, FLUX_CLAMP_HI)
    upo = ad.clip_passthrough(u_post, FLUX_CLAMP_LO, FLUX_CLAMP_HI)
    ratio = (fractional_flow_raw(model.M, upo) - fractional_flow_raw(model.M, up)) / (
        upo - up + eps
    )
    d = ratio - sigma
    return ad.mean(d * d)


def avg_term(u_pre, u_post):
    """Both sides' mean squared deviation from the interface average."""
    half = 0.5 * (u_pre - u_post)
    return 2.0 * ad.mean(half * half)


# -- spec-level operations on whole nets (numpy, return floats) -------------


def _params(net: SubnetParams):
    return net.weights, net.biases, net.slopes


def data_loss(net: SubnetParams, ic_points, bc_points) -> float:
    total = 0.0
    if len(ic_points) == 0:
        log.warning("empty IC point set contributes 0 to the data loss")
    else:
        u, _, _, _ = forward_pass(*_params(net), ic_points[:, 0], ic_points[:, 1])
        total += ic_term(u)
    if len(bc_points) == 0:
        log.warning("empty BC point set contributes 0 to the data loss")
    else:
        u, _, _, _ = forward_pass(*_params(net), bc_points[:, 0], bc_points[:, 1])
        total += bc_term(u)
    return total


def pde_residual_loss(
    net: SubnetParams,
    interior_points,
    model: FluxModel,
    analysis: ShockAnalysis,
    kind: ModifiedFluxKind = ModifiedFluxKind.ORIGINAL,
    diffusivity_eps: float = 0.0,
) -> float:
    order = 2 if diffusivity_eps != 0.0 else 1
    u, ux, ut, uxx = forward_pass(
        *_params(net), interior_points[:, 0], interior_points[:, 1], order=order
    )
    return residual_term(model, kind, analysis, u, ux, ut, diffusivity_eps, uxx)


def rankine_hugoniot_loss(
    net_pre: SubnetParams,
    net_post: SubnetParams,
    interface_points,
    model: FluxModel,
    sigma: float,
    rh_stabilizer_eps: float = DEFAULT_RH_STABILIZER_EPS,
) -> float:
    x, t = interface_points[:, 0], interface_points[:, 1]
    u_pre, _, _, _ = forward_pass(*_params(net_pre), x, t)
    u_post, _, _, _ = forward_pass(*_params(net_post), x, t)
    return rh_term(model, sigma, u_pre, u_post, rh_stabilizer_eps)


def interface_average_loss(net_pre, net_post, interface_points) -> float:
    x, t = interface_points[:, 0], interface_points[:, 1]
    u_pre, _, _, _ = forward_pass(*_params(net_pre), x, t)
    u_post, _, _, _ = forward_pass(*_params(net_post), x, t)
    return avg_term(u_pre, u_post)


# -- per-subnet loss builder (shared by assemble and the trainer) ------------

PRE, POST = 0, 1


def xpinn_subnet_loss(
    side: int,
    params_self,
    net_other: SubnetParams,
    plan: CollocationPlan,
    model: FluxModel,
    analysis: ShockAnalysis,
    variant: VariantConfig,
):
    """Total loss of one XPINN subnet, neighbor held constant.

    ``params_self`` is a (weights, biases, slopes) triple, either raw
    arrays or tape Vars; the neighbor is always evaluated in plain numpy so
    its parameters act as constants.  The pre-shock subnet carries all
    IC/BC data; the post-shock subnet is anchored only through the
    interface term.  (Anchoring the post net with the initial condition
    would hand it a direct gradient toward zero and erase the reported
    interface-residual effect: its converged loss would sit orders of
    magnitude above the residual-only level, and the no-interface ablation
    would show no post-shock plateau.)
    """
    if side == PRE:
        interior = plan.pre_shock
        u_ic, _, _, _ = forward_pass(*params_self, plan.ic_points[:, 0], plan.ic_points[:, 1])
        u_bc, _, _, _ = forward_pass(*params_self, plan.bc_points[:, 0], plan.bc_points[:, 1])
        data = ic_term(u_ic) + bc_term(u_bc)
    else:
        interior = plan.post_shock
        data = 0.0

    u, ux, ut, _ = forward_pass(*params_self, interior[:, 0], interior[:, 1], order=1)
    res = residual_term(model, ModifiedFluxKind.ORIGINAL, analysis, u, ux, ut)

    total = data + res
    iface = 0.0
    avg = 0.0
    if variant.mode is Mode.XPINN or variant.enable_interface_average:
        xi, ti = plan.interface[:, 0], plan.interface[:, 1]
        u_self, _, _, _ = forward_pass(*params_self, xi, ti)
        u_other = forward_pass(*_params(net_other), xi, ti)[0]
        if variant.mode is Mode.XPINN:
            u_pre, u_post = (u_self, u_other) if side == PRE else (u_other, u_self)
            iface = rh_term(model, analysis.sigma, u_pre, u_post, variant.rh_stabilizer_eps)
            total = total + iface
        if variant.enable_interface_average:
            avg = avg_term(u_self, u_other)
            total = total + avg

    # Both subnets optimize the shared interface terms, but the recorded
    # breakdown attributes them to the pre-shock side only, so that the sum
    # of per-subnet totals counts each term exactly once.
    record = side == PRE
    breakdown = LossBreakdown(
        data_loss=float(ad.values(data)),
        residual_loss=float(ad.values(res)),
        interface_residual_loss=float(ad.values(iface)) if record else 0.0,
        interface_average_loss=float(ad.values(avg)) if record else 0.0,
    )
    return total, breakdown


def single_net_loss(
    params,
    plan: CollocationPlan,
    model: FluxModel,
    analysis: ShockAnalysis,
    variant: VariantConfig,
):
    """Total loss of a single-domain PINN variant (data + residual)."""
    u_ic, _, _, _ = forward_pass(*params, plan.ic_points[:, 0], plan.ic_points[:, 1])
    u_bc, _, _, _ = forward_pass(*params, plan.bc_points[:, 0], plan.bc_points[:, 1])
    data = ic_term(u_ic) + bc_term(u_bc)

    interior = plan.single_domain_interior()
    u, ux, ut, uxx = forward_pass(
        *params, interior[:, 0], interior[:, 1], order=variant.residual_order
    )
    res = residual_term(
        model, variant.flux_kind, analysis, u, ux, ut, variant.residual_eps, uxx
    )
    total = data + res
    breakdown = LossBreakdown(
        data_loss=float(ad.values(data)),
        residual_loss=float(ad.values(res)),
    )
    return total, breakdown


def assemble(
    variant: VariantConfig,
    nets: list[SubnetParams],
    plan: CollocationPlan,
    model: FluxModel,
    analysis: ShockAnalysis,
) -> list[LossBreakdown]:
    """Per-subnet loss breakdowns at the current parameters (no gradients)."""
    if len(nets) != variant.n_subnets:
        raise ValueError(
            f"mode {variant.mode.value} expects {variant.n_subnets} nets, got {len(nets)}"
        )
    if variant.n_subnets == 2:
        out = []
        for side, other in ((PRE, nets[POST]), (POST, nets[PRE])):
            _, bd = xpinn_subnet_loss(
                side, _params(nets[side]), other, plan, model, analysis, variant
            )
            out.append(bd)
        return out
    _, bd = single_net_loss(_params(nets[0]), plan, model, analysis, variant)
    return [bd]
