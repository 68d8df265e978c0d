"""Full-batch Adam training of one or two subnets.

Each epoch evaluates every loss term on the full point sets, computes each
subnet's gradient of its own total loss (the neighbor's parameters are a
constant within the step, and both subnets read the same pre-update
snapshot), then applies one Adam update per subnet with independent moment
states.  Single-threaded and purely numpy, so a fixed seed reproduces the
parameter trajectory bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import losses, network
from .autodiff import Tape, loss_gradient
from .flux import FluxModel, ShockAnalysis
from .losses import LossBreakdown, VariantConfig
from .network import SubnetParams
from .sampling import CollocationPlan

CHECKPOINT_EVERY = 500

#: Offset between the run seed and per-subnet init seeds.
_SUBNET_SEED_STRIDE = 1000003


@dataclass
class TrainConfig:
    variant: VariantConfig
    architectures: list[list[int]]
    epochs: int = 5000
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    rng_seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate < 0.0:
            raise ValueError("learning rate must be >= 0")
        if len(self.architectures) != self.variant.n_subnets:
            raise ValueError(
                f"mode {self.variant.mode.value} needs "
                f"{self.variant.n_subnets} architectures"
            )


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n))


def adam_step(state: AdamState, params: np.ndarray, grads: np.ndarray, config: TrainConfig):
    """Standard bias-corrected Adam update; returns the new parameter vector."""
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ValueError("parameter/gradient/state dimension mismatch")
    b1, b2 = config.adam_beta1, config.adam_beta2
    state.t += 1
    state.m = b1 * state.m + (1.0 - b1) * grads
    state.v = b2 * state.v + (1.0 - b2) * grads * grads
    m_hat = state.m / (1.0 - b1**state.t)
    v_hat = state.v / (1.0 - b2**state.t)
    return params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)


@dataclass
class TrainingHistory:
    """Per-epoch loss breakdowns for every subnet, plus wall-clock marks."""

    records: list[list[LossBreakdown]] = field(default_factory=list)
    elapsed_seconds: list[float] = field(default_factory=list)
    best_nets: list[SubnetParams] = field(default_factory=list)
    best_epoch: int = 0

    @property
    def n_epochs(self) -> int:
        return len(self.records)

    def subnet_totals(self, i: int) -> np.ndarray:
        return np.asarray([r[i].total for r in self.records])

    def min_loss(self, i: int) -> float:
        return float(self.subnet_totals(i).min())

    def epoch_totals(self) -> np.ndarray:
        return np.asarray([sum(bd.total for bd in r) for r in self.records])

    def min_total(self) -> float:
        return float(self.epoch_totals().min())

    def min_total_epoch(self) -> int:
        return int(self.epoch_totals().argmin())

    def to_csv(self, path) -> None:
        """History export; timing lives in run metadata, not here, so two
        identically seeded runs produce byte-identical files."""
        with open(path, "w", newline="") as fh:
            fh.write(
                "epoch,subnet,data_loss,residual_loss,"
                "interface_residual_loss,interface_average_loss,total\n"
            )
            for epoch, bds in enumerate(self.records):
                for i, bd in enumerate(bds):
                    fh.write(
                        f"{epoch},{i},{bd.data_loss!r},{bd.residual_loss!r},"
                        f"{bd.interface_residual_loss!r},"
                        f"{bd.interface_average_loss!r},{bd.total!r}\n"
                    )


class TrainingDiverged(RuntimeError):
    """Raised when a loss or gradient goes non-finite mid-run."""

    def __init__(self, epoch: int, last_good: list[SubnetParams], detail=""):
        self.epoch = epoch
        self.last_good = last_good
        super().__init__(f"training diverged at epoch {epoch}: {detail}")


def init_nets(config: TrainConfig) -> list[SubnetParams]:
    return [
        network.init(arch, config.rng_seed + _SUBNET_SEED_STRIDE * i)
        for i, arch in enumerate(config.architectures)
    ]


def _epoch_grads(nets, plan, model, analysis, config):
    """Loss breakdowns and per-subnet gradients at the current snapshot."""
    grads, breakdowns = [], []
    for i, net in enumerate(nets):
        tape = Tape()
        pv = network.register(tape, net)
        if config.variant.n_subnets == 2:
            other = nets[1 - i]
            total, bd = losses.xpinn_subnet_loss(
                i, pv, other, plan, model, analysis, config.variant
            )
        else:
            total, bd = losses.single_net_loss(pv, plan, model, analysis, config.variant)
        grads.append(loss_gradient(tape, total))
        breakdowns.append(bd)
        tape.release()
    return breakdowns, grads


def train(
    config: TrainConfig,
    plan: CollocationPlan,
    analysis: ShockAnalysis,
    model: FluxModel,
    checkpoint_dir=None,
):
    """Run the full optimization; returns (trained nets, history).

    The returned nets are the parameters after the final epoch's update.
    Checkpoints (when a directory is given) are written every 500 epochs
    plus at the minimum-total-loss epoch.
    """
    nets = init_nets(config)
    states = [AdamState.zeros(net.to_vector().size) for net in nets]
    history = TrainingHistory()
    best_total = np.inf
    best_nets = [net.copy() for net in nets]
    best_epoch = 0
    t0 = time.perf_counter()

    if checkpoint_dir is not None:
        checkpoint_dir = Path(checkpoint_dir)
        checkpoint_dir.mkdir(parents=True, exist_ok=True)

    for epoch in range(config.epochs):
        try:
            breakdowns, grads = _epoch_grads(nets, plan, model, analysis, config)
        except network.NonFiniteValueError as err:
            raise TrainingDiverged(epoch, best_nets, str(err)) from err
        total = sum(bd.total for bd in breakdowns)
        if not np.isfinite(total) or any(not np.all(np.isfinite(g)) for g in grads):
            raise TrainingDiverged(epoch, best_nets, f"non-finite loss {total}")

        history.records.append(breakdowns)
        history.elapsed_seconds.append(time.perf_counter() - t0)
        if total < best_total:
            best_total = total
            best_nets = [net.copy() for net in nets]
            best_epoch = epoch

        for net, state, g in zip(nets, states, grads):
            net.from_vector(adam_step(state, net.to_vector(), g, config))

        if checkpoint_dir is not None and (epoch + 1) % CHECKPOINT_EVERY == 0:
            for i, net in enumerate(nets):
                network.save_checkpoint(net, checkpoint_dir / f"net{i}_epoch{epoch + 1}.txt")

    history.best_nets = best_nets
    history.best_epoch = best_epoch
    if checkpoint_dir is not None:
        for i, net in enumerate(best_nets):
            network.save_checkpoint(net, checkpoint_dir / f"net{i}_best_epoch{best_epoch}.txt")

    return nets, history
