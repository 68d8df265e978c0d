"""Feed-forward subnetworks with layer-wise adaptive tanh activations.

Each hidden layer computes z_l = tanh(a_l * (W_l z_{l-1} + b_l)) with a
single trainable slope a_l per layer; the output layer applies its slope to
the affine map but no nonlinearity.  One adaptive slope per layer including
the output layer is the parameter counting used throughout (it reproduces
totals of 777 for the two-subnet configuration and 798 for the wider
single-net one).

The same forward recurrence runs in two modes: plain numpy (evaluation,
metrics) and on an autodiff tape (training), including forward-mode tangent
channels for d/dx, d/dt and optionally d2/dx2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import DualValue, Tape, Var


class NonFiniteValueError(RuntimeError):
    """A forward pass produced a non-finite intermediate value."""

    def __init__(self, layer_index, detail=""):
        self.layer_index = layer_index
        super().__init__(f"non-finite value at layer {layer_index}: {detail}")


@dataclass
class SubnetParams:
    """Weights, biases and per-layer adaptive slopes of one subnetwork."""

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    slopes: list[float]
    rng_seed: int = 0

    @property
    def param_count(self) -> int:
        n = 0
        for w, b in zip(self.weights, self.biases):
            n += w.size + b.size
        return n + len(self.slopes)

    def copy(self) -> "SubnetParams":
        return SubnetParams(
            layer_sizes=list(self.layer_sizes),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            slopes=list(self.slopes),
            rng_seed=self.rng_seed,
        )

    def to_vector(self) -> np.ndarray:
        """Flat layout: per layer W.ravel(), b, slope."""
        parts = []
        for w, b, a in zip(self.weights, self.biases, self.slopes):
            parts.extend([w.ravel(), b, np.asarray([a])])
        return np.concatenate(parts)

    def from_vector(self, vec: np.ndarray) -> None:
        i = 0
        for li, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[li] = vec[i : i + w.size].reshape(w.shape)
            i += w.size
            self.biases[li] = vec[i : i + b.size].copy()
            i += b.size
            self.slopes[li] = float(vec[i])
            i += 1
        if i != vec.size:
            raise ValueError("parameter vector length mismatch")


def init(layer_sizes, rng_seed: int) -> SubnetParams:
    """Glorot-uniform weights (variance 2/(fan_in+fan_out)), zero biases,
    unit slopes; deterministic for a fixed seed."""
    layer_sizes = [int(n) for n in layer_sizes]
    if len(layer_sizes) < 2 or layer_sizes[0] != 2 or layer_sizes[-1] != 1:
        raise ValueError(f"layer sizes must run from 2 inputs to 1 output, got {layer_sizes}")
    if any(n < 1 for n in layer_sizes):
        raise ValueError("layer widths must be >= 1")
    rng = np.random.default_rng(rng_seed)
    weights, biases, slopes = [], [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
        slopes.append(1.0)
    return SubnetParams(layer_sizes, weights, biases, slopes, rng_seed)


def register(tape: Tape, net: SubnetParams):
    """Register every parameter on a tape, in to_vector() order.

    Returns (weights, biases, slopes) as lists of Vars, usable by
    forward_pass in place of the raw arrays.
    """
    ws, bs, sl = [], [], []
    for w, b, a in zip(net.weights, net.biases, net.slopes):
        ws.append(tape.param(w))
        bs.append(tape.param(b))
        sl.append(tape.param(a))
    return ws, bs, sl


def forward_pass(weights, biases, slopes, x, t, order: int = 0, check_finite: bool = False):
    """Run the network on a batch of points, generically over numpy or tape.

    Parameters may be raw arrays or tape Vars.  Returns (u, u_x, u_t, u_xx)
    with the derivative entries None when not requested: order 0 computes
    only u, order 1 adds u_x and u_t, order 2 adds u_xx.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    n = x.shape[0]
    z = np.stack([x, t], axis=1)
    dx = np.tile(np.asarray([1.0, 0.0]), (n, 1)) if order >= 1 else None
    dt = np.tile(np.asarray([0.0, 1.0]), (n, 1)) if order >= 1 else None
    dxx = np.zeros((n, 2)) if order >= 2 else None

    last = len(weights) - 1
    for li, (w, b, a) in enumerate(zip(weights, biases, slopes)):
        pre = a * (ad.matmul_t(z, w) + b)
        if li == last:
            z_new = pre
            dx_new = a * ad.matmul_t(dx, w) if order >= 1 else None
            dt_new = a * ad.matmul_t(dt, w) if order >= 1 else None
            dxx_new = a * ad.matmul_t(dxx, w) if order >= 2 else None
        else:
            z_new = ad.tanh(pre)
            sech2 = 1.0 - z_new * z_new
            if order >= 1:
                px = a * ad.matmul_t(dx, w)
                dx_new = sech2 * px
                dt_new = sech2 * (a * ad.matmul_t(dt, w))
            else:
                px = dx_new = dt_new = None
            if order >= 2:
                q = a * ad.matmul_t(dxx, w)
                dxx_new = sech2 * q - 2.0 * z_new * dx_new * px
            else:
                dxx_new = None
        if check_finite and not np.all(np.isfinite(ad.values(z_new))):
            raise NonFiniteValueError(li)
        z, dx, dt, dxx = z_new, dx_new, dt_new, dxx_new

    u = ad.squeeze_last(z)
    ux = ad.squeeze_last(dx) if order >= 1 else None
    ut = ad.squeeze_last(dt) if order >= 1 else None
    uxx = ad.squeeze_last(dxx) if order >= 2 else None
    return u, ux, ut, uxx


def evaluate(net: SubnetParams, x, t) -> np.ndarray:
    """Batched saturation prediction (unconstrained network output)."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t))):
        raise ValueError("non-finite network input")
    u, _, _, _ = forward_pass(net.weights, net.biases, net.slopes, x, t, order=0, check_finite=True)
    return float(u[0]) if scalar else u


def forward_with_input_derivs(net: SubnetParams, x: float, t: float, order: int = 1) -> DualValue:
    """Output plus exact d/dx, d/dt (and d2/dx2 when order = 2) at a point."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    xs = np.asarray([x], dtype=float)
    ts = np.asarray([t], dtype=float)
    u, ux, ut, uxx = forward_pass(net.weights, net.biases, net.slopes, xs, ts, order=order, check_finite=True)
    return DualValue(
        value=float(u[0]),
        d_dx=float(ux[0]),
        d_dt=float(ut[0]),
        d2_dx2=float(uxx[0]) if order == 2 else None,
    )


def save_checkpoint(net: SubnetParams, path) -> None:
    """Text checkpoint: a layer-sizes header line, then one parameter per
    line in to_vector() order (full float64 precision)."""
    with open(path, "w") as fh:
        fh.write("layers " + ",".join(str(n) for n in net.layer_sizes) + "\n")
        fh.write(f"seed {net.rng_seed}\n")
        for v in net.to_vector():
            fh.write(repr(float(v)) + "\n")


def load_checkpoint(path) -> SubnetParams:
    with open(path) as fh:
        header = fh.readline().split()
        if header[0] != "layers":
            raise ValueError("malformed checkpoint header")
        layer_sizes = [int(n) for n in header[1].split(",")]
        seed_line = fh.readline().split()
        seed = int(seed_line[1])
        vec = np.asarray([float(line) for line in fh if line.strip()])
    net = init(layer_sizes, seed)
    net.from_vector(vec)
    return net
