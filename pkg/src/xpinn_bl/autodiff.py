"""Array-valued automatic differentiation on a linear tape.

Two differentiation modes cooperate here:

* Forward mode for derivatives of the network output with respect to the
  input coordinates (x, t, and optionally d2/dx2).  The tangent channels are
  built out of the same tape operations as the primal values, so PDE
  residuals containing input derivatives remain differentiable with respect
  to the trainable parameters.
* Reverse mode over the tape for gradients of a scalar loss with respect to
  every registered parameter.

Tape nodes hold float64 numpy arrays (a batch of collocation points per
node), which keeps the engine small while avoiding per-scalar Python
overhead.  Nodes are appended in creation order, which is already a
topological order, so the reverse sweep is a single reversed pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


class Tape:
    """Records elementary operations for one forward pass.

    A tape is single-owner: build one forward pass on it, call
    :meth:`backward` once, then discard it.  Parameters must be registered
    through :meth:`param` so that :func:`loss_gradient` can collect their
    gradients in a stable order.
    """

    def __init__(self):
        self.nodes: list[Var] = []
        self.params: list[Var] = []

    def const(self, value) -> "Var":
        return Var(self, np.asarray(value, dtype=float))

    def param(self, value) -> "Var":
        v = Var(self, np.asarray(value, dtype=float))
        self.params.append(v)
        return v

    def backward(self, root: "Var") -> None:
        """Reverse sweep seeding d(root)/d(root) = 1."""
        if np.ndim(root.value) != 0:
            raise ValueError("backward root must be a scalar node")
        root.grad = np.ones(())
        for node in reversed(self.nodes):
            if node.grad is not None and node._bw is not None:
                node._bw(node.grad)

    def release(self) -> None:
        """Drop the recorded graph so its memory is reclaimed promptly.

        Each node's backward closure captures other nodes, which in turn
        reference the tape: a reference cycle that the garbage collector
        frees only lazily.  Tight training loops build one tape per epoch,
        so breaking the cycles explicitly keeps memory flat.
        """
        for node in self.nodes:
            node._bw = None
            node.grad = None
        self.nodes.clear()
        self.params.clear()


class Var:
    """One tape node: a value, an accumulated adjoint, and a backward rule."""

    # Defer all numpy mixed-type arithmetic to our own dunders.
    __array_ufunc__ = None
    __slots__ = ("tape", "value", "grad", "_bw")

    def __init__(self, tape, value, bw=None):
        self.tape = tape
        self.value = value
        self.grad = None
        self._bw = bw
        tape.nodes.append(self)

    @property
    def shape(self):
        return np.shape(self.value)

    def __repr__(self):
        return f"Var(shape={np.shape(self.value)})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        ov, onode = _split(other)
        out = Var(self.tape, self.value + ov)

        def bw(g):
            _acc(self, _unbroadcast(g, np.shape(self.value)))
            if onode is not None:
                _acc(onode, _unbroadcast(g, np.shape(ov)))

        out._bw = bw
        return out

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other if isinstance(other, Var) else self + (-np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        ov, onode = _split(other)
        sv = self.value
        out = Var(self.tape, sv * ov)

        def bw(g):
            _acc(self, _unbroadcast(g * ov, np.shape(sv)))
            if onode is not None:
                _acc(onode, _unbroadcast(g * sv, np.shape(ov)))

        out._bw = bw
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        ov, onode = _split(other)
        sv = self.value
        out = Var(self.tape, sv / ov)

        def bw(g):
            _acc(self, _unbroadcast(g / ov, np.shape(sv)))
            if onode is not None:
                _acc(onode, _unbroadcast(-g * sv / (ov * ov), np.shape(ov)))

        out._bw = bw
        return out

    def __rtruediv__(self, other):
        ov = np.asarray(other, dtype=float)
        sv = self.value
        out = Var(self.tape, ov / sv)

        def bw(g):
            _acc(self, _unbroadcast(-g * ov / (sv * sv), np.shape(sv)))

        out._bw = bw
        return out

    def __pow__(self, p):
        if isinstance(p, Var):
            raise TypeError("only constant exponents are supported")
        sv = self.value
        out = Var(self.tape, sv**p)

        def bw(g):
            _acc(self, g * p * sv ** (p - 1))

        out._bw = bw
        return out


def _split(other):
    """Return (value, node-or-None) for a Var or a plain numeric operand."""
    if isinstance(other, Var):
        return other.value, other
    return np.asarray(other, dtype=float), None


def _acc(node: Var, g) -> None:
    if node.grad is None:
        node.grad = np.zeros(np.shape(node.value))
    node.grad = node.grad + g


def _unbroadcast(g, shape):
    """Sum an adjoint back down to the shape it was broadcast from."""
    if np.shape(g) == shape:
        return g
    g = np.asarray(g)
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


# -- generic operations (Var or ndarray/float) ------------------------------


def values(x):
    """Strip a Var down to its raw numpy value; pass arrays through."""
    return x.value if isinstance(x, Var) else x


def tanh(x):
    if not isinstance(x, Var):
        return np.tanh(x)
    y = np.tanh(x.value)
    out = Var(x.tape, y)

    def bw(g):
        _acc(x, g * (1.0 - y * y))

    out._bw = bw
    return out


def where(cond, a, b):
    """Branch select on a constant condition.

    The condition is evaluated on raw values and treated as
    non-differentiable, which is exact almost everywhere for the piecewise
    fluxes used here.
    """
    cond = np.asarray(values(cond) if isinstance(cond, Var) else cond)
    anode = a if isinstance(a, Var) else None
    bnode = b if isinstance(b, Var) else None
    if anode is None and bnode is None:
        return np.where(cond, a, b)
    tape = (anode or bnode).tape
    av, bv = values(a), values(b)
    out = Var(tape, np.where(cond, av, bv))

    def bw(g):
        if anode is not None:
            _acc(anode, _unbroadcast(g * cond, np.shape(av)))
        if bnode is not None:
            _acc(bnode, _unbroadcast(g * (~cond), np.shape(bv)))

    out._bw = bw
    return out


def clip_passthrough(x, lo, hi):
    """Clamp the value, pass the gradient through unchanged."""
    if not isinstance(x, Var):
        return np.clip(x, lo, hi)
    out = Var(x.tape, np.clip(x.value, lo, hi))

    def bw(g):
        _acc(x, g)

    out._bw = bw
    return out


def mean(x):
    if not isinstance(x, Var):
        return float(np.mean(x))
    n = np.size(x.value)
    out = Var(x.tape, np.asarray(np.mean(x.value)))

    def bw(g):
        _acc(x, np.full(np.shape(x.value), float(g) / n))

    out._bw = bw
    return out


def matmul_t(x, w):
    """x @ w.T with x of shape (N, in) and w of shape (out, in)."""
    if not isinstance(x, Var) and not isinstance(w, Var):
        return x @ np.swapaxes(w, -1, -2)
    xv, xnode = _split(x)
    wv, wnode = _split(w)
    tape = (xnode or wnode).tape
    out = Var(tape, xv @ wv.T)

    def bw(g):
        if xnode is not None:
            _acc(xnode, g @ wv)
        if wnode is not None:
            _acc(wnode, g.T @ xv)

    out._bw = bw
    return out


def squeeze_last(x):
    if not isinstance(x, Var):
        return np.asarray(x)[..., 0]
    out = Var(x.tape, x.value[..., 0])

    def bw(g):
        _acc(x, g[..., None])

    out._bw = bw
    return out


@dataclass
class DualValue:
    """Network output and its input derivatives at a single point."""

    value: float
    d_dx: float
    d_dt: float
    d2_dx2: Optional[float] = None


def loss_gradient(tape: Tape, loss_root: Var) -> np.ndarray:
    """Reverse sweep; returns the flat gradient over all registered params.

    Parameters never touched by the forward pass get gradient 0.
    """
    tape.backward(loss_root)
    parts = []
    for p in tape.params:
        g = p.grad if p.grad is not None else np.zeros(np.shape(p.value))
        parts.append(np.asarray(g, dtype=float).ravel())
    return np.concatenate(parts) if parts else np.zeros(0)
