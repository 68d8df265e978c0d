"""Gradient checks for the reverse-mode tape."""

import numpy as np
import pytest

from xpinn_bl import autodiff as ad


def fd_grad(f, x, h=1e-6):
    """Central-difference gradient of a scalar function of an array."""
    g = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2 * h)
    return g


def check(build, x0, rtol=1e-6):
    """Compare tape gradient of mean(build(x)) against finite differences."""
    tape = ad.Tape()
    x = tape.param(x0)
    loss = ad.mean(build(x))
    tape.backward(loss)
    got = x.grad
    want = fd_grad(lambda v: float(ad.values(ad.mean(build_np(build, v)))), x0)
    np.testing.assert_allclose(got, want, rtol=rtol, atol=1e-9)


def build_np(build, v):
    tape = ad.Tape()
    return ad.values(build(tape.const(v)))


def test_add_and_scale():
    check(lambda x: 3.0 * x + 1.5, np.array([0.2, -0.4, 1.1]))


def test_product_rule():
    check(lambda x: x * x + 2.0 * x, np.array([0.3, -1.2]))


def test_division():
    check(lambda x: 1.0 / (x + 2.0), np.array([0.5, -0.5, 0.0]))


def test_power():
    check(lambda x: x**3, np.array([0.4, -0.7]))


def test_tanh():
    check(lambda x: ad.tanh(x), np.array([-1.5, 0.0, 0.8]))


def test_chained_expression():
    check(lambda x: ad.tanh(x * x - 0.5) / (1.0 + x * x), np.array([0.3, -0.9, 2.0]))


def test_broadcast_scalar_against_array():
    # scalar parameter broadcast across an array must accumulate its grad
    tape = ad.Tape()
    s = tape.param(np.array(0.7))
    arr = tape.const(np.array([1.0, 2.0, 3.0]))
    loss = ad.mean(s * arr)
    tape.backward(loss)
    assert s.grad == pytest.approx(2.0)  # mean of [1, 2, 3]


def test_where_routes_gradient():
    tape = ad.Tape()
    x = tape.param(np.array([0.2, 0.8]))
    out = ad.where(ad.values(x) < 0.5, 3.0 * x, 5.0 * x)
    tape.backward(ad.mean(out))
    np.testing.assert_allclose(x.grad, [1.5, 2.5])


def test_clip_passthrough_value_and_gradient():
    # value is clipped, gradient passes through unchanged (identity surrogate)
    tape = ad.Tape()
    x = tape.param(np.array([-0.5, 0.5, 1.5]))
    y = ad.clip_passthrough(x, -0.2, 1.2)
    np.testing.assert_allclose(ad.values(y), [-0.2, 0.5, 1.2])
    tape.backward(ad.mean(y))
    np.testing.assert_allclose(x.grad, [1 / 3, 1 / 3, 1 / 3])


def test_mean_gradient():
    tape = ad.Tape()
    x = tape.param(np.arange(4.0))
    tape.backward(ad.mean(x))
    np.testing.assert_allclose(x.grad, 0.25 * np.ones(4))


def test_matmul_t_matches_numpy():
    rng = np.random.default_rng(3)
    x0 = rng.standard_normal((5, 3))
    w0 = rng.standard_normal((2, 3))
    tape = ad.Tape()
    x = tape.param(x0.copy())
    w = tape.param(w0.copy())
    out = ad.matmul_t(x, w)
    np.testing.assert_allclose(ad.values(out), x0 @ w0.T)
    tape.backward(ad.mean(out * out))
    want_x = fd_grad(lambda v: float(np.mean((v @ w0.T) ** 2)), x0)
    want_w = fd_grad(lambda v: float(np.mean((x0 @ v.T) ** 2)), w0)
    np.testing.assert_allclose(x.grad, want_x, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(w.grad, want_w, rtol=1e-6, atol=1e-9)


def test_squeeze_last():
    tape = ad.Tape()
    x = tape.param(np.ones((4, 1)))
    out = ad.squeeze_last(x)
    assert ad.values(out).shape == (4,)
    tape.backward(ad.mean(out))
    assert x.grad.shape == (4, 1)


def test_numpy_defers_to_var():
    # __array_ufunc__ = None makes numpy scalars use Var's reflected dunders
    tape = ad.Tape()
    x = tape.param(np.array([1.0, 2.0]))
    out = np.float64(2.0) * x + np.float64(1.0)
    assert isinstance(out, ad.Var)
    np.testing.assert_allclose(ad.values(out), [3.0, 5.0])


def test_loss_gradient_zero_for_unused_params():
    tape = ad.Tape()
    a = tape.param(np.array([1.0, 2.0]))
    b = tape.param(np.array([3.0]))  # never used in the loss
    loss = ad.mean(a * a)
    g = ad.loss_gradient(tape, loss)
    np.testing.assert_allclose(g, [1.0, 2.0, 0.0])


def test_backward_accumulates_over_reuse():
    tape = ad.Tape()
    x = tape.param(np.array([2.0]))
    y = x * x + x * 3.0  # x reused in two branches
    tape.backward(ad.mean(y))
    assert x.grad[0] == pytest.approx(7.0)
