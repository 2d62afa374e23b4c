"""Differentiable primitives over :class:`Tensor`.

Every function computes its forward value with numpy and hands a closure to
:func:`record` that maps the output gradient to input gradients.
"""

import math

import numpy as np
from scipy.special import erf

from dagn.numerics import kernels
from dagn.numerics.tensor import ShapeError, Tape, Tensor, as_tensor, record

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` (undo numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _check_broadcast(a, b, name):
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{name}: cannot broadcast shapes {a.shape} and {b.shape}") from None


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "add")
    return record(a.data + b.data, (a, b),
                  lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "sub")
    return record(a.data - b.data, (a, b),
                  lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "mul")
    return record(a.data * b.data, (a, b),
                  lambda g: (_unbroadcast(g * b.data, a.shape),
                             _unbroadcast(g * a.data, b.shape)))


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "div")
    out = a.data / b.data
    return record(out, (a, b),
                  lambda g: (_unbroadcast(g / b.data, a.shape),
                             _unbroadcast(-g * out / b.data, b.shape)))


def matmul(a, b):
    """2-D matrix product ``a[m×k] @ b[k×n]``."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    return record(a.data @ b.data, (a, b),
                  lambda g: (g @ b.data.T, a.data.T @ g))


def sum(x, axis=None):
    x = as_tensor(x)
    out = x.data.sum(axis=axis)

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, x.shape).copy(),)
        return (np.broadcast_to(np.expand_dims(g, axis), x.shape).copy(),)

    return record(out, (x,), backward)


def reshape(x, shape):
    x = as_tensor(x)
    return record(x.data.reshape(shape), (x,), lambda g: (g.reshape(x.shape),))


def transpose(x):
    x = as_tensor(x)
    return record(x.data.T, (x,), lambda g: (g.T,))


def index(x, idx):
    """Basic or integer-array indexing; repeated indices accumulate."""
    x = as_tensor(x)

    def backward(g):
        out = np.zeros_like(x.data)
        np.add.at(out, idx, g)
        return (out,)

    return record(x.data[idx], (x,), backward)


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]
    return record(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors),
                  lambda g: tuple(np.split(g, bounds, axis=axis)))


def sigmoid(x):
    x = as_tensor(x)
    y = 0.5 * (np.tanh(0.5 * x.data) + 1.0)
    return record(y, (x,), lambda g: (g * y * (1.0 - y),))


def relu(x):
    x = as_tensor(x)
    tape = Tape.active()
    if tape is not None and x.requires_grad and x.data.size:
        tape.relu_margin = min(tape.relu_margin, float(np.abs(x.data).min()))
    mask = x.data > 0.0
    return record(np.where(mask, x.data, 0.0), (x,), lambda g: (g * mask,))


def gelu(x):
    """Exact GELU, ``x * Phi(x)``."""
    x = as_tensor(x)
    cdf = 0.5 * (1.0 + erf(x.data / _SQRT2))
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x.data * x.data)
    return record(x.data * cdf, (x,), lambda g: (g * (cdf + x.data * pdf),))


def tanh(x):
    x = as_tensor(x)
    y = np.tanh(x.data)
    return record(y, (x,), lambda g: (g * (1.0 - y * y),))


def exp(x):
    x = as_tensor(x)
    y = np.exp(x.data)
    return record(y, (x,), lambda g: (g * y,))


def log(x):
    x = as_tensor(x)
    return record(np.log(x.data), (x,), lambda g: (g / x.data,))


_ACTIVATIONS = {"sigmoid": sigmoid, "relu": relu, "gelu": gelu, "tanh": tanh}


def activation(x, kind):
    try:
        fn = _ACTIVATIONS[kind]
    except KeyError:
        raise ValueError(f"unknown activation {kind!r}; expected one of "
                         f"{sorted(_ACTIVATIONS)}") from None
    return fn(x)


def softmax(x, mask=None):
    """Softmax over the last axis, with max subtraction.

    ``mask`` (bool, same shape) restricts support; masked-out entries get
    probability exactly 0. Every row must keep at least one entry.
    """
    x = as_tensor(x)
    if x.data.size == 0 or x.shape[-1] == 0:
        raise ValueError("softmax of an empty tensor")
    if mask is None:
        z = x.data - x.data.max(axis=-1, keepdims=True)
        e = np.exp(z)
    else:
        mask = np.asarray(mask, dtype=bool)
        if not mask.any(axis=-1).all():
            raise ValueError("softmax mask leaves a row empty")
        m = np.where(mask, x.data, -np.inf).max(axis=-1, keepdims=True)
        e = np.where(mask, np.exp(np.where(mask, x.data - m, 0.0)), 0.0)
    y = e / e.sum(axis=-1, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return record(y, (x,), backward)


def log_softmax(x):
    x = as_tensor(x)
    if x.data.size == 0:
        raise ValueError("log_softmax of an empty tensor")
    z = x.data - x.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    out = z - lse
    y = np.exp(out)
    return record(out, (x,), lambda g: (g - y * g.sum(axis=-1, keepdims=True),))


def layer_norm(x, gain, bias, eps=1e-5):
    """Normalize the last axis to zero mean / unit variance, then scale and shift."""
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    d = x.shape[-1] if x.ndim else 0
    if d == 0:
        raise ValueError("layer_norm needs a non-empty last axis")
    if eps <= 0:
        raise ValueError("layer_norm eps must be positive")
    if gain.shape != (d,) or bias.shape != (d,):
        raise ShapeError(f"layer_norm: gain/bias must have shape ({d},), "
                         f"got {gain.shape} and {bias.shape}")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    inv = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + eps)
    xhat = xc * inv
    lead = tuple(range(x.ndim - 1))

    def backward(g):
        dxhat = g * gain.data
        dx = inv * (dxhat - dxhat.mean(axis=-1, keepdims=True)
                    - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
        return dx, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return record(xhat * gain.data + bias.data, (x, gain, bias), backward)


def cross_entropy(scores, gold):
    """``-log softmax(scores)[gold]`` for a 1-D score vector."""
    scores = as_tensor(scores)
    if scores.ndim != 1:
        raise ShapeError(f"cross_entropy expects a 1-D score vector, got {scores.shape}")
    n = scores.shape[0]
    if not isinstance(gold, (int, np.integer)) or not 0 <= gold < n:
        raise ValueError(f"gold index {gold!r} out of range for {n} scores")
    z = scores.data - scores.data.max()
    lse = math.log(np.exp(z).sum())
    loss = lse - z[gold]

    def backward(g):
        p = np.exp(z - lse)
        p[gold] -= 1.0
        return (g * p,)

    return record(np.array(loss), (scores,), backward)


def dropout(x, rate, rng):
    """Inverted dropout; identity when ``rate == 0``."""
    x = as_tensor(x)
    if rate <= 0.0:
        return x
    if rate >= 1.0:
        raise ValueError("dropout rate must be < 1")
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return record(x.data * mask, (x,), lambda g: (g * mask,))


def gru(gx, w_h, b_h, reverse=False):
    """Run a GRU over precomputed input projections ``gx[L×3h]``.

    Returns hidden states ``[L×h]`` aligned with the input positions; with
    ``reverse`` the recurrence runs from the last position to the first.
    """
    gx, w_h, b_h = as_tensor(gx), as_tensor(w_h), as_tensor(b_h)
    h = w_h.shape[0]
    if w_h.shape != (h, 3 * h) or b_h.shape != (3 * h,) or gx.ndim != 2 or gx.shape[1] != 3 * h:
        raise ShapeError(f"gru: inconsistent shapes gx={gx.shape}, w_h={w_h.shape}, b_h={b_h.shape}")
    seq = gx.data[::-1] if reverse else gx.data
    seq = np.ascontiguousarray(seq)
    hs, r, z, n, ghn = kernels.gru_forward(seq, w_h.data, b_h.data)
    out = hs[1:]

    def backward(g):
        g = np.ascontiguousarray(g[::-1] if reverse else g)
        dgx, dw, db = kernels.gru_backward(g, hs, r, z, n, ghn, w_h.data)
        if reverse:
            dgx = dgx[::-1]
        return np.ascontiguousarray(dgx), dw, db

    return record(out[::-1] if reverse else out, (gx, w_h, b_h), backward)
