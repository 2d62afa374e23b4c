"""Dense float64 tensors with a reverse-mode tape.

Ops only record onto a tape when one is active (``with Tape(): ...``) and at
least one input requires a gradient. Outside a tape every op is a plain
numpy computation, which is what inference and finite differencing use.
"""

from __future__ import annotations

import numpy as np


class ShapeError(ValueError):
    """Operand shapes are incompatible."""


class TapeError(RuntimeError):
    """Misuse of the gradient tape (consumed tape, non-scalar loss, ...)."""


class Tensor:
    __slots__ = ("data", "requires_grad", "_tape")

    def __init__(self, data, requires_grad=False):
        arr = np.asarray(data, dtype=np.float64)
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
        self.data = arr
        self.requires_grad = requires_grad
        self._tape = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def numpy(self):
        return self.data.copy()

    def item(self):
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def __len__(self):
        return self.data.shape[0]

    # operator sugar; the implementations live in ops
    def __add__(self, other):
        from dagn.numerics import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from dagn.numerics import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from dagn.numerics import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from dagn.numerics import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from dagn.numerics import ops
        return ops.div(self, other)

    def __neg__(self):
        from dagn.numerics import ops
        return ops.mul(self, -1.0)

    def __matmul__(self, other):
        from dagn.numerics import ops
        return ops.matmul(self, other)

    def __getitem__(self, index):
        from dagn.numerics import ops
        return ops.index(self, index)


class Parameter(Tensor):
    """A named leaf tensor that accumulates gradients across backward calls."""

    __slots__ = ("name", "grad")

    def __init__(self, data, name):
        super().__init__(np.array(data, dtype=np.float64), requires_grad=True)
        self.name = name
        self.grad = np.zeros_like(self.data)

    @property
    def value(self):
        return self.data

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.shape})"


class _Node:
    __slots__ = ("out", "inputs", "backward")

    def __init__(self, out, inputs, backward):
        self.out = out
        self.inputs = inputs
        self.backward = backward


class Tape:
    """Ordered record of executed primitive ops.

    Used as a context manager; tapes nest, and ops record onto the innermost
    active one. A tape can be replayed backward exactly once.
    """

    _stack: list[Tape] = []

    def __init__(self):
        self.nodes: list[_Node] = []
        self.consumed = False
        # smallest |x| seen at a ReLU input; lets gradient checks skip kinks
        self.relu_margin = np.inf

    def __enter__(self):
        Tape._stack.append(self)
        return self

    def __exit__(self, *exc):
        Tape._stack.remove(self)
        return False

    def __len__(self):
        return len(self.nodes)

    @classmethod
    def active(cls):
        return cls._stack[-1] if cls._stack else None

    def backward(self, loss):
        if self.consumed:
            raise TapeError("tape already consumed; run the forward pass again")
        if loss._tape is not self:
            raise TapeError("loss was not produced by ops on this tape")
        if loss.data.size != 1:
            raise TapeError(f"backward needs a scalar loss, got shape {loss.shape}")
        self.consumed = True
        grads = {id(loss): np.ones_like(loss.data)}
        for node in reversed(self.nodes):
            g = grads.pop(id(node.out), None)
            if g is None:
                continue
            in_grads = node.backward(g)
            for inp, ig in zip(node.inputs, in_grads):
                if ig is None or not inp.requires_grad:
                    continue
                if isinstance(inp, Parameter):
                    inp.grad += ig
                    continue
                key = id(inp)
                prev = grads.get(key)
                grads[key] = ig if prev is None else prev + ig
        self.nodes = []


def backward(loss):
    """Accumulate dLoss/dParameter into every reachable ``Parameter.grad``."""
    if not isinstance(loss, Tensor):
        raise TapeError("backward expects a Tensor")
    if loss.data.size != 1:
        raise TapeError(f"backward needs a scalar loss, got shape {loss.shape}")
    if loss._tape is None:
        raise TapeError("loss was not produced by taped ops")
    loss._tape.backward(loss)


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def record(out_data, inputs, backward_fn):
    """Wrap ``out_data`` and, if needed, append the op to the active tape.

    ``backward_fn`` maps the output gradient to one gradient (or None) per
    input, in order.
    """
    out = Tensor(out_data)
    tape = Tape.active()
    if tape is not None and any(t.requires_grad for t in inputs):
        if tape.consumed:
            raise TapeError("cannot record onto a consumed tape")
        out.requires_grad = True
        out._tape = tape
        tape.nodes.append(_Node(out, inputs, backward_fn))
    return out
