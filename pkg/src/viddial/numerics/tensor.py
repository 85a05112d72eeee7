"""Dense float64 tensors with a dynamic reverse-mode tape.

Every op builds a new :class:`Tensor` holding a closure that maps the output
gradient to input gradients. :meth:`Tensor.backward` walks the graph in
reverse topological order and sums gradients over all paths.
"""
import contextlib
import threading
from typing import Callable, Optional, Sequence

import numpy as np

from viddial.errors import ContractError, DimensionError, NumericError
from viddial.numerics import kernels

_state = threading.local()


def grad_enabled():
    return getattr(_state, "enabled", True)


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block (thread-local)."""
    previous = grad_enabled()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = previous


class Tensor:
    """An n-dimensional float64 array that can participate in a graph."""

    __slots__ = ("data", "requires_grad", "grad", "name", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, name=None):
        arr = np.array(data, dtype=np.float64)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: tuple = ()
        self._backward: Optional[Callable] = None

    # -- construction helpers -------------------------------------------
    @classmethod
    def _from_op(cls, data, parents, backward):
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.name = None
        needs = grad_enabled() and any(p.requires_grad for p in parents)
        out.requires_grad = needs
        out._parents = tuple(parents) if needs else ()
        out._backward = backward if needs else None
        return out

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def __len__(self):
        return self.data.shape[0]

    def __repr__(self):
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{tag}, requires_grad={self.requires_grad})"

    def item(self):
        return float(self.data)

    def numpy(self):
        return self.data

    def detach(self):
        return Tensor(self.data.copy())

    def zero_grad(self):
        self.grad = None

    # -- operator sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return index_select(self, index)

    @property
    def T(self):
        return transpose(self)

    def sum(self, axis=None):
        return tsum(self, axis)

    def reshape(self, *shape):
        return reshape(self, shape[0] if len(shape) == 1 else shape)

    # -- differentiation ------------------------------------------------
    def backward(self, grad=None):
        """Accumulate d(self)/d(leaf) into ``.grad`` of every reachable tensor.

        ``self`` must be a scalar unless an explicit seed gradient is given.
        """
        if grad is None:
            if self.data.size != 1:
                raise ContractError(f"backward() needs a scalar loss, got shape {self.shape}")
            seed = np.ones_like(self.data)
        else:
            seed = np.asarray(grad, dtype=np.float64)
        if not self.requires_grad:
            return
        order = _topo_order(self)
        pending = {id(self): seed}
        for node in reversed(order):
            g = pending.pop(id(node), None)
            if g is None:
                continue
            node.grad = g.copy() if node.grad is None else node.grad + g
            if node._backward is None:
                continue
            parent_grads = node._backward(g)
            for parent, pg in zip(node._parents, parent_grads):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in pending:
                    pending[key] = pending[key] + pg
                else:
                    pending[key] = pg


def _topo_order(root):
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _unbroadcast(grad, shape):
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


# -- elementwise ---------------------------------------------------------
def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    sa, sb = a.shape, b.shape

    def backward(g):
        return _unbroadcast(g, sa), _unbroadcast(g, sb)

    return Tensor._from_op(a.data + b.data, (a, b), backward)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    sa, sb = a.shape, b.shape

    def backward(g):
        return _unbroadcast(g, sa), _unbroadcast(-g, sb)

    return Tensor._from_op(a.data - b.data, (a, b), backward)


def mul(a, b):
    """Elementwise (Hadamard) product with numpy broadcasting."""
    a, b = as_tensor(a), as_tensor(b)
    ad, bd = a.data, b.data

    def backward(g):
        return _unbroadcast(g * bd, ad.shape), _unbroadcast(g * ad, bd.shape)

    return Tensor._from_op(ad * bd, (a, b), backward)


def neg(a):
    return Tensor._from_op(-a.data, (a,), lambda g: (-g,))


def tanh(a):
    out = np.tanh(a.data)
    return Tensor._from_op(out, (a,), lambda g: (g * (1.0 - out * out),))


def _stable_sigmoid(x):
    return np.exp(-np.logaddexp(0.0, -x))


def sigmoid(a):
    out = _stable_sigmoid(a.data)
    return Tensor._from_op(out, (a,), lambda g: (g * out * (1.0 - out),))


def log_sigmoid(a):
    """``log(sigmoid(a))`` without overflow."""
    x = a.data
    out = -np.logaddexp(0.0, -x)
    return Tensor._from_op(out, (a,), lambda g: (g * _stable_sigmoid(-x),))


def exp(a):
    out = np.exp(a.data)
    return Tensor._from_op(out, (a,), lambda g: (g * out,))


def log(a):
    x = a.data
    if np.any(x <= 0) or np.any(np.isnan(x)):
        raise NumericError("log of non-positive value")
    return Tensor._from_op(np.log(x), (a,), lambda g: (g / x,))


def clamp_min(a, floor):
    """``max(a, floor)``; gradient is zero where the floor is active."""
    x = a.data
    mask = ~(x <= floor)  # NaN stays NaN so a poisoned loss still surfaces
    return Tensor._from_op(np.where(mask, x, floor), (a,), lambda g: (g * mask,))


def relu(a):
    x = a.data
    mask = ~(x <= 0)
    return Tensor._from_op(np.where(mask, x, 0.0), (a,), lambda g: (g * mask,))


def hinge(a):
    """``max(0, a)``."""
    return relu(a)


# -- reductions and shape ------------------------------------------------
def tsum(a, axis=None):
    shape = a.shape

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, shape).copy(),)
        return (np.broadcast_to(np.expand_dims(g, axis), shape).copy(),)

    return Tensor._from_op(np.asarray(a.data.sum(axis=axis)), (a,), backward)


def mean(a, axis=None):
    count = a.data.size if axis is None else a.shape[axis]
    return mul(tsum(a, axis), 1.0 / count)


def reshape(a, shape):
    old = a.shape
    return Tensor._from_op(a.data.reshape(shape), (a,), lambda g: (g.reshape(old),))


def transpose(a):
    return Tensor._from_op(a.data.T, (a,), lambda g: (g.T,))


def index_select(a, index):
    """Numpy-style indexing; repeated integer indices accumulate gradient."""
    shape = a.shape

    def backward(g):
        full = np.zeros(shape)
        np.add.at(full, index, g)
        return (full,)

    return Tensor._from_op(np.asarray(a.data[index]), (a,), backward)


def flip(a, axis=0):
    return Tensor._from_op(np.flip(a.data, axis).copy(), (a,), lambda g: (np.flip(g, axis).copy(),))


def concat(tensors: Sequence[Tensor], axis=0):
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ContractError("concat of an empty sequence")
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise DimensionError(f"concat shapes {[t.shape for t in tensors]}: {exc}") from None
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor._from_op(out, tensors, backward)


def stack(tensors: Sequence[Tensor], axis=0):
    return concat([reshape(t, t.shape[:axis] + (1,) + t.shape[axis:]) for t in tensors], axis=axis)


def zeros(*shape):
    return Tensor(np.zeros(shape))


# -- linear algebra ------------------------------------------------------
def matmul(a, b):
    """Matrix product for 1-D/2-D operands (numpy ``@`` semantics)."""
    a, b = as_tensor(a), as_tensor(b)
    ad, bd = a.data, b.data
    if ad.ndim == 0 or bd.ndim == 0 or ad.ndim > 2 or bd.ndim > 2:
        raise DimensionError(f"matmul supports 1-D/2-D operands, got {ad.shape} and {bd.shape}")
    k_a = ad.shape[-1]
    k_b = bd.shape[0]
    if k_a != k_b:
        raise DimensionError(f"matmul inner dimensions differ: {ad.shape} @ {bd.shape}")

    def backward(g):
        if ad.ndim == 1 and bd.ndim == 1:
            return g * bd, g * ad
        if ad.ndim == 1:
            return bd @ g, np.outer(ad, g)
        if bd.ndim == 1:
            return np.outer(g, bd), ad.T @ g
        return g @ bd.T, ad.T @ g

    return Tensor._from_op(np.asarray(ad @ bd), (a, b), backward)


def _check_finite(x, what):
    if np.any(np.isnan(x)):
        raise NumericError(f"NaN input to {what}")


def softmax(a, axis=-1):
    """Softmax along ``axis`` with max subtraction."""
    x = a.data
    _check_finite(x, "softmax")
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return Tensor._from_op(out, (a,), backward)


def log_softmax(a, axis=-1):
    x = a.data
    _check_finite(x, "log_softmax")
    z = x - x.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=axis, keepdims=True))
    out = z - lse

    def backward(g):
        return (g - np.exp(out) * g.sum(axis=axis, keepdims=True),)

    return Tensor._from_op(out, (a,), backward)


# -- fused recurrent op --------------------------------------------------
def lstm_sequence(x, w_x, w_h, b, h0=None, c0=None):
    """Unroll one LSTM layer over the rows of ``x``.

    Args:
        x: (T, D) inputs.
        w_x: (D, 4H) input weights; gate blocks ordered ``[i, f, o, g]``.
        w_h: (H, 4H) recurrent weights.
        b: (4H,) bias.
        h0, c0: optional (H,) initial states; ``h0`` may carry gradient.

    Returns:
        (T, H) tensor of hidden states. The recurrence itself runs in the
        active kernel backend as a single tape node.
    """
    hidden = w_h.shape[0]
    if x.ndim != 2 or w_x.shape != (x.shape[1], 4 * hidden) or b.shape != (4 * hidden,):
        raise DimensionError(
            f"lstm shapes x={x.shape} w_x={w_x.shape} w_h={w_h.shape} b={b.shape}"
        )
    h0 = zeros(hidden) if h0 is None else as_tensor(h0)
    c0 = zeros(hidden) if c0 is None else as_tensor(c0)
    xd, wxd = x.data, w_x.data
    whd = np.ascontiguousarray(w_h.data)
    pre = np.ascontiguousarray(xd @ wxd + b.data)
    h0d = np.ascontiguousarray(h0.data)
    c0d = np.ascontiguousarray(c0.data)
    hs, cs, gates = kernels.lstm_forward(pre, whd, h0d, c0d)

    def backward(g):
        d_pre, d_h0, d_c0 = kernels.lstm_backward(np.ascontiguousarray(g), whd, c0d, cs, gates)
        h_prev = np.vstack([h0d[None, :], hs[:-1]])
        return (d_pre @ wxd.T, xd.T @ d_pre, h_prev.T @ d_pre, d_pre.sum(axis=0), d_h0, d_c0)

    out = Tensor._from_op(hs, (x, w_x, w_h, b, h0, c0), backward)
    return out
