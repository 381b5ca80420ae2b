"""Dense float64 tensors with reverse-mode automatic differentiation.

Every op returns a new :class:`Tensor` that remembers its parents and a closure
propagating the output gradient back to them. The graph is implicit in those
parent links; :func:`backward` walks it in reverse topological order.
Leading batch dimensions are supported by ``dense``, ``conv2d`` and ``flatten``.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import KernelTooLarge, NotScalarLoss, ShapeMismatch

CHECK_FINITE = bool(os.environ.get("REPRBENCH_DEBUG"))
_GRAD_ENABLED = True


@contextmanager
def no_grad():
    """Evaluate ops without recording the graph."""
    global _GRAD_ENABLED
    prev, _GRAD_ENABLED = _GRAD_ENABLED, False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "op")

    def __init__(self, data, requires_grad: bool = False, _parents=(), op: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        if self.data.ndim > 4:
            raise ShapeMismatch(f"rank {self.data.ndim} > 4 not supported")
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = None
        self.op = op
        if CHECK_FINITE and not np.all(np.isfinite(self.data)):
            raise FloatingPointError(f"non-finite values produced by {op or 'leaf'}")

    def __repr__(self):
        return f"Tensor(shape={self.shape}, op={self.op!r}, requires_grad={self.requires_grad})"

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(_as_tensor(other)))

    def __rsub__(self, other):
        return add(_as_tensor(other), neg(self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def sum(self):
        return tsum(self)

    def mean(self):
        return mean(self)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data, parents, op, rule) -> Tensor:
    parents = tuple(parents) if _GRAD_ENABLED else ()
    out = Tensor(data, any(p.requires_grad for p in parents), parents, op)
    if out.requires_grad:
        out._backward = rule
    return out


def _accum(t: Tensor, g, owned: bool = False):
    """Add ``g`` into ``t.grad``. ``owned`` marks a fresh array that may be kept."""
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = g if owned and g.flags.c_contiguous else np.array(g, dtype=np.float64)
    else:
        t.grad += g


def _unbroadcast(g: np.ndarray, shape) -> np.ndarray:
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def backward(loss: Tensor):
    """Fill ``.grad`` of every tensor that requires it with d(loss)/d(tensor).

    Gradients accumulate, so call ``zero_grad`` (or the optimiser) between steps.
    """
    if loss.size != 1:
        raise NotScalarLoss(f"backward needs a scalar loss, got shape {loss.shape}")
    order, seen, stack = [], set(), [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        stack.extend((p, False) for p in node._parents if p.requires_grad and id(p) not in seen)
    _accum(loss, np.ones_like(loss.data))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)

    def rule(g):
        _accum(a, _unbroadcast(g, a.shape))
        _accum(b, _unbroadcast(g, b.shape))

    return _node(a.data + b.data, (a, b), "add", rule)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)

    def rule(g):
        if a.requires_grad:
            _accum(a, _unbroadcast(g * b.data, a.shape), True)
        if b.requires_grad:
            _accum(b, _unbroadcast(g * a.data, b.shape), True)

    return _node(a.data * b.data, (a, b), "mul", rule)


def neg(a: Tensor) -> Tensor:
    return _node(-a.data, (a,), "neg", lambda g: _accum(a, -g, True))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"matmul of {a.shape} and {b.shape}")

    def rule(g):
        _accum(a, g @ b.data.T, True)
        _accum(b, a.data.T @ g, True)

    return _node(a.data @ b.data, (a, b), "matmul", rule)


def dense(x: Tensor, W: Tensor, b: Tensor) -> Tensor:
    """``W @ x + b`` for ``x`` of shape ``(n_in,)`` or ``(batch, n_in)``."""
    if W.data.ndim != 2 or x.shape[-1] != W.shape[1] or b.shape != (W.shape[0],):
        raise ShapeMismatch(f"dense: x {x.shape}, W {W.shape}, b {b.shape}")
    xb = x.data.reshape(-1, W.shape[1])
    y = xb @ W.data.T + b.data

    def rule(g):
        gb = g.reshape(-1, W.shape[0])
        _accum(W, gb.T @ xb, True)
        _accum(b, gb.sum(axis=0), True)
        if x.requires_grad:
            _accum(x, (gb @ W.data).reshape(x.shape), True)

    return _node(y.reshape(x.shape[:-1] + (W.shape[0],)), (x, W, b), "dense", rule)


def conv2d(x: Tensor, K: Tensor, b: Tensor) -> Tensor:
    """Valid 2-D cross-correlation, stride 1.

    ``x``: ``(c_in, H, W)`` or ``(batch, c_in, H, W)``; ``K``: ``(c_out, c_in, r, s)``.
    """
    c_out, c_in, r, s = K.shape
    batched = x.data.ndim == 4
    xd = x.data if batched else x.data[None]
    if xd.ndim != 4 or xd.shape[1] != c_in or b.shape != (c_out,):
        raise ShapeMismatch(f"conv2d: x {x.shape}, K {K.shape}, b {b.shape}")
    n, _, H, W = xd.shape
    if r > H or s > W:
        raise KernelTooLarge(f"kernel {r}x{s} larger than input {H}x{W}")
    Ho, Wo = H - r + 1, W - s + 1

    # patch matrix in (row offset, col offset, channel) order, channels last
    xl = np.ascontiguousarray(xd.transpose(0, 2, 3, 1))
    cols = np.empty((n, Ho, Wo, r, s, c_in))
    for i in range(r):
        for j in range(s):
            cols[:, :, :, i, j, :] = xl[:, i:i + Ho, j:j + Wo, :]
    cols = cols.reshape(n * Ho * Wo, r * s * c_in)
    Kmat = K.data.transpose(0, 2, 3, 1).reshape(c_out, -1)
    y = (cols @ Kmat.T + b.data).reshape(n, Ho, Wo, c_out).transpose(0, 3, 1, 2)

    def rule(g):
        gd = g if batched else g[None]
        gmat = np.ascontiguousarray(gd.transpose(0, 2, 3, 1)).reshape(-1, c_out)
        _accum(K, (gmat.T @ cols).reshape(c_out, r, s, c_in).transpose(0, 3, 1, 2))
        _accum(b, gmat.sum(axis=0), True)
        if x.requires_grad:
            gcols = (gmat @ Kmat).reshape(n, Ho, Wo, r, s, c_in)
            gx = np.zeros((n, H, W, c_in))
            for i in range(r):
                for j in range(s):
                    gx[:, i:i + Ho, j:j + Wo, :] += gcols[:, :, :, i, j, :]
            gx = np.ascontiguousarray(gx.transpose(0, 3, 1, 2))
            _accum(x, gx if batched else gx[0], True)

    return _node(y if batched else y[0], (x, K, b), "conv2d", rule)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return _node(np.maximum(x.data, 0.0), (x,), "relu", lambda g: _accum(x, g * mask, True))


def tabs(x: Tensor) -> Tensor:
    # sign(0) == 0 gives the zero subgradient at the kink
    return _node(np.abs(x.data), (x,), "abs", lambda g: _accum(x, g * np.sign(x.data), True))


def reshape(x: Tensor, shape) -> Tensor:
    return _node(x.data.reshape(shape), (x,), "reshape", lambda g: _accum(x, g.reshape(x.shape)))


def flatten(x: Tensor, start_dim: int = 0) -> Tensor:
    """Row-major flatten of all dimensions from ``start_dim`` on."""
    return reshape(x, x.shape[:start_dim] + (-1,))


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = [_as_tensor(t) for t in tensors]
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from None
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def rule(g):
        for t, piece in zip(tensors, np.split(g, bounds, axis=axis)):
            _accum(t, piece)

    return _node(data, tensors, "concat", rule)


def tsum(x: Tensor) -> Tensor:
    return _node(x.data.sum(), (x,), "sum", lambda g: _accum(x, np.broadcast_to(g, x.shape)))


def mean(x: Tensor) -> Tensor:
    n = x.size
    return _node(x.data.mean(), (x,), "mean", lambda g: _accum(x, np.broadcast_to(g / n, x.shape)))


def l1_loss(pred: Tensor, target) -> Tensor:
    """Mean absolute error between ``pred`` and ``target`` as a scalar tensor."""
    target = np.asarray(target, dtype=np.float64).reshape(pred.shape)
    return mean(tabs(add(pred, Tensor(-target))))


def dense_forward(x: Tensor, W: Tensor, b: Tensor) -> Tensor:
    return dense(x, W, b)


def conv2d_forward(x: Tensor, K: Tensor, b: Tensor) -> Tensor:
    return conv2d(x, K, b)
