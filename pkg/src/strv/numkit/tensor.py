"""Dense f64 tensors with reverse-mode differentiation.

Small tape-based engine over numpy storage. Every op accepts either Tensor
or plain ndarray/scalar arguments; when no argument is a Tensor the op runs
the identical numpy kernels and returns a bare ndarray, so inference paths
share arithmetic with training paths bit for bit.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ContractViolation


class Tensor:
    """64-bit dense array plus the bookkeeping needed to replay gradients."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def _is_tensor(x) -> bool:
    return isinstance(x, Tensor)


def _data(x) -> np.ndarray:
    return x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)


def _make(out_data, parents, backward) -> Tensor:
    out = Tensor(out_data)
    live = tuple(p for p in parents if isinstance(p, Tensor) and p.requires_grad)
    if live:
        out.requires_grad = True
        out._parents = tuple(p for p in parents if isinstance(p, Tensor))
        out._backward = backward
    return out


def _accum(t: Tensor, g: np.ndarray) -> None:
    if not t.requires_grad:
        return
    t.grad = g if t.grad is None else t.grad + g


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    # Reduce a broadcast gradient back down to the parent's shape.
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def matmul(a, b):
    """2-D matrix product a @ b."""
    ad, bd = _data(a), _data(b)
    if ad.ndim != 2 or bd.ndim != 2:
        raise ContractViolation(f"matmul expects 2-D operands, got {ad.ndim}-D and {bd.ndim}-D")
    out = ad @ bd
    if not (_is_tensor(a) or _is_tensor(b)):
        return out

    def backward(g):
        if _is_tensor(a):
            _accum(a, g @ bd.T)
        if _is_tensor(b):
            _accum(b, ad.T @ g)

    return _make(out, (a, b), backward)


def add(a, b):
    """Elementwise sum with numpy broadcasting."""
    ad, bd = _data(a), _data(b)
    out = ad + bd
    if not (_is_tensor(a) or _is_tensor(b)):
        return out

    def backward(g):
        if _is_tensor(a):
            _accum(a, _unbroadcast(g, ad.shape))
        if _is_tensor(b):
            _accum(b, _unbroadcast(g, bd.shape))

    return _make(out, (a, b), backward)


def add_bias(x, b):
    """Row-wise bias add: (n, d) + (d,)."""
    return add(x, b)


def sub(a, b):
    ad, bd = _data(a), _data(b)
    out = ad - bd
    if not (_is_tensor(a) or _is_tensor(b)):
        return out

    def backward(g):
        if _is_tensor(a):
            _accum(a, _unbroadcast(g, ad.shape))
        if _is_tensor(b):
            _accum(b, _unbroadcast(-g, bd.shape))

    return _make(out, (a, b), backward)


def mul(a, b):
    ad, bd = _data(a), _data(b)
    out = ad * bd
    if not (_is_tensor(a) or _is_tensor(b)):
        return out

    def backward(g):
        if _is_tensor(a):
            _accum(a, _unbroadcast(g * bd, ad.shape))
        if _is_tensor(b):
            _accum(b, _unbroadcast(g * ad, bd.shape))

    return _make(out, (a, b), backward)


def relu(x):
    xd = _data(x)
    out = np.maximum(xd, 0.0)
    if not _is_tensor(x):
        return out

    def backward(g):
        _accum(x, g * (xd > 0.0))

    return _make(out, (x,), backward)


def reshape(x, shape: Sequence[int]):
    xd = _data(x)
    out = xd.reshape(shape)
    if not _is_tensor(x):
        return out

    def backward(g):
        _accum(x, g.reshape(xd.shape))

    return _make(out, (x,), backward)


def mean(x, axis: int | None = None):
    xd = _data(x)
    out = xd.mean(axis=axis)
    if not _is_tensor(x):
        return out
    count = xd.size if axis is None else xd.shape[axis]

    def backward(g):
        if axis is None:
            _accum(x, np.full(xd.shape, float(g) / count))
        else:
            _accum(x, np.broadcast_to(np.expand_dims(g, axis) / count, xd.shape).copy())

    return _make(out, (x,), backward)


def total(x, axis: int | None = None):
    """Sum reduction (named to avoid shadowing the builtin)."""
    xd = _data(x)
    out = xd.sum(axis=axis)
    if not _is_tensor(x):
        return out

    def backward(g):
        if axis is None:
            _accum(x, np.full(xd.shape, float(g)))
        else:
            _accum(x, np.broadcast_to(np.expand_dims(g, axis), xd.shape).copy())

    return _make(out, (x,), backward)


def concat(parts: Sequence, axis: int = -1):
    datas = [_data(p) for p in parts]
    out = np.concatenate(datas, axis=axis)
    if not any(_is_tensor(p) for p in parts):
        return out
    sizes = [d.shape[axis] for d in datas]

    def backward(g):
        offset = 0
        for p, size in zip(parts, sizes):
            piece = np.take(g, range(offset, offset + size), axis=axis)
            offset += size
            if _is_tensor(p):
                _accum(p, piece)

    return _make(out, tuple(parts), backward)


def gather_rows(table, index):
    """Select rows of a 2-D table by integer index; gradients scatter-add."""
    idx = np.asarray(index, dtype=np.intp)
    td = _data(table)
    if td.ndim != 2:
        raise ContractViolation("gather_rows expects a 2-D table")
    out = td[idx]
    if not _is_tensor(table):
        return out

    def backward(g):
        gt = np.zeros_like(td)
        np.add.at(gt, idx, g)
        _accum(table, gt)

    return _make(out, (table,), backward)


def softmax(x, axis: int = -1):
    """Stable softmax; rows sum to one along the reduced axis."""
    xd = _data(x)
    shifted = xd - xd.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)
    if not _is_tensor(x):
        return out

    def backward(g):
        dot = (g * out).sum(axis=axis, keepdims=True)
        _accum(x, out * (g - dot))

    return _make(out, (x,), backward)


def log(x):
    xd = _data(x)
    out = np.log(xd)
    if not _is_tensor(x):
        return out

    def backward(g):
        _accum(x, g / xd)

    return _make(out, (x,), backward)


def cross_entropy(probabilities, labels):
    """Mean negative log-probability of the true class.

    probabilities: (n, C) rows on the simplex; labels: (n,) ints.
    Finite for true-class probabilities >= 1e-12.
    """
    labels = np.asarray(labels, dtype=np.intp)
    pd = _data(probabilities)
    if pd.ndim != 2 or labels.shape != (pd.shape[0],):
        raise ContractViolation("cross_entropy expects (n, C) probabilities and (n,) labels")
    n = pd.shape[0]
    rows = np.arange(n)
    picked = pd[rows, labels]
    out = -np.log(picked).mean()
    if not _is_tensor(probabilities):
        return out

    def backward(g):
        gp = np.zeros_like(pd)
        gp[rows, labels] = -float(g) / (n * picked)
        _accum(probabilities, gp)

    return _make(out, (probabilities,), backward)


def mse(prediction, target):
    """Mean squared error over all elements; target is constant."""
    pd = _data(prediction)
    td = _data(target)
    if pd.shape != td.shape:
        raise ContractViolation(f"mse shape mismatch {pd.shape} vs {td.shape}")
    diff = pd - td
    out = np.mean(diff * diff)
    if not _is_tensor(prediction):
        return out

    def backward(g):
        _accum(prediction, (2.0 * float(g) / pd.size) * diff)

    return _make(out, (prediction,), backward)


def backward(loss: Tensor, params: Sequence[Tensor] = ()) -> None:
    """Replay the tape from a scalar loss, filling .grad on the path.

    Parameters listed in `params` that do not appear on the path get an
    explicit zero gradient.
    """
    if not isinstance(loss, Tensor):
        raise ContractViolation("backward needs a Tensor loss")
    if loss.data.size != 1:
        raise ContractViolation(f"backward needs a scalar loss, got shape {loss.data.shape}")

    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))

    loss.grad = np.ones_like(loss.data)
    for node in reversed(topo):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)

    for p in params:
        if p.requires_grad and p.grad is None:
            p.grad = np.zeros_like(p.data)


def zero_grads(params: Sequence[Tensor]) -> None:
    for p in params:
        p.grad = None
