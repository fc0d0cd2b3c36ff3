"""Reverse-mode automatic differentiation over float64 numpy arrays.

Small tape-free design: each op returns a Tensor holding its value, its
parents and a closure that routes the output gradient to them.  backward()
walks the graph in reverse topological order.  Everything runs in float64;
gradients are exact analytic expressions, validated against central finite
differences by the gradient-check harness.
"""

import numpy as np

from .errors import NumericalError


class Tensor:
    __slots__ = ("value", "grad", "parents", "_backward", "name")

    def __init__(self, value, parents=(), backward=None, name=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.parents = parents
        self._backward = backward
        self.grad = None
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"Tensor{label}(shape={self.value.shape})"

    # ------------------------------------------------------------- operators
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(_wrap(other), self)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return getitem(self, key)

    # ------------------------------------------------------------- autodiff
    def item(self) -> float:
        return float(self.value)

    def backward(self):
        if self.value.shape != ():
            raise NumericalError("backward() expects a scalar loss")
        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node.parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        self.grad = np.ones((), dtype=np.float64)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float64))


def _accumulate(t: Tensor, grad: np.ndarray) -> None:
    if t.grad is None:
        t.grad = np.zeros_like(t.value)
    t.grad += grad


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ------------------------------------------------------------------ arithmetic

def add(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out_value = a.value + b.value

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.value.shape))
        _accumulate(b, _unbroadcast(g, b.value.shape))

    return Tensor(out_value, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out_value = a.value - b.value

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.value.shape))
        _accumulate(b, _unbroadcast(-g, b.value.shape))

    return Tensor(out_value, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out_value = a.value * b.value

    def backward(g):
        _accumulate(a, _unbroadcast(g * b.value, a.value.shape))
        _accumulate(b, _unbroadcast(g * a.value, b.value.shape))

    return Tensor(out_value, (a, b), backward)


def div(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out_value = a.value / b.value

    def backward(g):
        _accumulate(a, _unbroadcast(g / b.value, a.value.shape))
        _accumulate(b, _unbroadcast(-g * a.value / (b.value * b.value), b.value.shape))

    return Tensor(out_value, (a, b), backward)


def power(a, exponent: float) -> Tensor:
    a = _wrap(a)
    out_value = a.value ** exponent

    def backward(g):
        _accumulate(a, g * exponent * a.value ** (exponent - 1.0))

    return Tensor(out_value, (a,), backward)


def matmul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out_value = np.matmul(a.value, b.value)

    def backward(g):
        _accumulate(a, _unbroadcast(np.matmul(g, np.swapaxes(b.value, -1, -2)), a.value.shape))
        _accumulate(b, _unbroadcast(np.matmul(np.swapaxes(a.value, -1, -2), g), b.value.shape))

    return Tensor(out_value, (a, b), backward)


def exp(a) -> Tensor:
    a = _wrap(a)
    out_value = np.exp(a.value)

    def backward(g):
        _accumulate(a, g * out_value)

    return Tensor(out_value, (a,), backward)


def log(a) -> Tensor:
    a = _wrap(a)
    out_value = np.log(a.value)

    def backward(g):
        _accumulate(a, g / a.value)

    return Tensor(out_value, (a,), backward)


def sqrt(a) -> Tensor:
    a = _wrap(a)
    out_value = np.sqrt(a.value)

    def backward(g):
        _accumulate(a, g * 0.5 / out_value)

    return Tensor(out_value, (a,), backward)


def tanh(a) -> Tensor:
    a = _wrap(a)
    out_value = np.tanh(a.value)

    def backward(g):
        _accumulate(a, g * (1.0 - out_value * out_value))

    return Tensor(out_value, (a,), backward)


_GELU_C = np.sqrt(2.0 / np.pi)


def gelu(a) -> Tensor:
    """Smooth GELU (tanh form)."""
    a = _wrap(a)
    x = a.value
    inner = _GELU_C * (x + 0.044715 * x ** 3)
    t = np.tanh(inner)
    out_value = 0.5 * x * (1.0 + t)

    def backward(g):
        sech2 = 1.0 - t * t
        d_inner = _GELU_C * (1.0 + 3 * 0.044715 * x ** 2)
        _accumulate(a, g * (0.5 * (1.0 + t) + 0.5 * x * sech2 * d_inner))

    return Tensor(out_value, (a,), backward)


# --------------------------------------------------------------- reductions

def sum_(a, axis=None, keepdims=False) -> Tensor:
    a = _wrap(a)
    out_value = a.value.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is None:
            _accumulate(a, np.broadcast_to(g, a.value.shape).copy())
            return
        if not keepdims:
            g = np.expand_dims(g, axis)
        _accumulate(a, np.broadcast_to(g, a.value.shape).copy())

    return Tensor(out_value, (a,), backward)


def mean(a, axis=None, keepdims=False) -> Tensor:
    a = _wrap(a)
    if axis is None:
        count = a.value.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = int(np.prod([a.value.shape[i] for i in axes]))
    return mul(sum_(a, axis=axis, keepdims=keepdims), 1.0 / count)


def logsumexp(a, axis: int, keepdims=False) -> Tensor:
    a = _wrap(a)
    m = a.value.max(axis=axis, keepdims=True)
    shifted = np.exp(a.value - m)
    total = shifted.sum(axis=axis, keepdims=True)
    lse = m + np.log(total)
    out_value = lse if keepdims else np.squeeze(lse, axis=axis)
    softmax = shifted / total

    def backward(g):
        if not keepdims:
            g = np.expand_dims(g, axis)
        _accumulate(a, g * softmax)

    return Tensor(out_value, (a,), backward)


def softmax(a, axis: int) -> Tensor:
    return exp(sub(a, logsumexp(a, axis=axis, keepdims=True)))


# ------------------------------------------------------------ shape & indexing

def reshape(a, shape) -> Tensor:
    a = _wrap(a)
    out_value = a.value.reshape(shape)

    def backward(g):
        _accumulate(a, g.reshape(a.value.shape))

    return Tensor(out_value, (a,), backward)


def transpose(a, axes) -> Tensor:
    a = _wrap(a)
    out_value = a.value.transpose(axes)
    inverse = np.argsort(axes)

    def backward(g):
        _accumulate(a, g.transpose(inverse))

    return Tensor(out_value, (a,), backward)


def _is_basic(key) -> bool:
    parts = key if isinstance(key, tuple) else (key,)
    return all(isinstance(p, (int, np.integer, slice)) or p is Ellipsis for p in parts)


def getitem(a, key) -> Tensor:
    a = _wrap(a)
    out_value = a.value[key]

    def backward(g):
        grad = np.zeros_like(a.value)
        if _is_basic(key):
            grad[key] += g
        else:
            np.add.at(grad, key, g)
        _accumulate(a, grad)

    return Tensor(out_value, (a,), backward)


def embedding(table: Tensor, ids: np.ndarray) -> Tensor:
    """Row lookup with scatter-add gradient; ids must be in range."""
    ids = np.asarray(ids)
    rows = table.value.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= rows):
        bad = int(np.argmax((ids < 0) | (ids >= rows)))
        raise IndexError(
            f"embedding id {ids.reshape(-1)[bad]} out of range [0, {rows}) "
            f"at flat position {bad} of table {table.name or '<unnamed>'}")
    out_value = table.value[ids]

    def backward(g):
        grad = np.zeros_like(table.value)
        np.add.at(grad, ids, g)
        _accumulate(table, grad)

    return Tensor(out_value, (table,), backward)


def constant(value, name=None) -> Tensor:
    return Tensor(np.asarray(value, dtype=np.float64), name=name)


def check_finite(t: Tensor, what: str = "tensor") -> Tensor:
    if not np.all(np.isfinite(t.value)):
        raise NumericalError(f"non-finite values in {what}")
    return t


def zero_grads(params) -> None:
    tensors = params.values() if isinstance(params, dict) else params
    for t in tensors:
        t.grad = None
