"""Differentiable operations on Tensors.

Only the broadcasting the model needs is supported: an operand may be broadcast
against the other along leading axes or size-1 axes (bias rows, per-feature
scales, class-weight vectors).
"""

from typing import Optional, Sequence, Tuple, Union
import math

import numpy as np

from autodiff.tensor import Tensor, make_result
from errors import ShapeMismatchError

Operand = Union[Tensor, np.ndarray, float, int]


def as_tensor(x: Operand) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _unbroadcast(g: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeMismatchError(op, a.shape, b.shape)


# Elementwise arithmetic

def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return make_result(a.values + b.values, (a, b), backward, "add")


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return make_result(a.values - b.values, (a, b), backward, "sub")


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)

    def backward(g):
        return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)

    return make_result(a.values * b.values, (a, b), backward, "mul")


def scale(a: Tensor, factor: float) -> Tensor:
    def backward(g):
        return (g * factor,)

    return make_result(a.values * factor, (a,), backward, f"scale[{factor:g}]")


def log(a: Tensor) -> Tensor:
    def backward(g):
        return (g / a.values,)

    return make_result(np.log(a.values), (a,), backward, "log")


def relu(a: Tensor) -> Tensor:
    # derivative at 0 is 0
    mask = a.values > 0

    def backward(g):
        return (g * mask,)

    return make_result(np.where(mask, a.values, 0.0), (a,), backward, "relu")


# Linear algebra and shape

def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product over the last two axes; leading (batch) axes must match."""
    if a.ndim < 2 or b.ndim < 2 or a.ndim != b.ndim or a.shape[:-2] != b.shape[:-2] \
            or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatchError("matmul", a.shape, b.shape)

    def backward(g):
        return g @ np.swapaxes(b.values, -1, -2), np.swapaxes(a.values, -1, -2) @ g

    return make_result(a.values @ b.values, (a, b), backward, "matmul")


def transpose(a: Tensor, axes: Optional[Sequence[int]] = None) -> Tensor:
    """Permute axes; the default swaps the last two."""
    if axes is None:
        axes = list(range(a.ndim))
        if a.ndim >= 2:
            axes[-1], axes[-2] = axes[-2], axes[-1]
    axes = tuple(axes)
    if sorted(axes) != list(range(a.ndim)):
        raise ShapeMismatchError(f"transpose{axes}", a.shape)
    inverse = tuple(np.argsort(axes))

    def backward(g):
        return (np.transpose(g, inverse),)

    return make_result(np.transpose(a.values, axes), (a,), backward, "transpose")


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        values = a.values.reshape(tuple(shape))
    except ValueError:
        raise ShapeMismatchError(f"reshape{tuple(shape)}", a.shape)

    def backward(g):
        return (g.reshape(a.shape),)

    return make_result(values, (a,), backward, "reshape")


def getitem(a: Tensor, key) -> Tensor:
    def backward(g):
        full = np.zeros_like(a.values)
        np.add.at(full, key, g)
        return (full,)

    return make_result(np.array(a.values[key]), (a,), backward, "getitem")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeMismatchError("stack", ())
    first = tensors[0].shape
    for t in tensors[1:]:
        if t.shape != first:
            raise ShapeMismatchError("stack", first, t.shape)

    def backward(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(tensors)))

    return make_result(np.stack([t.values for t in tensors], axis=axis), tensors, backward, "stack")


# Reductions

def _check_axis(op: str, a: Tensor, axis: Optional[int]) -> None:
    if axis is not None and not -a.ndim <= axis < a.ndim:
        raise ShapeMismatchError(f"{op}(axis={axis})", a.shape)


def sum(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    _check_axis("sum", a, axis)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return make_result(np.asarray(a.values.sum(axis=axis, keepdims=keepdims)), (a,), backward, "sum")


def mean(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    _check_axis("mean", a, axis)
    count = a.size if axis is None else a.shape[axis]

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g / count, a.shape).copy(),)

    return make_result(np.asarray(a.values.mean(axis=axis, keepdims=keepdims)), (a,), backward, "mean")


def sum_squares(a: Tensor) -> Tensor:
    """Scalar sum of squared entries (the L2 penalty of one parameter)."""
    def backward(g):
        return (2.0 * g * a.values,)

    return make_result(np.asarray(np.sum(a.values * a.values)), (a,), backward, "sum_squares")


# Normalized exponentials

def softmax(a: Tensor, axis: int = -1) -> Tensor:
    _check_axis("softmax", a, axis)
    shifted = a.values - a.values.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (s * (g - (g * s).sum(axis=axis, keepdims=True)),)

    return make_result(s, (a,), backward, "softmax")


def log_softmax(a: Tensor, axis: int = -1) -> Tensor:
    _check_axis("log_softmax", a, axis)
    shifted = a.values - a.values.max(axis=axis, keepdims=True)
    logsum = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out = shifted - logsum
    s = np.exp(out)

    def backward(g):
        return (g - s * g.sum(axis=axis, keepdims=True),)

    return make_result(out, (a,), backward, "log_softmax")


# Normalization layers

def _normalize_backward(dxhat: np.ndarray, xhat: np.ndarray, inv_std: np.ndarray, axis: int) -> np.ndarray:
    n = xhat.shape[axis]
    return (inv_std / n) * (
        n * dxhat
        - dxhat.sum(axis=axis, keepdims=True)
        - xhat * (dxhat * xhat).sum(axis=axis, keepdims=True)
    )


def layernorm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize each row over the last axis, then apply the affine terms."""
    if gamma.shape != (x.shape[-1],) or beta.shape != (x.shape[-1],):
        raise ShapeMismatchError("layernorm", x.shape, gamma.shape)
    mu = x.values.mean(axis=-1, keepdims=True)
    var = x.values.var(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x.values - mu) * inv_std

    def backward(g):
        dxhat = g * gamma.values
        dx = _normalize_backward(dxhat, xhat, inv_std, axis=-1)
        dgamma = (g * xhat).reshape(-1, x.shape[-1]).sum(axis=0)
        dbeta = g.reshape(-1, x.shape[-1]).sum(axis=0)
        return dx, dgamma, dbeta

    return make_result(xhat * gamma.values + beta.values, (x, gamma, beta), backward, "layernorm")


def update_running_stats(
    x: np.ndarray,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    momentum: float,
) -> None:
    """Exponential moving update of batch-norm statistics, in place.

    Variance uses the unbiased estimate and is only updated for batches of two or
    more rows.
    """
    n = x.shape[0]
    running_mean *= 1.0 - momentum
    running_mean += momentum * x.mean(axis=0)
    if n > 1:
        running_var *= 1.0 - momentum
        running_var += momentum * x.var(axis=0, ddof=1)


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    momentum: float = 0.1,
    eps: float = 1e-5,
) -> Tensor:
    """Batch normalization over axis 0 of a (batch x features) matrix.

    In training mode the batch statistics normalize the input (and receive
    gradient) and the running statistics are updated in place. In eval mode the
    running statistics are used, which makes the op affine in ``x``.
    """
    if x.ndim != 2 or gamma.shape != (x.shape[1],) or beta.shape != (x.shape[1],):
        raise ShapeMismatchError("batchnorm", x.shape, gamma.shape)
    if running_mean.shape != (x.shape[1],) or running_var.shape != (x.shape[1],):
        raise ShapeMismatchError("batchnorm running stats", x.shape, running_mean.shape)

    if training:
        mu = x.values.mean(axis=0, keepdims=True)
        var = x.values.var(axis=0, keepdims=True)
        inv_std = 1.0 / np.sqrt(var + eps)
        xhat = (x.values - mu) * inv_std
        update_running_stats(x.values, running_mean, running_var, momentum)
    else:
        inv_std = 1.0 / np.sqrt(running_var + eps)
        xhat = (x.values - running_mean) * inv_std

    def backward(g):
        dxhat = g * gamma.values
        if training:
            dx = _normalize_backward(dxhat, xhat, inv_std, axis=0)
        else:
            dx = dxhat * inv_std
        return dx, (g * xhat).sum(axis=0), g.sum(axis=0)

    out = xhat * gamma.values + beta.values
    return make_result(out, (x, gamma, beta), backward, "batchnorm" if training else "batchnorm[eval]")


# Attention

def scaled_dot_product_attention(q: Tensor, k: Tensor, v: Tensor) -> Tensor:
    """softmax(Q K^T / sqrt(d_k)) V over the last two axes (leading axes are batch)."""
    if q.shape[-1] != k.shape[-1] or k.shape[-2] != v.shape[-2] or q.shape[:-2] != k.shape[:-2]:
        raise ShapeMismatchError("attention", q.shape, k.shape)
    d_k = q.shape[-1]
    scores = scale(matmul(q, transpose(k)), 1.0 / math.sqrt(d_k))
    weights = softmax(scores, axis=-1)
    return matmul(weights, v)
