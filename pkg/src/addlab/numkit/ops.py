"""Forward and backward kernels for every registered operation kind.

Each kernel works on plain float64 numpy arrays.  The backward callable
receives the upstream gradient, the saved forward output, and the saved
input values, and returns one gradient array per input, already reduced
to the input's shape.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit


class ShapeError(ValueError):
    """Operand shapes do not conform to the operation's rule."""


class DomainError(ValueError):
    """An input lies outside the operation's documented domain."""


def _as_f64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def _check_broadcast(kind: str, a: np.ndarray, b: np.ndarray) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(
            f"{kind}: shapes {a.shape} and {b.shape} do not broadcast"
        ) from None


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum-reduce a broadcast gradient back to the operand's shape."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return np.asarray(grad, dtype=np.float64)


# -- binary elementwise ------------------------------------------------------

def _add_fwd(a, b):
    _check_broadcast("add", a, b)
    return a + b


def _add_bwd(g, out, a, b):
    return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)


def _sub_fwd(a, b):
    _check_broadcast("sub", a, b)
    return a - b


def _sub_bwd(g, out, a, b):
    return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)


def _mul_fwd(a, b):
    _check_broadcast("mul", a, b)
    return a * b


def _mul_bwd(g, out, a, b):
    return _unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape)


def _div_fwd(a, b):
    _check_broadcast("div", a, b)
    if np.any(b == 0.0):
        raise DomainError("div: denominator contains zero")
    return a / b


def _div_bwd(g, out, a, b):
    return _unbroadcast(g / b, a.shape), _unbroadcast(-g * a / (b * b), b.shape)


# -- matmul ------------------------------------------------------------------

def _matmul_fwd(a, b):
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} do not conform")
    return a @ b


def _matmul_bwd(g, out, a, b):
    return g @ b.T, a.T @ g


# -- unary elementwise -------------------------------------------------------

def _neg_bwd(g, out, x):
    return (-g,)


def _softplus_fwd(x):
    return np.logaddexp(0.0, x)


def _softplus_bwd(g, out, x):
    return (g * expit(x),)


def _relu_fwd(x):
    return np.maximum(x, 0.0)


def _relu_bwd(g, out, x):
    return (g * (x > 0.0),)


def _tanh_bwd(g, out, x):
    return (g * (1.0 - out * out),)


def _exp_bwd(g, out, x):
    return (g * out,)


def _log_fwd(x):
    if np.any(x <= 0.0):
        raise DomainError("log: input must be strictly positive")
    return np.log(x)


def _log_bwd(g, out, x):
    return (g / x,)


def _square_fwd(x):
    return x * x


def _square_bwd(g, out, x):
    return (2.0 * x * g,)


# -- reductions --------------------------------------------------------------

def _norm_axis(kind, x, axis):
    if axis is None:
        return None
    if not -x.ndim <= axis < x.ndim:
        raise ShapeError(f"{kind}: axis {axis} out of range for shape {x.shape}")
    return axis % x.ndim


def _sum_fwd(x, axis=None):
    return np.sum(x, axis=_norm_axis("sum", x, axis))


def _sum_bwd(g, out, x, axis=None):
    if axis is None:
        return (np.full(x.shape, float(g)),)
    g = np.expand_dims(g, _norm_axis("sum", x, axis))
    return (np.broadcast_to(g, x.shape).copy(),)


def _mean_fwd(x, axis=None):
    return np.mean(x, axis=_norm_axis("mean", x, axis))


def _mean_bwd(g, out, x, axis=None):
    if axis is None:
        return (np.full(x.shape, float(g) / x.size),)
    axis = _norm_axis("mean", x, axis)
    g = np.expand_dims(g, axis) / x.shape[axis]
    return (np.broadcast_to(g, x.shape).copy(),)


# -- log-softmax -------------------------------------------------------------

def _log_softmax_fwd(x):
    if x.ndim not in (1, 2):
        raise ShapeError(f"log_softmax: expected rank 1 or 2, got shape {x.shape}")
    m = np.max(x, axis=-1, keepdims=True)
    shifted = x - m
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def _log_softmax_bwd(g, out, x):
    return (g - np.exp(out) * np.sum(g, axis=-1, keepdims=True),)


class Kernel:
    __slots__ = ("forward_raw", "backward")

    def __init__(self, forward, backward):
        self.forward_raw = forward
        self.backward = backward

    def forward(self, *arrays, **params) -> np.ndarray:
        out = self.forward_raw(*arrays, **params)
        return _as_f64(out)


KERNELS = {
    "add": Kernel(_add_fwd, _add_bwd),
    "sub": Kernel(_sub_fwd, _sub_bwd),
    "mul": Kernel(_mul_fwd, _mul_bwd),
    "div": Kernel(_div_fwd, _div_bwd),
    "matmul": Kernel(_matmul_fwd, _matmul_bwd),
    "neg": Kernel(lambda x: -x, _neg_bwd),
    "softplus": Kernel(_softplus_fwd, _softplus_bwd),
    "relu": Kernel(_relu_fwd, _relu_bwd),
    "tanh": Kernel(np.tanh, _tanh_bwd),
    "exp": Kernel(np.exp, _exp_bwd),
    "log": Kernel(_log_fwd, _log_bwd),
    "square": Kernel(_square_fwd, _square_bwd),
    "sum": Kernel(_sum_fwd, _sum_bwd),
    "mean": Kernel(_mean_fwd, _mean_bwd),
    "log_softmax": Kernel(_log_softmax_fwd, _log_softmax_bwd),
}


def registered_kinds() -> tuple:
    """All operation kinds known to the registry, sorted."""
    return tuple(sorted(KERNELS))
