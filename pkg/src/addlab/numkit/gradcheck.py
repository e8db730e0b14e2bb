"""Central-difference verification of tape gradients."""
from __future__ import annotations

import math

import numpy as np

from .tensor import Tape, Tensor, backward


class GradientCheckError(ArithmeticError):
    """A non-finite derivative was encountered; names the flat coordinate."""


def grad_check(fn, point, step: float = 1e-5) -> float:
    """Max relative error between tape and central-difference gradients.

    ``fn`` maps one Tensor to a scalar Tensor using registered
    operations; it is re-evaluated at coordinate-shifted copies of
    ``point``.  The reported error per coordinate is
    ``|analytic - central| / max(1, |central|)``.
    """
    if not 0.0 < step <= 1e-3:
        raise ValueError(f"step must lie in (0, 1e-3], got {step}")
    x0 = point if isinstance(point, Tensor) else Tensor(point)
    with Tape() as tape:
        x = Tensor(x0.data)
        tape.watch(x)
        out = fn(x)
    if out.data.size != 1:
        raise ValueError("grad_check target must return a scalar")
    analytic = backward(tape, out)[x._node].data.ravel()

    flat = x0.data.ravel()
    worst = 0.0
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] = flat[i] + step
        f_plus = fn(Tensor(bumped.reshape(x0.shape))).item()
        bumped[i] = flat[i] - step
        f_minus = fn(Tensor(bumped.reshape(x0.shape))).item()
        central = (f_plus - f_minus) / (2.0 * step)
        if not (math.isfinite(analytic[i]) and math.isfinite(central)):
            raise GradientCheckError(
                f"non-finite derivative at flat index {i}: "
                f"analytic={analytic[i]}, central={central}"
            )
        err = abs(analytic[i] - central) / max(1.0, abs(central))
        if err > worst:
            worst = err
    return worst
