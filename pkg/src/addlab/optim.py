"""Parameter update rules: momentum SGD with an optional cosine schedule
for the classifier parameters, adaptive moment estimation for the
diffusion heads."""
from __future__ import annotations

import math

import numpy as np

from .numkit import Tensor


def cosine_lr(base: float, epoch: int, total_epochs: int) -> float:
    """Half-cosine decay from base at epoch 0 toward 0 at the final epoch."""
    if total_epochs <= 1:
        return base
    return base * 0.5 * (1.0 + math.cos(math.pi * epoch / (total_epochs - 1)))


def sgd_momentum_step(params: dict, grads: dict, velocity: dict,
                      lr: float, momentum: float, plain: tuple = ()) -> dict:
    """v <- mu v + g;  p <- p - lr v.  Buffers are created on first use.

    Names listed in ``plain`` are updated by the bare gradient with no
    velocity buffer.
    """
    updated = {}
    for name, p in params.items():
        g = grads[name]
        if name in plain:
            updated[name] = Tensor(p.data - lr * g)
            continue
        v = velocity.get(name)
        v = g if v is None else momentum * v + g
        velocity[name] = v
        updated[name] = Tensor(p.data - lr * v)
    return updated


def adam_step(params: dict, grads: dict, m: dict, v: dict, t: int,
              lr: float, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> dict:
    """Bias-corrected adaptive moments; ``t`` is the 1-based step index."""
    updated = {}
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for name, p in params.items():
        g = grads[name]
        m[name] = beta1 * m.get(name, 0.0) + (1.0 - beta1) * g
        v[name] = beta2 * v.get(name, 0.0) + (1.0 - beta2) * (g * g)
        m_hat = m[name] / c1
        v_hat = v[name] / c2
        updated[name] = Tensor(p.data - lr * m_hat / (np.sqrt(v_hat) + eps))
    return updated
