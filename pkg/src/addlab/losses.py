"""The two training objectives: classification cross-entropy over the
diffused path, and the Gaussian coverage penalty that sizes each layer's
diffusion to reach the clean-path representation of companion samples."""
from __future__ import annotations

import numpy as np

from .addnet import ADDBlockParams, ForwardTrace, add_sigma
from .numkit import Tensor, apply


def primary_ce(logit_rows: Tensor, labels) -> Tensor:
    """Mean negative log-softmax of the true class."""
    labels = np.asarray(labels, dtype=np.int64)
    if logit_rows.ndim != 2:
        raise ValueError(f"expected (n, classes) logits, got shape {logit_rows.shape}")
    n, c = logit_rows.shape
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    if labels.min() < 0 or labels.max() >= c:
        raise ValueError(f"label out of range [0, {c}): {labels.min()}..{labels.max()}")
    onehot = np.zeros((n, c))
    onehot[np.arange(n), labels] = 1.0
    picked = apply("mul", apply("log_softmax", logit_rows), Tensor(onehot))
    return apply("div", apply("neg", apply("sum", picked)), float(n))


def _mean_square_deviation(h: Tensor, h_aug: Tensor) -> np.ndarray:
    """(h_aug - h)^2 per element, averaged over the k companions per sample."""
    n = h.shape[0]
    rows = h_aug.shape[0]
    if rows % n != 0:
        raise ValueError(f"augmented rows {rows} are not a multiple of batch {n}")
    k = rows // n
    dev = h_aug.data.reshape(k, n, -1) - h.data[None, :, :]
    return np.mean(dev * dev, axis=0)


def coverage_nll(trace: ForwardTrace, add_blocks) -> Tensor:
    """Gaussian negative log-likelihood of the clean companions under each
    layer's diffusion distribution, averaged over the batch.

    Per element the penalty is (1/2) [log sigma^2 + (h_aug - h)^2 / sigma^2],
    minimized exactly when sigma^2 matches the squared deviation.  The
    layer representations enter as constants; only the scale heads are
    differentiated, so the gradient reaches the diffusion parameters and
    nothing else.
    """
    if trace.h_aug is None:
        raise ValueError("trace has no augmented path; run the clean forward first")
    if len(trace.h_aug) != len(trace.h):
        raise ValueError("augmented path and diffused path disagree on layer count")
    n = trace.h[0].shape[0]
    total = None
    for h, h_aug, add in zip(trace.h, trace.h_aug, add_blocks):
        msd = Tensor(_mean_square_deviation(h, h_aug))
        sigma = add_sigma(add, Tensor(h.data))
        var = apply("square", sigma)
        layer = apply("sum", apply("add", apply("log", var), apply("div", msd, var)))
        total = layer if total is None else apply("add", total, layer)
    return apply("div", total, 2.0 * n)


def coverage_nll_reference(h_layers, h_aug_layers, sigma_layers) -> float:
    """Straight-line numpy evaluation of the coverage penalty (oracle)."""
    n = h_layers[0].shape[0]
    total = 0.0
    for h, h_aug, sigma in zip(h_layers, h_aug_layers, sigma_layers):
        k = h_aug.shape[0] // n
        dev = h_aug.reshape(k, n, -1) - h[None, :, :]
        msd = np.mean(dev * dev, axis=0)
        var = sigma * sigma
        total += float(np.sum(np.log(var) + msd / var))
    return total / (2.0 * n)
