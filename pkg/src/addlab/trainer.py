"""Dual-objective training loop and ensembled inference.

Every batch runs two phases.  The coverage phase forwards the originals
through the diffused path and their augmented companions through the
clean path, then takes one adaptive-moment step on the scale heads so
each layer's diffusion covers the companions.  The primary phase
concatenates originals and companions, forwards everything through the
full diffused network, and takes one momentum-SGD step on all
parameters under the classification loss.

Inference accumulates the final representation over E independent
diffused forwards and classifies the average.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .addnet import (
    ForwardTrace,
    NetworkParams,
    NetworkSpec,
    classifier_parameter_names,
    diffuser_parameter_names,
    forward_clean,
    forward_diffused,
    init_params,
    logits,
    named_parameters,
    set_parameters,
)
from .losses import coverage_nll, primary_ce
from .numkit import RngStream, Tape, Tensor, backward
from .optim import adam_step, cosine_lr, sgd_momentum_step

ADAPTIVE = "adaptive"


@dataclass
class TrainConfig:
    epochs: int
    batch_size: int
    classifier_lr: float = 0.05
    momentum: float = 0.9
    cosine_schedule: bool = True
    diffuser_lr: float = 0.01
    k_augment: int = 1
    seed: int = 0
    diffusion: object = ADAPTIVE  # ADAPTIVE or a fixed scale >= 0
    concat_augmented: bool = True
    grad_clip: float = 10.0  # global-norm cap per update phase; 0 disables

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.classifier_lr < 0 or self.diffuser_lr < 0:
            raise ValueError("learning rates must be >= 0")
        if self.k_augment < 1:
            raise ValueError("k_augment must be >= 1")
        if self.grad_clip < 0:
            raise ValueError("grad_clip must be >= 0")
        if self.diffusion != ADAPTIVE and float(self.diffusion) < 0:
            raise ValueError(f"diffusion must be {ADAPTIVE!r} or a scale >= 0")

    @property
    def adaptive(self) -> bool:
        return self.diffusion == ADAPTIVE

    @property
    def sigma_override(self):
        return None if self.adaptive else float(self.diffusion)


@dataclass
class InferenceConfig:
    ensemble: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.ensemble < 1:
            raise ValueError("ensemble size must be >= 1")


@dataclass
class OptimState:
    """Momentum buffers for the classifier step, adaptive-moment buffers
    for the coverage step, and the step counters."""

    velocity: dict = field(default_factory=dict)
    adam_m: dict = field(default_factory=dict)
    adam_v: dict = field(default_factory=dict)
    adam_steps: int = 0
    step: int = 0


@dataclass
class StepRecord:
    coverage_loss: float
    primary_loss: float
    n_rows: int
    n_correct: int
    sigma_means: np.ndarray


@dataclass
class FitResult:
    net: NetworkParams
    optim: OptimState
    history: list


def _grads_by_name(tape, grad_map, watched: dict) -> dict:
    return {name: grad_map[node].data for name, node in watched.items()}


def _clip_grads(grads: dict, max_norm: float) -> dict:
    """Scale the whole gradient dict down to the given global L2 norm."""
    if max_norm <= 0:
        return grads
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total <= max_norm:
        return grads
    factor = max_norm / total
    return {n: g * factor for n, g in grads.items()}


def coverage_update(net: NetworkParams, trace: ForwardTrace, opt: OptimState,
                    lr: float, grad_clip: float = 0.0) -> float:
    """One adaptive-moment step of the coverage objective on the scale heads."""
    params = named_parameters(net)
    phi = {n: params[n] for n in diffuser_parameter_names(net)}
    with Tape() as tape:
        watched = {n: tape.watch(p) for n, p in phi.items()}
        loss = coverage_nll(trace, net.add_blocks)
    grads = _clip_grads(_grads_by_name(tape, backward(tape, loss), watched), grad_clip)
    opt.adam_steps += 1
    set_parameters(net, adam_step(phi, grads, opt.adam_m, opt.adam_v,
                                  opt.adam_steps, lr))
    return loss.item()


def train_step(net: NetworkParams, opt: OptimState, x: np.ndarray, y: np.ndarray,
               augmentor, rng: RngStream, config: TrainConfig,
               lr: float) -> StepRecord:
    """One batch: coverage step on the scale heads (adaptive mode), then a
    primary classification step on everything the loss reaches."""
    if len(x) == 0:
        raise ValueError("empty batch")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)

    x_aug = None
    if augmentor is not None:
        x_aug = np.concatenate(
            [augmentor(x, rng.derive(f"augment{j}")) for j in range(config.k_augment)],
            axis=0)

    cov_loss = float("nan")
    if config.adaptive and x_aug is not None:
        trace = forward_diffused(net, Tensor(x), rng.derive("noise-coverage"))
        trace.h_aug = forward_clean(net, Tensor(x_aug))
        cov_loss = coverage_update(net, trace, opt, config.diffuser_lr,
                                   config.grad_clip)

    if x_aug is not None and config.concat_augmented:
        x_full = np.concatenate([x, x_aug], axis=0)
        y_full = np.concatenate([y, np.tile(y, config.k_augment)])
    else:
        x_full, y_full = x, y

    params = named_parameters(net)
    if config.adaptive:
        trained = dict(params)
    else:
        trained = {n: params[n] for n in classifier_parameter_names(net)}
    with Tape() as tape:
        watched = {n: tape.watch(p) for n, p in trained.items()}
        trace = forward_diffused(net, Tensor(x_full), rng.derive("noise-primary"),
                                 sigma_override=config.sigma_override)
        logit_rows = logits(net.head, trace.h_last)
        loss = primary_ce(logit_rows, y_full)
    grads = _clip_grads(_grads_by_name(tape, backward(tape, loss), watched),
                        config.grad_clip)
    # momentum buffers cover the classifier parameters only; the scale
    # heads take the bare classification gradient
    plain = tuple(n for n in trained if n.startswith("add"))
    set_parameters(net, sgd_momentum_step(trained, grads, opt.velocity,
                                          lr, config.momentum, plain=plain))
    opt.step += 1

    predictions = np.argmax(logit_rows.data, axis=1)
    sigma_means = np.array([s.data.mean() for s in trace.sigma])
    return StepRecord(coverage_loss=cov_loss, primary_loss=loss.item(),
                      n_rows=len(y_full), n_correct=int((predictions == y_full).sum()),
                      sigma_means=sigma_means)


def fit(config: TrainConfig, dataset, spec: NetworkSpec, augmentor=None,
        eval_dataset=None, eval_inference: InferenceConfig | None = None,
        snapshot_hook=None) -> FitResult:
    """Epochs of shuffled mini-batch training from a single root seed.

    ``dataset`` is a (features, labels) pair of arrays.  Per-epoch
    history rows carry both losses, train accuracy, held-out accuracy
    when an eval set is given, and the per-layer mean diffusion scale.
    ``snapshot_hook(epoch, net, opt)`` runs after every epoch.
    """
    x_all, y_all = _as_arrays(dataset)
    root = RngStream(config.seed)
    net = init_params(spec, root.derive("init"))
    opt = OptimState()
    history = []
    n = len(x_all)
    for epoch in range(config.epochs):
        lr = (cosine_lr(config.classifier_lr, epoch, config.epochs)
              if config.cosine_schedule else config.classifier_lr)
        order = root.derive(f"shuffle/epoch{epoch}").permutation(n)
        records = []
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            step_rng = root.derive(f"step{opt.step}")
            records.append(train_step(net, opt, x_all[idx], y_all[idx],
                                      augmentor, step_rng, config, lr))
        row = {
            "epoch": epoch,
            "cov_loss": float(np.mean([r.coverage_loss for r in records])),
            "ce_loss": float(np.mean([r.primary_loss for r in records])),
            "train_acc": float(sum(r.n_correct for r in records)
                               / sum(r.n_rows for r in records)),
            "eval_acc": float("nan"),
            "sigma_means": np.mean([r.sigma_means for r in records], axis=0),
        }
        if eval_dataset is not None:
            inf = eval_inference or InferenceConfig(ensemble=1)
            report = evaluate(net, eval_dataset, inf,
                              root.derive(f"eval/epoch{epoch}"),
                              sigma_override=config.sigma_override)
            row["eval_acc"] = report.accuracy
        history.append(row)
        if snapshot_hook is not None:
            snapshot_hook(epoch, net, opt)
    return FitResult(net=net, optim=opt, history=history)


def predict_ensemble(net: NetworkParams, x, inf: InferenceConfig, rng: RngStream,
                     sigma_override: float | None = None):
    """Labels from the average final representation over E diffused forwards.

    Ties at the argmax resolve to the lowest class index.  Returns
    ``(labels, mean_representation)``.
    """
    x = Tensor(np.asarray(x, dtype=np.float64))
    total = None
    for _ in range(inf.ensemble):
        trace = forward_diffused(net, x, rng, sigma_override=sigma_override)
        h = trace.h_last.data
        total = h.copy() if total is None else total + h
    mean_repr = total / inf.ensemble
    logit_rows = logits(net.head, Tensor(mean_repr))
    return np.argmax(logit_rows.data, axis=1), mean_repr


@dataclass
class EvalReport:
    accuracy: float
    per_class_total: np.ndarray
    per_class_correct: np.ndarray


def evaluate(net: NetworkParams, dataset, inf: InferenceConfig, rng: RngStream,
             sigma_override: float | None = None) -> EvalReport:
    """Ensembled accuracy plus per-class totals and correct counts."""
    x, y = _as_arrays(dataset)
    labels, _ = predict_ensemble(net, x, inf, rng, sigma_override=sigma_override)
    n_classes = net.spec.n_classes
    total = np.bincount(y, minlength=n_classes)
    correct = np.bincount(y[labels == y], minlength=n_classes)
    return EvalReport(accuracy=float((labels == y).mean()) if len(y) else 0.0,
                      per_class_total=total, per_class_correct=correct)


def fit_sigma_heads(net: NetworkParams, h_layers, h_aug_layers, steps: int,
                    lr: float = 0.01) -> list:
    """Train only the scale heads against frozen per-layer features.

    ``h_layers`` and ``h_aug_layers`` are per-layer arrays of diffused-path
    and clean-path representations.  Returns the per-step loss values.
    """
    trace = ForwardTrace(h=[Tensor(h) for h in h_layers], sigma=[], h_tilde=[],
                         noise=[], h_aug=[Tensor(a) for a in h_aug_layers])
    opt = OptimState()
    losses = []
    for _ in range(steps):
        losses.append(coverage_update(net, trace, opt, lr))
    return losses


def coverage_gap(net: NetworkParams, h_layers, h_aug_layers) -> float:
    """mean |sigma^2 - squared deviation| / mean squared deviation over
    all layers and elements; 0 at the coverage optimum."""
    from .addnet import add_sigma

    gaps = []
    scales = []
    for h, h_aug, add in zip(h_layers, h_aug_layers, net.add_blocks):
        k = h_aug.shape[0] // h.shape[0]
        dev = h_aug.reshape(k, h.shape[0], -1) - h[None, :, :]
        msd = np.mean(dev * dev, axis=0)
        var = add_sigma(add, Tensor(h)).data ** 2
        gaps.append(np.abs(var - msd))
        scales.append(msd)
    return float(np.mean(np.concatenate([g.ravel() for g in gaps]))
                 / np.mean(np.concatenate([s.ravel() for s in scales])))


def _as_arrays(dataset):
    if isinstance(dataset, tuple):
        x, y = dataset
        return np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.int64)
    from .datagen import stack_dataset

    return stack_dataset(dataset)
