"""Corruption-robustness metrics and the per-layer coverage diagnostic.

Error tables are keyed by (corruption kind, severity).  The corruption
error aggregates follow the usual convention: per-kind severity-summed
errors normalized by a baseline model's, averaged over kinds and
reported x100; the relative variant first subtracts each model's
natural error at every severity.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .addnet import NetworkParams, add_sigma, forward_clean
from .numkit import Tensor


@dataclass
class MetricsReport:
    """Per-cell top-1 error rates plus the clean-data error rate."""

    errors: dict
    e_nat: float | None = None

    def __post_init__(self):
        for key, err in self.errors.items():
            if not 0.0 <= err <= 1.0:
                raise ValueError(f"error rate {err} for {key} outside [0, 1]")

    @property
    def kinds(self) -> tuple:
        return tuple(dict.fromkeys(k for k, _ in self.errors))

    @property
    def severities(self) -> tuple:
        return tuple(sorted({s for _, s in self.errors}))

    def kind_sum(self, kind: str) -> float:
        return sum(err for (k, _), err in self.errors.items() if k == kind)

    def require_complete(self) -> None:
        expected = {(k, s) for k in self.kinds for s in self.severities}
        missing = expected - set(self.errors)
        if missing:
            raise ValueError(f"error table is missing cells: {sorted(missing)}")


def average_accuracy(report: MetricsReport) -> float:
    """1 minus the mean error over the full (kind, severity) grid."""
    report.require_complete()
    return 1.0 - float(np.mean(list(report.errors.values())))


def mce(model: MetricsReport, baseline: MetricsReport) -> float:
    """Mean corruption error of the model against the baseline, x100.

    Kinds where the baseline has zero summed error are excluded with a
    warning (their ratio is undefined).
    """
    model.require_complete()
    baseline.require_complete()
    if model.kinds != baseline.kinds:
        raise ValueError("model and baseline tables cover different kinds")
    ratios = []
    for kind in model.kinds:
        denom = baseline.kind_sum(kind)
        if denom == 0.0:
            warnings.warn(f"baseline error is zero for {kind!r}; excluded from the mean")
            continue
        ratios.append(model.kind_sum(kind) / denom)
    if not ratios:
        raise ValueError("no corruption kind has a usable baseline denominator")
    return 100.0 * float(np.mean(ratios))


def rmce(model: MetricsReport, baseline: MetricsReport) -> float:
    """Relative mean corruption error x100.

    Subtracts each model's natural error once per severity level from
    its severity-summed corruption error before taking ratios.
    """
    model.require_complete()
    baseline.require_complete()
    if model.e_nat is None or baseline.e_nat is None:
        raise ValueError("relative corruption error needs both natural error rates")
    if model.kinds != baseline.kinds:
        raise ValueError("model and baseline tables cover different kinds")
    n_sev = len(model.severities)
    ratios = []
    for kind in model.kinds:
        denom = baseline.kind_sum(kind) - n_sev * baseline.e_nat
        if denom == 0.0:
            warnings.warn(f"baseline relative error is zero for {kind!r}; excluded")
            continue
        ratios.append((model.kind_sum(kind) - n_sev * model.e_nat) / denom)
    if not ratios:
        raise ValueError("no corruption kind has a usable baseline denominator")
    return 100.0 * float(np.mean(ratios))


@dataclass
class LayerCoverage:
    layer: int
    median_ratio: float
    frac_within_2: float


def coverage_ratio(net: NetworkParams, x: np.ndarray, x_prime: np.ndarray) -> list:
    """Distance-to-scale ratios |h'_l - mu_l| / sigma_l per layer.

    ``x`` gives each layer's diffusion distribution: the center mu_l is
    its noise-free representation and sigma_l the scale the diffusion
    head emits there.  ``x_prime`` (a perturbed companion) runs through
    the clean path, giving h'_l.  Ratios at or below 2 mark the
    companion as a plausible draw from the layer's diffusion
    distribution; identical inputs give ratio 0 exactly.  Returns
    per-layer medians and within-2 fractions.
    """
    centers = forward_clean(net, Tensor(np.asarray(x, dtype=np.float64)))
    clean = forward_clean(net, Tensor(np.asarray(x_prime, dtype=np.float64)))
    out = []
    for layer, (h, add, h_prime) in enumerate(zip(centers, net.add_blocks, clean), start=1):
        sigma = add_sigma(add, h)
        ratios = np.abs(h_prime.data - h.data) / sigma.data
        out.append(LayerCoverage(layer=layer,
                                 median_ratio=float(np.median(ratios)),
                                 frac_within_2=float(np.mean(ratios <= 2.0))))
    return out


def report_from_accuracies(cell_accuracy: dict, clean_accuracy: float | None = None) -> MetricsReport:
    """Convenience constructor from per-cell accuracies."""
    errors = {key: 1.0 - acc for key, acc in cell_accuracy.items()}
    e_nat = None if clean_accuracy is None else 1.0 - clean_accuracy
    return MetricsReport(errors=errors, e_nat=e_nat)
