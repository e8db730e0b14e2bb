"""Synthetic 2D datasets, label-preserving augmentations, and the
severity-graded corruption suite used by the robustness benchmark."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkit import RngStream

DATASET_KINDS = ("two_moons", "rings", "gaussian_blobs")

AUGMENT_KINDS = ("rotate", "additive_gaussian", "brightness_shift", "scale", "translate")

# severity 1..5 parameter ladders, strictly increasing in magnitude
SEVERITY_LADDERS = {
    "additive_gaussian": (0.05, 0.1, 0.2, 0.3, 0.5),
    "rotate": (0.1, 0.2, 0.35, 0.55, 0.8),
    "brightness_shift": (0.1, 0.2, 0.35, 0.55, 0.8),
    "scale": (1.1, 1.25, 1.45, 1.7, 2.0),
    "translate": (0.1, 0.25, 0.45, 0.7, 1.0),
}

_TRANSLATE_DIRECTION = np.array([1.0, 1.0]) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Sample:
    features: np.ndarray
    label: int


def dataset_from_arrays(x: np.ndarray, y: np.ndarray) -> list:
    return [Sample(features=np.asarray(f, dtype=np.float64), label=int(l))
            for f, l in zip(x, y)]


def stack_dataset(samples) -> tuple:
    x = np.stack([s.features for s in samples])
    y = np.array([s.label for s in samples], dtype=np.int64)
    return x, y


def _class_sizes(n: int, c: int) -> list:
    base, extra = divmod(n, c)
    return [base + (1 if i < extra else 0) for i in range(c)]


def make_dataset(kind: str, n: int, noise: float, seed: int, n_classes: int = None) -> list:
    """Balanced, seeded synthetic dataset of one of the standard shapes.

    ``noise`` is the standard deviation of the additive Gaussian jitter
    (the blob spread for ``gaussian_blobs``).
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    if noise < 0:
        raise ValueError("noise must be >= 0")
    if kind not in DATASET_KINDS:
        raise ValueError(f"unknown dataset kind {kind!r}")
    if kind != "gaussian_blobs" and n_classes not in (None, 2):
        raise ValueError(f"{kind} is a two-class shape")
    rng = RngStream(seed).derive(f"dataset/{kind}")
    if kind == "two_moons":
        n0, n1 = _class_sizes(n, 2)
        t0 = np.linspace(0.0, math.pi, n0)
        t1 = np.linspace(0.0, math.pi, n1)
        pts = np.concatenate([
            np.column_stack([np.cos(t0), np.sin(t0)]),
            np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)]),
        ])
        labels = np.concatenate([np.zeros(n0, np.int64), np.ones(n1, np.int64)])
    elif kind == "rings":
        sizes = _class_sizes(n, 2)
        radii = (1.0, 0.5)
        parts, labels = [], []
        for cls, (size, r) in enumerate(zip(sizes, radii)):
            t = np.linspace(0.0, 2.0 * math.pi, size, endpoint=False)
            parts.append(np.column_stack([r * np.cos(t), r * np.sin(t)]))
            labels.append(np.full(size, cls, np.int64))
        pts = np.concatenate(parts)
        labels = np.concatenate(labels)
    elif kind == "gaussian_blobs":
        c = n_classes or 3
        angles = 2.0 * math.pi * np.arange(c) / c + math.pi / 2.0
        centers = 2.5 * np.column_stack([np.cos(angles), np.sin(angles)])
        sizes = _class_sizes(n, c)
        parts, labels = [], []
        for cls, size in enumerate(sizes):
            parts.append(np.tile(centers[cls], (size, 1)))
            labels.append(np.full(size, cls, np.int64))
        pts = np.concatenate(parts)
        labels = np.concatenate(labels)
    else:
        raise AssertionError(kind)
    if noise > 0:
        pts = pts + noise * rng.standard_normal(pts.shape)
    return dataset_from_arrays(pts, labels)


@dataclass(frozen=True)
class AugmentOp:
    """One label-preserving feature transform.

    Kinds and parameters: rotate(angle about the origin, in [-pi, pi]),
    additive_gaussian(scale > 0), brightness_shift(offset added to every
    coordinate), scale(factor > 0), translate(distance along the fixed
    unit diagonal).
    """

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in AUGMENT_KINDS:
            raise ValueError(f"unknown augmentation kind {self.kind!r}")
        if self.kind == "rotate" and not -math.pi <= self.value <= math.pi:
            raise ValueError(f"rotation angle {self.value} outside [-pi, pi]")
        if self.kind == "additive_gaussian" and self.value <= 0:
            raise ValueError("gaussian scale must be > 0")
        if self.kind == "scale" and self.value <= 0:
            raise ValueError("scale factor must be > 0")


def apply_augment_batch(op: AugmentOp, x: np.ndarray, rng: RngStream) -> np.ndarray:
    """Transform a feature matrix; only additive_gaussian consumes randomness."""
    x = np.asarray(x, dtype=np.float64)
    if op.kind == "rotate":
        c, s = math.cos(op.value), math.sin(op.value)
        rot = np.array([[c, s], [-s, c]])  # row-vector convention
        return x @ rot
    if op.kind == "additive_gaussian":
        return x + op.value * rng.standard_normal(x.shape)
    if op.kind == "brightness_shift":
        return x + op.value
    if op.kind == "scale":
        return x * op.value
    if op.kind == "translate":
        return x + op.value * _TRANSLATE_DIRECTION
    raise AssertionError(op.kind)


def apply_augment(op: AugmentOp, sample: Sample, rng: RngStream) -> Sample:
    """Augment one sample; the label is preserved."""
    features = apply_augment_batch(op, sample.features[None, :], rng)[0]
    return Sample(features=features, label=sample.label)


def make_augmentor(op: AugmentOp):
    """Batch-transform closure suitable for the training loop."""
    return lambda x, rng: apply_augment_batch(op, x, rng)


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str
    severity: int

    def __post_init__(self):
        if self.kind not in SEVERITY_LADDERS:
            raise ValueError(f"unknown corruption kind {self.kind!r}")
        if self.severity not in (1, 2, 3, 4, 5):
            raise ValueError(f"severity must be 1..5, got {self.severity}")

    @property
    def parameter(self) -> float:
        return SEVERITY_LADDERS[self.kind][self.severity - 1]

    def as_augment(self) -> AugmentOp:
        return AugmentOp(kind=self.kind, value=self.parameter)


def corruption_suite(specs, dataset, seed: int) -> dict:
    """Map (kind, severity) -> corrupted copy of the dataset, deterministically."""
    x, y = stack_dataset(dataset)
    out = {}
    for spec in specs:
        rng = RngStream(seed).derive(f"corrupt/{spec.kind}/{spec.severity}")
        corrupted = apply_augment_batch(spec.as_augment(), x, rng)
        out[(spec.kind, spec.severity)] = dataset_from_arrays(corrupted, y)
    return out


def full_corruption_grid(kinds) -> list:
    return [CorruptionSpec(kind=k, severity=s) for k in kinds for s in (1, 2, 3, 4, 5)]


def split(dataset, train_fraction: float, seed: int) -> tuple:
    """Label-stratified disjoint split, deterministic under the seed."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = RngStream(seed).derive("split")
    labels = np.array([s.label for s in dataset])
    train_idx, test_idx = [], []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        order = rng.derive(f"class{cls}").permutation(len(idx))
        cut = round(train_fraction * len(idx))
        if cut == 0 or cut == len(idx):
            raise ValueError(f"split leaves class {cls} empty on one side")
        train_idx.extend(idx[order[:cut]])
        test_idx.extend(idx[order[cut:]])
    train_idx.sort()
    test_idx.sort()
    return [dataset[i] for i in train_idx], [dataset[i] for i in test_idx]


def save_dataset_csv(dataset, path) -> None:
    x, y = stack_dataset(dataset)
    d = x.shape[1]
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join([f"x{i + 1}" for i in range(d)] + ["label"]) + "\n")
        for row, label in zip(x, y):
            fh.write(",".join(repr(v) for v in row.tolist()) + f",{label}\n")


def load_dataset_csv(path) -> list:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        d = len(header) - 1
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    return dataset_from_arrays(rows[:, :d], rows[:, d].astype(np.int64))


def save_corruption_manifest(specs, path) -> None:
    """Text table of the corruption menu: kind, severity, parameter."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("kind severity parameter\n")
        for spec in specs:
            fh.write(f"{spec.kind} {spec.severity} {spec.parameter!r}\n")
