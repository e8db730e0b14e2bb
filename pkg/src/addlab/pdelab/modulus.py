"""Empirical modulus-of-continuity probe for grid fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numkit import RngStream
from .grid import GridField


@dataclass(frozen=True)
class ModulusStats:
    """Sup and mean of |u(x + r e) - u(x)| over probe positions and directions."""

    sup: float
    mean: float
    radius: float
    n_pairs: int


def modulus_probe(field: GridField, radius: float, n_probe_pairs: int,
                  rng: RngStream, n_directions: int = 16) -> ModulusStats:
    """Probe |u(x + r e) - u(x)| at random interior x along a fan of directions.

    Positions are sampled uniformly from the extent shrunk by ``radius``
    so every probe stays inside; each position is compared along
    ``n_directions`` evenly spaced unit directions (including the axes).
    Off-grid values come from bilinear interpolation.
    """
    (x0, x1), (y0, y1) = field.extent
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    if radius >= min(x1 - x0, y1 - y0) / 2.0:
        raise ValueError(f"radius {radius} is not small relative to the extent {field.extent}")
    if n_probe_pairs < 1:
        raise ValueError("need at least one probe position")

    u = rng.uniform((n_probe_pairs, 2))
    base = np.empty_like(u)
    base[:, 0] = (x0 + radius) + u[:, 0] * ((x1 - x0) - 2 * radius)
    base[:, 1] = (y0 + radius) + u[:, 1] * ((y1 - y0) - 2 * radius)

    angles = 2.0 * np.pi * np.arange(n_directions) / n_directions
    offsets = radius * np.column_stack([np.cos(angles), np.sin(angles)])

    center_vals = field.interpolate(base)
    sup = 0.0
    total = 0.0
    for off in offsets:
        shifted_vals = field.interpolate(base + off)
        diffs = np.abs(shifted_vals - center_vals)
        sup = max(sup, float(diffs.max()))
        total += float(diffs.sum())
    mean = total / (n_probe_pairs * n_directions)
    return ModulusStats(sup=sup, mean=mean, radius=radius,
                        n_pairs=n_probe_pairs * n_directions)
