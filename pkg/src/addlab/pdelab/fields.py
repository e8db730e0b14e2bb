"""Velocity fields, diffusion coefficients, and terminal conditions.

A velocity field maps batched points ``(n, d)`` and a time in [0, 1] to
drift vectors ``(n, d)``; a diffusion coefficient maps the same to one
non-negative scalar per point.  Network-backed variants embed a stack of
L residual blocks into continuous time: layer ``l`` owns the slice
``[l/L, (l+1)/L)``, with drift scaled by L and noise scale by sqrt(L) so
that a forward-Euler step of size 1/L reproduces the layer update.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class VelocityField:
    """Base drift field; subclasses implement ``evaluate``."""

    time_dependent = False

    def evaluate(self, points: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantField(VelocityField):
    """Uniform drift everywhere."""

    vector: tuple

    def evaluate(self, points, t):
        return np.broadcast_to(np.asarray(self.vector, dtype=np.float64), points.shape).copy()


@dataclass(frozen=True)
class RotationField(VelocityField):
    """Rigid rotation at angular rate omega about a center."""

    omega: float
    center: tuple = (0.0, 0.0)

    def evaluate(self, points, t):
        rel = points - np.asarray(self.center, dtype=np.float64)
        out = np.empty_like(rel)
        out[:, 0] = -self.omega * rel[:, 1]
        out[:, 1] = self.omega * rel[:, 0]
        return out


class PiecewiseLayerField(VelocityField):
    """Drift assembled from per-layer displacement functions.

    ``layer_fns[l]`` maps points to the layer's residual displacement;
    the drift on the layer's time slice is ``L * layer_fns[l](points)``.
    """

    time_dependent = True

    def __init__(self, layer_fns):
        if not layer_fns:
            raise ValueError("need at least one layer function")
        self.layer_fns = list(layer_fns)

    def evaluate(self, points, t):
        n = len(self.layer_fns)
        layer = min(int(t * n), n - 1)
        return n * np.asarray(self.layer_fns[layer](points), dtype=np.float64)


class DiffusionCoefficient:
    """Base per-point scalar diffusion scale; subclasses implement ``evaluate``."""

    time_dependent = False

    def evaluate(self, points: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantDiffusion(DiffusionCoefficient):
    sigma: float

    def evaluate(self, points, t):
        return np.full(points.shape[0], float(self.sigma))


class FunctionDiffusion(DiffusionCoefficient):
    """Diffusion scale given by an arbitrary ``fn(points) -> (n,)``."""

    def __init__(self, fn):
        self.fn = fn

    def evaluate(self, points, t):
        return np.asarray(self.fn(points), dtype=np.float64)


class PiecewiseLayerDiffusion(DiffusionCoefficient):
    """Noise scale assembled from per-layer scale functions (sqrt(L) scaling)."""

    time_dependent = True

    def __init__(self, layer_fns):
        if not layer_fns:
            raise ValueError("need at least one layer function")
        self.layer_fns = list(layer_fns)

    def evaluate(self, points, t):
        n = len(self.layer_fns)
        layer = min(int(t * n), n - 1)
        return np.sqrt(n) * np.asarray(self.layer_fns[layer](points), dtype=np.float64)


def as_diffusion(value) -> DiffusionCoefficient:
    """Coerce a number, callable, or coefficient object to a DiffusionCoefficient."""
    if isinstance(value, DiffusionCoefficient):
        return value
    if callable(value):
        return FunctionDiffusion(value)
    return ConstantDiffusion(float(value))


class TerminalCondition:
    """Bounded terminal data ``o(x)`` enforced at t = 1."""

    def __init__(self, fn):
        self._fn = fn

    @classmethod
    def from_function(cls, fn) -> "TerminalCondition":
        return cls(lambda pts: np.asarray(fn(pts), dtype=np.float64))

    @classmethod
    def from_grid(cls, grid) -> "TerminalCondition":
        """Terminal data sampled on a grid, read back by bilinear interpolation."""
        return cls(grid.interpolate)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self._fn(np.asarray(points, dtype=np.float64))


def gaussian_bump(center=(0.0, 0.0), width=0.4, amplitude=1.0) -> TerminalCondition:
    """Isotropic Gaussian profile exp(-|x - c|^2 / (2 w^2)) scaled by amplitude."""
    c = np.asarray(center, dtype=np.float64)

    def fn(pts):
        d2 = np.sum((pts - c) ** 2, axis=1)
        return amplitude * np.exp(-d2 / (2.0 * width * width))

    return TerminalCondition.from_function(fn)


def wavy_two_class(amplitude=0.4, frequency=2.0, softness=None) -> TerminalCondition:
    """Two-class labels (+1 / -1) split by a sinusoidal boundary.

    ``softness`` of None gives a hard sign step; a positive value
    smooths the step with tanh of the signed distance over that scale.
    """

    def fn(pts):
        margin = pts[:, 1] - amplitude * np.sin(frequency * pts[:, 0])
        if softness is None:
            return np.where(margin >= 0.0, 1.0, -1.0)
        return np.tanh(margin / softness)

    return TerminalCondition.from_function(fn)
