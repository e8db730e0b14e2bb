"""Explicit finite-difference solver for the terminal-value transport
equation with diffusion.

The problem  du/dt + F . grad(u) + (1/2) G^2 lap(u) = 0,  u(x, 1) = o(x)
is marched forward in the reversed time tau = 1 - t, where it becomes
du/dtau = F . grad(u) + (1/2) G^2 lap(u).  The advection term is upwind
differenced (the information for this sign convention arrives from the
+F direction), the Laplacian is the centered 5-point stencil, and the
extent boundary is homogeneous-Neumann via edge copying.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from .fields import DiffusionCoefficient, TerminalCondition, VelocityField, as_diffusion
from .grid import GridField

log = logging.getLogger(__name__)

_FIELD_SAMPLE_TIMES = (0.0, 0.25, 0.5, 0.75, 1.0)


class StabilityError(ValueError):
    """Requested time step exceeds the explicit scheme's stability limit."""


def _freeze_diffusion(diffusion, nodes, shape) -> np.ndarray:
    """Per-node diffusion scale, frozen for the whole solve."""
    if isinstance(diffusion, np.ndarray):
        sig = np.asarray(diffusion, dtype=np.float64)
        if sig.shape != shape:
            raise ValueError(f"diffusion grid shape {sig.shape} does not match grid {shape}")
    else:
        sig = as_diffusion(diffusion).evaluate(nodes, 0.0).reshape(shape)
    if np.any(sig < 0.0):
        raise ValueError("diffusion coefficient must be non-negative everywhere")
    return sig


def _max_speeds(field, nodes, shape) -> tuple:
    """Per-axis and 2-norm maxima of |F| over the grid at sampled times."""
    times = _FIELD_SAMPLE_TIMES if field.time_dependent else (0.0,)
    fx_max = fy_max = norm_max = 0.0
    for t in times:
        f = field.evaluate(nodes, t)
        fx_max = max(fx_max, float(np.max(np.abs(f[:, 0]))))
        fy_max = max(fy_max, float(np.max(np.abs(f[:, 1]))))
        norm_max = max(norm_max, float(np.max(np.hypot(f[:, 0], f[:, 1]))))
    return fx_max, fy_max, norm_max


def fd_stability_limit(field: VelocityField, diffusion, extent, resolution) -> float:
    """Largest admissible dt for the explicit upwind/centered scheme.

    This is the declared bound  min(h / (2 max|F|), h^2 / (4 max G^2))
    tightened to the joint monotonicity bound
    1 / (max|Fx|/hx + max|Fy|/hy + max G^2 (1/hx^2 + 1/hy^2)),
    under which the update is a convex combination of old node values.
    """
    nx, ny = resolution
    (x0, x1), (y0, y1) = extent
    hx = (x1 - x0) / (nx - 1)
    hy = (y1 - y0) / (ny - 1)
    h = min(hx, hy)
    probe = GridField(extent=extent, values=np.zeros(resolution))
    nodes = probe.nodes()
    sig = _freeze_diffusion(diffusion, nodes, tuple(resolution))
    sig2_max = float(np.max(sig * sig))
    fx_max, fy_max, norm_max = _max_speeds(field, nodes, resolution)

    declared = min(
        h / (2.0 * norm_max) if norm_max > 0 else math.inf,
        h * h / (4.0 * sig2_max) if sig2_max > 0 else math.inf,
    )
    joint_rate = fx_max / hx + fy_max / hy + sig2_max * (1.0 / hx**2 + 1.0 / hy**2)
    joint = 1.0 / joint_rate if joint_rate > 0 else math.inf
    return min(declared, joint, 1.0)


def solve_te_fd(field: VelocityField, diffusion, terminal: TerminalCondition,
                extent, resolution, dt: float | None = None) -> GridField:
    """March u from the terminal data at t = 1 back to t = 0.

    ``diffusion`` may be a scalar, a per-node (nx, ny) array, or a
    DiffusionCoefficient; it is sampled at the grid nodes once and
    frozen.  ``dt`` of None picks 95% of the stability limit; an
    explicit dt above the limit is rejected.
    """
    nx, ny = resolution
    grid = GridField(extent=extent, values=np.zeros((nx, ny)))
    nodes = grid.nodes()
    hx, hy = grid.spacing

    sig = _freeze_diffusion(diffusion, nodes, (nx, ny))
    half_sig2 = 0.5 * sig * sig

    limit = fd_stability_limit(field, diffusion if isinstance(diffusion, np.ndarray) else sig,
                               extent, resolution)
    if dt is None:
        dt = 0.95 * limit
    elif dt > limit * (1.0 + 1e-12):
        raise StabilityError(f"dt={dt} exceeds the stability limit {limit}")
    n_steps = max(1, math.ceil(1.0 / dt - 1e-12))
    step = 1.0 / n_steps
    log.info("fd solve: %d steps of dt=%.3e (stability limit %.3e)", n_steps, step, limit)

    u = terminal.evaluate(nodes).reshape(nx, ny)

    drift = None
    for k in range(n_steps):
        tau = k * step
        if drift is None or field.time_dependent:
            f = field.evaluate(nodes, 1.0 - tau)
            fx = f[:, 0].reshape(nx, ny)
            fy = f[:, 1].reshape(nx, ny)
            drift = (fx, fy)
        fx, fy = drift
        padded = np.pad(u, 1, mode="edge")
        center = padded[1:-1, 1:-1]
        fwd_x = (padded[2:, 1:-1] - center) / hx
        bwd_x = (center - padded[:-2, 1:-1]) / hx
        fwd_y = (padded[1:-1, 2:] - center) / hy
        bwd_y = (center - padded[1:-1, :-2]) / hy
        ux = np.where(fx > 0.0, fwd_x, bwd_x)
        uy = np.where(fy > 0.0, fwd_y, bwd_y)
        lap = (padded[2:, 1:-1] - 2.0 * center + padded[:-2, 1:-1]) / (hx * hx) \
            + (padded[1:-1, 2:] - 2.0 * center + padded[1:-1, :-2]) / (hy * hy)
        u = u + step * (fx * ux + fy * uy + half_sig2 * lap)

    return GridField(extent=extent, values=u, time_label=0.0)
