"""Characteristic curves, Euler-Maruyama paths, and Monte Carlo solution
estimates for the transport equation with diffusion."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..numkit import RngStream
from .fields import ConstantDiffusion, TerminalCondition, VelocityField, as_diffusion


@dataclass
class SdePath:
    """One trajectory on t in [0, 1] together with its noise increments.

    ``states[k + 1] == states[k] + F dt + G * noise_increments[k]`` holds
    exactly, so a path can be replayed bit-for-bit from its increments.
    """

    times: np.ndarray
    states: np.ndarray
    noise_increments: np.ndarray

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            cols = ",".join(f"x{i + 1}" for i in range(self.states.shape[1]))
            fh.write(f"t,{cols}\n")
            for t, state in zip(self.times, self.states):
                fh.write(",".join([repr(float(t))] + [repr(float(v)) for v in state]) + "\n")


def _step_count(dt: float) -> int:
    if not 0.0 < dt <= 1.0:
        raise ValueError(f"dt must lie in (0, 1], got {dt}")
    return max(1, round(1.0 / dt))


def integrate_characteristics(field: VelocityField, x0, n_steps: int) -> SdePath:
    """Forward-Euler integration of dx = F dt (no noise) on [0, 1]."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    x = np.asarray(x0, dtype=np.float64)
    dt = 1.0 / n_steps
    times = np.linspace(0.0, 1.0, n_steps + 1)
    states = np.empty((n_steps + 1, x.size))
    states[0] = x
    for k in range(n_steps):
        drift = field.evaluate(states[k][None, :], times[k])[0]
        states[k + 1] = states[k] + drift * dt
    return SdePath(times=times, states=states,
                   noise_increments=np.zeros((n_steps, x.size)))


def sample_em_path(field: VelocityField, diffusion, x0, n_steps: int,
                   rng: RngStream) -> SdePath:
    """One Euler-Maruyama trajectory of dx = F dt + G dB on [0, 1]."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    g_fn = as_diffusion(diffusion)
    x = np.asarray(x0, dtype=np.float64)
    dt = 1.0 / n_steps
    times = np.linspace(0.0, 1.0, n_steps + 1)
    states = np.empty((n_steps + 1, x.size))
    increments = math.sqrt(dt) * rng.standard_normal((n_steps, x.size))
    states[0] = x
    for k in range(n_steps):
        point = states[k][None, :]
        drift = field.evaluate(point, times[k])[0]
        scale = g_fn.evaluate(point, times[k])[0]
        states[k + 1] = states[k] + drift * dt + scale * increments[k]
    return SdePath(times=times, states=states, noise_increments=increments)


def replay_path(path: SdePath, field: VelocityField, diffusion) -> np.ndarray:
    """Re-run the recurrence from the stored increments; returns the states."""
    g_fn = as_diffusion(diffusion)
    n_steps = len(path.noise_increments)
    dt = 1.0 / n_steps
    states = np.empty_like(path.states)
    states[0] = path.states[0]
    for k in range(n_steps):
        point = states[k][None, :]
        drift = field.evaluate(point, path.times[k])[0]
        scale = g_fn.evaluate(point, path.times[k])[0]
        states[k + 1] = states[k] + drift * dt + scale * path.noise_increments[k]
    return states


def estimate_u_fk(field: VelocityField, diffusion, terminal: TerminalCondition,
                  x, n_paths: int, dt: float, rng: RngStream) -> tuple:
    """Monte Carlo estimate of u(x, 0) as the mean of o(x(1)) over paths.

    Runs ``n_paths`` Euler-Maruyama trajectories started at ``x`` and
    returns ``(estimate, standard_error)``.  A diffusion that is exactly
    the constant 0 degenerates to the characteristics integrator and
    consumes no randomness (standard error 0 up to terminal spread).
    """
    if n_paths < 2:
        raise ValueError(f"n_paths must be >= 2, got {n_paths}")
    g_fn = as_diffusion(diffusion)
    noiseless = isinstance(g_fn, ConstantDiffusion) and g_fn.sigma == 0.0
    n_steps = _step_count(dt)
    step = 1.0 / n_steps
    root_step = math.sqrt(step)
    x = np.asarray(x, dtype=np.float64)
    states = np.tile(x, (n_paths, 1))
    for k in range(n_steps):
        t = k * step
        drift = field.evaluate(states, t)
        if noiseless:
            states = states + drift * step
        else:
            scale = g_fn.evaluate(states, t)
            noise = rng.standard_normal(states.shape)
            states = states + drift * step + scale[:, None] * (root_step * noise)
    values = terminal.evaluate(states)
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_paths))
    return estimate, stderr
