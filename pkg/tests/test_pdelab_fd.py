import numpy as np
import pytest

from addlab.numkit import RngStream
from addlab.pdelab import (
    ConstantField,
    GridField,
    RotationField,
    StabilityError,
    TerminalCondition,
    estimate_u_fk,
    fd_stability_limit,
    gaussian_bump,
    solve_te_fd,
    wavy_two_class,
)

EXTENT = ((-2.0, 2.0), (-2.0, 2.0))


def test_no_dynamics_returns_terminal_exactly():
    term = gaussian_bump(width=0.5)
    sol = solve_te_fd(ConstantField((0.0, 0.0)), 0.0, term, EXTENT, (33, 33))
    expected = term.evaluate(sol.nodes()).reshape(33, 33)
    assert np.array_equal(sol.values, expected)
    assert sol.time_label == 0.0


def test_pure_diffusion_matches_heat_kernel():
    # Gaussian terminal of width w diffused for unit time with scale s
    # stays Gaussian: variance w^2 + s^2, amplitude w^2 / (w^2 + s^2).
    w, s = 0.3, 0.5
    center = np.array([0.2, -0.1])
    term = gaussian_bump(center=tuple(center), width=w, amplitude=1.0)
    sol = solve_te_fd(ConstantField((0.0, 0.0)), s, term, EXTENT, (128, 128))
    d2 = np.sum((sol.nodes() - center) ** 2, axis=1)
    total = w * w + s * s
    exact = (w * w / total) * np.exp(-d2 / (2.0 * total))
    rms = np.sqrt(np.mean((sol.values.ravel() - exact) ** 2))
    assert rms <= 0.01 * exact.max()


def test_fd_agrees_with_fk_on_rotation_field():
    field = RotationField(0.12)
    term = gaussian_bump(center=(0.3, 0.15), width=0.8, amplitude=1.0)
    sol = solve_te_fd(field, 0.2, term, EXTENT, (128, 128))
    rng = RngStream(11)
    probes = -1.2 + 2.4 * rng.derive("probes").uniform((10, 2))
    hits = 0
    for i, p in enumerate(probes):
        est, se = estimate_u_fk(field, 0.2, term, p, n_paths=3000, dt=0.0025,
                                rng=rng.derive(f"fk{i}"))
        fd = float(sol.interpolate(p[None])[0])
        hits += abs(est - fd) <= 3.0 * se
    assert hits >= 9


def test_maximum_principle():
    term = wavy_two_class()
    for sigma in (0.0, 0.2, 0.7):
        sol = solve_te_fd(RotationField(0.8), sigma, term, EXTENT, (64, 64))
        assert sol.values.min() >= -1.0 - 1e-9
        assert sol.values.max() <= 1.0 + 1e-9


def test_spatially_varying_diffusion_grid():
    # diffusion active only in the right half-plane: the left stays put
    term = gaussian_bump(center=(-1.0, 0.0), width=0.3)
    nodes_x = np.linspace(-2, 2, 65)
    sig = np.where(nodes_x[:, None] > 0.0, 0.4, 0.0) * np.ones((65, 65))
    sol = solve_te_fd(ConstantField((0.0, 0.0)), sig, term, EXTENT, (65, 65))
    expected = term.evaluate(sol.nodes()).reshape(65, 65)
    # far-left columns never feel the right-half diffusion
    assert np.allclose(sol.values[:16], expected[:16], atol=1e-12)
    assert not np.allclose(sol.values[48:], expected[48:], atol=1e-6)


def test_stability_bound_rejects_large_dt():
    limit = fd_stability_limit(RotationField(1.0), 0.3, EXTENT, (64, 64))
    with pytest.raises(StabilityError, match="stability limit"):
        solve_te_fd(RotationField(1.0), 0.3, gaussian_bump(), EXTENT, (64, 64),
                    dt=limit * 2.0)
    # at or below the limit runs fine
    solve_te_fd(RotationField(1.0), 0.3, gaussian_bump(), EXTENT, (64, 64),
                dt=limit * 0.5)


def test_negative_diffusion_rejected():
    with pytest.raises(ValueError, match="non-negative"):
        solve_te_fd(ConstantField((0.0, 0.0)), -0.1, gaussian_bump(), EXTENT, (33, 33))


def test_advection_transports_against_characteristics():
    # constant gentle drift, smooth wide terminal: the solved field at x
    # matches o(x + F) to interpolation-and-scheme accuracy
    field = ConstantField((0.2, 0.1))
    term = gaussian_bump(center=(0.0, 0.0), width=1.0, amplitude=0.5)
    sol = solve_te_fd(field, 0.0, term, EXTENT, (256, 256))
    rng = RngStream(4)
    probes = -1.0 + 2.0 * rng.uniform((25, 2))
    shifted = probes + np.array([0.2, 0.1])
    expected = term.evaluate(shifted)
    got = sol.interpolate(probes)
    assert np.max(np.abs(got - expected)) <= 1e-3
