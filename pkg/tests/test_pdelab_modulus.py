import numpy as np
import pytest

from addlab.numkit import RngStream
from addlab.pdelab import (
    GridField,
    RotationField,
    modulus_probe,
    solve_te_fd,
    wavy_two_class,
)

EXTENT = ((-2.0, 2.0), (-2.0, 2.0))


def _grid_from(fn, n=65):
    x = np.linspace(-2, 2, n)
    gx, gy = np.meshgrid(x, x, indexing="ij")
    return GridField(extent=EXTENT, values=fn(gx, gy))


def test_constant_field_has_zero_modulus():
    field = _grid_from(lambda gx, gy: np.full_like(gx, 3.7))
    stats = modulus_probe(field, 0.1, 100, RngStream(0))
    assert stats.sup == 0.0
    assert stats.mean == 0.0


def test_linear_plane_modulus_is_exact():
    # u = 0.8 x: bilinear interpolation is exact on planes and the
    # direction fan contains the gradient direction, so sup = |g| r.
    field = _grid_from(lambda gx, gy: 0.8 * gx)
    stats = modulus_probe(field, 0.05, 200, RngStream(1))
    assert abs(stats.sup - 0.8 * 0.05) <= 1e-10
    # general plane: fan directions bracket the gradient
    field = _grid_from(lambda gx, gy: 0.3 * gx - 0.5 * gy)
    g_norm = np.hypot(0.3, 0.5)
    stats = modulus_probe(field, 0.05, 200, RngStream(2))
    assert stats.sup <= g_norm * 0.05 + 1e-10
    assert stats.sup >= g_norm * 0.05 * np.cos(np.pi / 16) - 1e-10


def test_modulus_decreases_with_diffusion():
    term = wavy_two_class()
    sups = []
    for sigma in (0.05, 0.2, 0.8):
        sol = solve_te_fd(RotationField(0.8), sigma, term, EXTENT, (96, 96))
        sups.append(modulus_probe(sol, 0.05, 300, RngStream(3).derive(f"s{sigma}")).sup)
    assert sups[0] > sups[1] > sups[2]


def test_radius_preconditions():
    field = _grid_from(lambda gx, gy: gx)
    with pytest.raises(ValueError):
        modulus_probe(field, 2.5, 10, RngStream(0))
    with pytest.raises(ValueError):
        modulus_probe(field, 0.0, 10, RngStream(0))
    with pytest.raises(ValueError):
        modulus_probe(field, 0.1, 0, RngStream(0))


def test_probes_stay_inside_extent():
    # radius close to the half-extent still works: all probes interior
    field = _grid_from(lambda gx, gy: gx * gy)
    stats = modulus_probe(field, 1.9, 500, RngStream(9))
    assert np.isfinite(stats.sup)
