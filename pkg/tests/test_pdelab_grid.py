import numpy as np
import pytest

from addlab.numkit import RngStream
from addlab.pdelab import GridField, TerminalCondition


def _random_grid(seed=0, nx=17, ny=9):
    values = RngStream(seed).standard_normal((nx, ny))
    return GridField(extent=((-1.0, 3.0), (0.0, 2.0)), values=values, time_label=0.25)


def test_spacing_matches_extent():
    g = _random_grid()
    hx, hy = g.spacing
    (x0, x1), (y0, y1) = g.extent
    assert abs(hx * (g.resolution[0] - 1) - (x1 - x0)) <= 1e-12
    assert abs(hy * (g.resolution[1] - 1) - (y1 - y0)) <= 1e-12


def test_interpolation_hits_nodes_exactly():
    g = _random_grid()
    got = g.interpolate(g.nodes())
    assert np.allclose(got, g.values.ravel(), atol=1e-12)


def test_interpolation_outside_extent_rejected():
    g = _random_grid()
    with pytest.raises(ValueError, match="outside"):
        g.interpolate(np.array([[5.0, 1.0]]))


def test_text_round_trip(tmp_path):
    g = _random_grid(seed=12)
    path = tmp_path / "field.txt"
    g.save_text(path)
    loaded = GridField.load_text(path)
    assert loaded.extent == g.extent
    assert loaded.time_label == g.time_label
    assert np.array_equal(loaded.values, g.values)
    # header is a single line with extent, resolution and time label
    first = path.read_text().splitlines()[0].split()
    assert len(first) == 7
    assert int(first[4]) == 17 and int(first[5]) == 9


def test_grid_validation():
    with pytest.raises(ValueError):
        GridField(extent=((0.0, 1.0), (1.0, 1.0)), values=np.zeros((4, 4)))
    with pytest.raises(ValueError):
        GridField(extent=((0.0, 1.0), (0.0, 1.0)), values=np.zeros((1, 4)))
    with pytest.raises(ValueError):
        GridField(extent=((0.0, 1.0), (0.0, 1.0)), values=np.zeros(4))


def test_terminal_condition_from_grid():
    g = _random_grid(seed=5)
    term = TerminalCondition.from_grid(g)
    pts = np.array([[0.5, 1.0], [-1.0, 0.0]])
    assert np.allclose(term.evaluate(pts), g.interpolate(pts))
