"""Discretized 2D scalar fields on a rectangular extent."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class GridField:
    """Values ``u[i, j]`` at nodes ``(x_i, y_j)`` of a regular grid.

    ``extent`` is ``((x_min, x_max), (y_min, y_max))``; node ``(i, j)``
    sits at ``x_min + i * hx, y_min + j * hy``.
    """

    extent: tuple
    values: np.ndarray
    time_label: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"grid values must be 2D, got shape {self.values.shape}")
        (x0, x1), (y0, y1) = self.extent
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"degenerate extent {self.extent}")
        if min(self.values.shape) < 2:
            raise ValueError("grid needs at least 2 nodes per axis")

    @property
    def resolution(self) -> tuple:
        return self.values.shape

    @property
    def spacing(self) -> tuple:
        (x0, x1), (y0, y1) = self.extent
        nx, ny = self.values.shape
        return (x1 - x0) / (nx - 1), (y1 - y0) / (ny - 1)

    @property
    def x_axis(self) -> np.ndarray:
        (x0, x1), _ = self.extent
        return np.linspace(x0, x1, self.values.shape[0])

    @property
    def y_axis(self) -> np.ndarray:
        _, (y0, y1) = self.extent
        return np.linspace(y0, y1, self.values.shape[1])

    def nodes(self) -> np.ndarray:
        """All node coordinates as an (nx * ny, 2) array, x-major."""
        gx, gy = np.meshgrid(self.x_axis, self.y_axis, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def interpolate(self, points: np.ndarray) -> np.ndarray:
        """Bilinear interpolation at points inside the extent."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        (x0, x1), (y0, y1) = self.extent
        eps = 1e-9 * max(x1 - x0, y1 - y0)
        if (np.any(pts[:, 0] < x0 - eps) or np.any(pts[:, 0] > x1 + eps)
                or np.any(pts[:, 1] < y0 - eps) or np.any(pts[:, 1] > y1 + eps)):
            raise ValueError("interpolation point outside the grid extent")
        hx, hy = self.spacing
        nx, ny = self.values.shape
        fx = np.clip((pts[:, 0] - x0) / hx, 0.0, nx - 1)
        fy = np.clip((pts[:, 1] - y0) / hy, 0.0, ny - 1)
        ix = np.minimum(fx.astype(np.int64), nx - 2)
        iy = np.minimum(fy.astype(np.int64), ny - 2)
        tx = fx - ix
        ty = fy - iy
        v = self.values
        v00 = v[ix, iy]
        # factored form: exact for constant fields (all deltas vanish)
        return (v00
                + tx * (v[ix + 1, iy] - v00)
                + ty * (v[ix, iy + 1] - v00)
                + tx * ty * (v[ix + 1, iy + 1] - v[ix + 1, iy] - v[ix, iy + 1] + v00))

    def save_text(self, path) -> None:
        """Plain-text export: one header line, then one row of values per x node.

        Header fields: x_min x_max y_min y_max nx ny time_label.
        """
        (x0, x1), (y0, y1) = self.extent
        nx, ny = self.values.shape
        lines = [f"{x0!r} {x1!r} {y0!r} {y1!r} {nx} {ny} {self.time_label!r}"]
        for row in self.values:
            lines.append(" ".join(repr(v) for v in row.tolist()))
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load_text(cls, path) -> "GridField":
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().split()
            x0, x1, y0, y1 = (float(v) for v in header[:4])
            nx, ny = int(header[4]), int(header[5])
            time_label = float(header[6])
            values = np.loadtxt(fh, dtype=np.float64, ndmin=2)
        if values.shape != (nx, ny):
            raise ValueError(f"grid body shape {values.shape} does not match header ({nx}, {ny})")
        return cls(extent=((x0, x1), (y0, y1)), values=values, time_label=time_label)
