"""Uniform box grids on R^3 and grid functions with trilinear evaluation.

GridFunction values are stored as a (n1, n2, n3) C-ordered array, so the
flattened layout is x3-fastest, which is also the CSV row order.  CSV files
carry the columns x1, x2, x3, u with 17 significant digits, enough to
round-trip doubles exactly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .fields import ScalarField


@dataclass(frozen=True)
class Grid3:
    """Uniform grid: lower corner, per-axis counts (>= 3), per-axis spacings."""

    lower: tuple[float, float, float]
    counts: tuple[int, int, int]
    spacings: tuple[float, float, float]

    def __post_init__(self):
        if len(self.lower) != 3 or len(self.counts) != 3 or len(self.spacings) != 3:
            raise ValueError("grid needs 3 lower coords, 3 counts, 3 spacings")
        if any(int(n) != n or n < 3 for n in self.counts):
            raise ValueError(f"counts must be integers >= 3, got {self.counts}")
        if any(not h > 0 for h in self.spacings):
            raise ValueError(f"spacings must be positive, got {self.spacings}")

    @staticmethod
    def box(lower, upper, counts) -> "Grid3":
        """Grid spanning [lower, upper] with the given node counts."""
        lower = tuple(float(v) for v in lower)
        upper = tuple(float(v) for v in upper)
        counts = tuple(int(n) for n in counts)
        spacings = tuple((upper[i] - lower[i]) / (counts[i] - 1) for i in range(3))
        return Grid3(lower, counts, spacings)

    @property
    def upper(self) -> tuple[float, float, float]:
        return tuple(
            self.lower[i] + (self.counts[i] - 1) * self.spacings[i] for i in range(3)
        )

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.counts

    @property
    def n_nodes(self) -> int:
        n1, n2, n3 = self.counts
        return n1 * n2 * n3

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.lower[axis] + self.spacings[axis] * np.arange(self.counts[axis])

    def coordinate(self, idx: tuple[int, int, int]) -> np.ndarray:
        return np.array([self.lower[i] + idx[i] * self.spacings[i] for i in range(3)])

    def index(self, point) -> tuple[int, int, int]:
        """Nearest node index; exact inverse of coordinate on nodes."""
        p = np.asarray(point, dtype=float)
        return tuple(
            int(round((p[i] - self.lower[i]) / self.spacings[i])) for i in range(3)
        )

    def points(self) -> np.ndarray:
        """(n_nodes, 3) node coordinates in storage (x3-fastest) order."""
        axes = [self.axis_coordinates(i) for i in range(3)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def is_interior(self, idx: tuple[int, int, int]) -> bool:
        return all(0 < idx[i] < self.counts[i] - 1 for i in range(3))

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.counts, dtype=bool)
        mask[1:-1, 1:-1, 1:-1] = True
        return mask

    def can_coarsen(self) -> bool:
        return all(n % 2 == 1 and (n + 1) // 2 >= 5 for n in self.counts)

    def coarsen(self) -> "Grid3":
        if not self.can_coarsen():
            raise ValueError(f"grid {self.counts} cannot be coarsened")
        return Grid3(
            self.lower,
            tuple((n + 1) // 2 for n in self.counts),
            tuple(2 * h for h in self.spacings),
        )

    def refine(self) -> "Grid3":
        return Grid3(
            self.lower,
            tuple(2 * n - 1 for n in self.counts),
            tuple(h / 2 for h in self.spacings),
        )

    def margin_box(self, fraction: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
        """Box shrunk by the boundary-influence margin on every side."""
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        pad = fraction * (hi - lo)
        return lo + pad, hi - pad


class GridFunction:
    """Values of u on a Grid3 with trilinear off-node evaluation."""

    def __init__(self, grid: Grid3, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if values.shape == (grid.n_nodes,):
            values = values.reshape(grid.counts)
        if values.shape != grid.counts:
            raise ValueError(f"values shape {values.shape} does not match grid {grid.counts}")
        self.grid = grid
        self.values = np.ascontiguousarray(values)

    @staticmethod
    def from_field(grid: Grid3, field: ScalarField) -> "GridFunction":
        vals = field.value_batch(grid.points()).reshape(grid.counts)
        return GridFunction(grid, vals)

    @staticmethod
    def zeros(grid: Grid3) -> "GridFunction":
        return GridFunction(grid, np.zeros(grid.counts))

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    def value_batch(self, pts: np.ndarray) -> np.ndarray:
        """Trilinear interpolation at arbitrary points, clamped to the box."""
        pts = np.asarray(pts, dtype=float)
        n1, n2, n3 = self.grid.counts
        flat = self.values.ravel()
        t = np.empty_like(pts)
        for ax in range(3):
            t[:, ax] = (pts[:, ax] - self.grid.lower[ax]) / self.grid.spacings[ax]
            np.clip(t[:, ax], 0.0, self.grid.counts[ax] - 1, out=t[:, ax])
        i = np.minimum(t.astype(np.int64), np.array([n1 - 2, n2 - 2, n3 - 2]))
        f = t - i
        base = (i[:, 0] * n2 + i[:, 1]) * n3 + i[:, 2]
        s1 = n2 * n3
        fz = f[:, 2]
        g00 = flat[base] * (1 - fz) + flat[base + 1] * fz
        g01 = flat[base + n3] * (1 - fz) + flat[base + n3 + 1] * fz
        g10 = flat[base + s1] * (1 - fz) + flat[base + s1 + 1] * fz
        g11 = flat[base + s1 + n3] * (1 - fz) + flat[base + s1 + n3 + 1] * fz
        fy = f[:, 1]
        h0 = g00 * (1 - fy) + g01 * fy
        h1 = g10 * (1 - fy) + g11 * fy
        return h0 * (1 - f[:, 0]) + h1 * f[:, 0]

    def value(self, p) -> float:
        arr = p.as_array() if hasattr(p, "as_array") else np.asarray(p, dtype=float)
        return float(self.value_batch(arr[None, :])[0])

    def max_interior_abs_diff(self, other: "GridFunction") -> float:
        if self.grid != other.grid:
            raise ValueError("grids differ")
        mask = self.grid.interior_mask()
        return float(np.abs(self.values[mask] - other.values[mask]).max())

    def to_csv(self, path) -> None:
        buf = io.StringIO()
        buf.write("x1,x2,x3,u\n")
        pts = self.grid.points()
        vals = self.values.ravel()
        for k in range(pts.shape[0]):
            buf.write(
                "%.17g,%.17g,%.17g,%.17g\n" % (pts[k, 0], pts[k, 1], pts[k, 2], vals[k])
            )
        with open(path, "w") as fh:
            fh.write(buf.getvalue())

    @staticmethod
    def from_csv(path) -> "GridFunction":
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        if data.ndim != 2 or data.shape[1] != 4:
            raise ValueError("grid CSV needs columns x1,x2,x3,u")
        axes = [np.unique(data[:, i]) for i in range(3)]
        counts = tuple(len(a) for a in axes)
        if int(np.prod(counts)) != data.shape[0]:
            raise ValueError("grid CSV is not a full tensor grid")
        spacings = []
        for a in axes:
            if len(a) < 3:
                raise ValueError("grid CSV needs at least 3 nodes per axis")
            steps = np.diff(a)
            if not np.allclose(steps, steps[0], rtol=1e-9):
                raise ValueError("grid CSV spacing is not uniform")
            spacings.append(float(steps[0]))
        grid = Grid3(
            tuple(float(a[0]) for a in axes), counts, tuple(spacings)
        )
        expected = grid.points()
        if not np.allclose(expected, data[:, :3], rtol=0, atol=1e-12):
            raise ValueError("grid CSV rows are not in x3-fastest tensor order")
        return GridFunction(grid, data[:, 3].reshape(counts))
