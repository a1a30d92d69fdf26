"""Uniform two-dimensional field grids and potential surfaces on them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import GridError

MODELS = ("two_scalar", "msr_d4", "msr_d3")
AXIS_NAMES = {"two_scalar": ("phi1", "phi2"), "msr_d4": ("phi", "phiTilde"), "msr_d3": ("phi", "phiTilde")}


@dataclass(frozen=True)
class FieldGrid:
    bounds: tuple[tuple[float, float], tuple[float, float]]
    points: tuple[int, int]

    def __post_init__(self):
        for (lo, hi), n in zip(self.bounds, self.points):
            if not hi > lo:
                raise GridError(f"empty interval [{lo}, {hi}]")
            if int(n) < 5:
                raise GridError(f"each axis needs at least 5 points, got {n}")

    @classmethod
    def square(cls, half_width: float, points: int) -> "FieldGrid":
        return cls(((-half_width, half_width), (-half_width, half_width)), (points, points))

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.linspace(lo, hi, n) for (lo, hi), n in zip(self.bounds, self.points))

    @property
    def spacing(self) -> tuple[float, float]:
        return tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(self.bounds, self.points))

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.points)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = self.axes
        return np.meshgrid(x, y, indexing="ij")

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask

    def interior_mask(self) -> np.ndarray:
        return ~self.boundary_mask()

    def node(self, flat_interior: int) -> tuple[int, int]:
        """Grid index of an interior node given its flat index in the interior block."""
        n1 = self.points[1] - 2
        return (flat_interior // n1 + 1, flat_interior % n1 + 1)

    def coords(self, index: tuple[int, int]) -> tuple[float, float]:
        x, y = self.axes
        return (float(x[index[0]]), float(y[index[1]]))

    def central_block(self) -> tuple[slice, slice]:
        """Index block covering the centred third of every axis."""
        out = []
        for n in self.points:
            lo = int(np.floor(n / 3))
            hi = int(np.ceil(2 * n / 3))
            out.append(slice(lo, hi))
        return tuple(out)


@dataclass
class PotentialSurface:
    grid: FieldGrid
    k: float
    values: np.ndarray
    model: str = "two_scalar"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise GridError(f"unknown grid model {self.model!r}")
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise GridError(f"values of shape {self.values.shape} do not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            bad = np.argwhere(~np.isfinite(self.values))[0]
            raise GridError("non-finite potential value", k=self.k, node=tuple(int(i) for i in bad))

    def copy(self, values: np.ndarray | None = None, k: float | None = None) -> "PotentialSurface":
        return PotentialSurface(self.grid, self.k if k is None else k,
                                self.values.copy() if values is None else values, self.model, dict(self.meta))
