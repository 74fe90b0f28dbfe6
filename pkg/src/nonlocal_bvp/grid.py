"""Uniform 1-D computational box around the domain, and cell-valued functions on it."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Closure = Callable[[float, np.ndarray], np.ndarray]


def zero_closure(t: float, x: np.ndarray) -> np.ndarray:
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Grid:
    """Box [x_min, x_max] split into N equal cells; the domain (a, b) sits inside.

    ``a`` and ``b`` are snapped to the nearest cell boundary on construction.
    """

    x_min: float
    x_max: float
    N: int
    a: float
    b: float
    collar: float = 0.0

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.N >= 4):
            raise ValueError("need x_max > x_min and at least four cells")
        dx = (self.x_max - self.x_min) / self.N
        ia = round((self.a - self.x_min) / dx)
        ib = round((self.b - self.x_min) / dx)
        object.__setattr__(self, "a", self.x_min + ia * dx)
        object.__setattr__(self, "b", self.x_min + ib * dx)
        if not (0 < ia < ib < self.N):
            raise ValueError("domain must lie strictly inside the box with at least one cell")
        width = min(self.a - self.x_min, self.x_max - self.b)
        if width < self.collar - 1e-12 * dx:
            raise ValueError(f"collar {width:g} narrower than the declared {self.collar:g}")

    @classmethod
    def around(cls, a: float, b: float, N: int, collar_fraction: float = 0.5) -> "Grid":
        """Box extending (a, b) by ``collar_fraction * (b - a)`` on each side, N cells in total.

        N must make the collar a whole number of cells (e.g. N divisible by 4 for the default).
        """
        width = b - a
        box = width * (1.0 + 2.0 * collar_fraction)
        inner = N * width / box
        if abs(inner - round(inner)) > 1e-9 or abs((N - round(inner)) % 2) > 0:
            raise ValueError(f"N={N} does not place the domain on cell boundaries")
        c = collar_fraction * width
        return cls(a - c, b + c, N, a, b, collar=c)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.N

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.N) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_min + np.arange(self.N + 1) * self.dx

    @property
    def interior(self) -> np.ndarray:
        x = self.x
        return (x > self.a) & (x < self.b)

    @property
    def exterior(self) -> np.ndarray:
        return ~self.interior

    @property
    def interior_slice(self) -> slice:
        idx = np.flatnonzero(self.interior)
        return slice(int(idx[0]), int(idx[-1]) + 1)

    def cell_of(self, x) -> np.ndarray:
        return np.floor((np.asarray(x, dtype=float) - self.x_min) / self.dx).astype(int)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.x_min, self.x_max, self.N * factor, self.a, self.b, self.collar)


@dataclass(frozen=True)
class GridFunction:
    """Cell averages on the box plus an analytic closure used beyond it.

    ``closure(t, x)`` is evaluated at time ``t``; values must respect ``budget``.
    """

    grid: Grid
    values: np.ndarray
    closure: Closure = field(default=zero_closure, compare=False)
    t: float = 0.0
    budget: float = math.inf

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        if np.max(np.abs(v), initial=0.0) > self.budget:
            raise ValueError(f"values exceed the L-infinity budget {self.budget:g}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, grid: Grid, func: Closure, t: float = 0.0, **kw) -> "GridFunction":
        """Cell-centre samples of ``func`` with ``func`` itself as closure."""
        return cls(grid, func(t, grid.x), closure=func, t=t, **kw)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.grid.x_min) & (x < self.grid.x_max)
        k = np.clip(self.grid.cell_of(x), 0, self.grid.N - 1)
        return np.where(inside, self.values[k], self.exterior(x))

    def exterior(self, x) -> np.ndarray:
        return np.asarray(self.closure(self.t, np.asarray(x, dtype=float)), dtype=float) \
            * np.ones_like(np.asarray(x, dtype=float))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values, self.closure, self.t, self.budget)

    def map(self, h: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Pointwise composition h(phi), closure included."""
        cl = self.closure
        return GridFunction(self.grid, h(self.values), lambda t, x: h(cl(t, x)), self.t)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "value"])
            for xi, vi in zip(self.grid.x, self.values):
                w.writerow([repr(float(xi)), repr(float(vi))])
