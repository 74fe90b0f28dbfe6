"""Explicit Engquist-Osher finite volumes for u_t + f(u)_x = g on (a, b).

Cells of the box outside (a, b) are ghost cells holding the exterior data;
only interior cells are updated.  Inflow/outflow selection at the boundary
comes from the flux splitting: the interface flux only reads the ghost
value through f+ (left edge) or f- (right edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .grid import Grid
from .nonlinearities import Flux

CFL_BUDGET = 0.45


class CFLViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class HyperbolicState:
    """Box values at time t; exterior cells are overwritten by the closure on each step."""

    grid: Grid
    flux: Flux
    u: np.ndarray
    t: float
    dt: float
    g: np.ndarray | None = None        # source on box cells (interior entries used)
    L_f: float = 0.0
    cfl_budget: float = CFL_BUDGET

    @property
    def cfl(self) -> float:
        return self.dt * self.L_f / self.grid.dx


def flux_divergence(flux: Flux, u: np.ndarray, dx: float, sl: slice) -> np.ndarray:
    """(F_{i+1/2} - F_{i-1/2}) / dx on the cells of ``sl`` (needs one neighbour each side)."""
    F = flux.plus(u[:-1]) + flux.minus(u[1:])      # interface i+1/2 for i = 0..N-2
    return (F[sl.start:sl.stop] - F[sl.start - 1:sl.stop - 1]) / dx


def with_exterior(grid: Grid, u: np.ndarray, uc: Callable, t: float) -> np.ndarray:
    out = np.array(u, dtype=float)
    ext = grid.exterior
    out[ext] = uc(t, grid.x[ext])
    return out


def step(state: HyperbolicState, uc_closure: Callable) -> HyperbolicState:
    """One explicit step; exterior cells are set to uc_closure(t, x) before and after."""
    if state.cfl > state.cfl_budget * (1.0 + 1e-12):
        raise CFLViolation(f"dt*L_f/dx = {state.cfl:.4g} exceeds the budget {state.cfl_budget}")
    grid = state.grid
    sl = grid.interior_slice
    u = with_exterior(grid, state.u, uc_closure, state.t)
    new = u.copy()
    new[sl] = u[sl] - state.dt * flux_divergence(state.flux, u, grid.dx, sl)
    if state.g is not None:
        new[sl] += state.dt * state.g[sl]
    t1 = state.t + state.dt
    new = with_exterior(grid, new, uc_closure, t1)
    return replace(state, u=new, t=t1, g=None)


def time_levels(T: float, dt_max: float, marks: Sequence[float] = ()) -> np.ndarray:
    """Time levels from 0 to T with steps <= dt_max that hit every mark exactly."""
    if not (T > 0 and dt_max > 0):
        raise ValueError("need T > 0 and dt_max > 0")
    pts = sorted({0.0, float(T)} | {float(m) for m in marks if 0.0 < m < T})
    levels = [0.0]
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(1, math.ceil((hi - lo) / dt_max * (1.0 - 1e-12)))
        levels += [lo + (hi - lo) * j / n for j in range(1, n)] + [hi]
    return np.array(levels)


@dataclass
class SpaceTimeField:
    """Box values at every time level: U[n] is the state at times[n]."""

    grid: Grid
    times: np.ndarray
    U: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def dts(self) -> np.ndarray:
        return np.diff(self.times)

    def at(self, t: float) -> np.ndarray:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 1e-12 * max(1.0, abs(t)):
            raise KeyError(f"time {t} is not a stored level")
        return self.U[k]

    def interior(self) -> np.ndarray:
        return self.U[:, self.grid.interior_slice]


def solve_with_source(grid: Grid, flux: Flux, u0: np.ndarray, uc_closure: Callable,
                      g_field: Callable[[int, float], np.ndarray] | np.ndarray | None,
                      T: float, dt_max: float | None = None, marks: Sequence[float] = (),
                      L_f: float | None = None, cfl_budget: float = CFL_BUDGET,
                      times: np.ndarray | None = None) -> SpaceTimeField:
    """Run ``step`` to T; ``g_field(n, t_n)`` (or a box array, or None) is the frozen source.

    ``u0`` holds box values; its exterior entries are replaced by the closure.
    """
    u = with_exterior(grid, u0, uc_closure, 0.0)
    if L_f is None:
        L_f = flux.lipschitz(float(np.max(np.abs(u))))
    if times is None:
        if dt_max is None:
            dt_max = cfl_budget * grid.dx / L_f if L_f > 0 else T / 16
        times = time_levels(T, dt_max, marks)
    U = np.empty((times.size, grid.N))
    U[0] = u
    for n in range(times.size - 1):
        if callable(g_field):
            g = g_field(n, times[n])
        else:
            g = g_field
        st = HyperbolicState(grid, flux, U[n], times[n], times[n + 1] - times[n], g, L_f,
                             cfl_budget)
        U[n + 1] = step(st, uc_closure).u
    return SpaceTimeField(grid, times, U, {"path": "hyperbolic"})
