"""Explicit monotone scheme for u_t + f(u)_x = L[b(u)] with exterior data, and the
three constructions built on it: Picard iteration on the source, truncated
operators and vanishing viscosity."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .grid import Grid
from .hyperbolic import CFL_BUDGET, HyperbolicState, SpaceTimeField, step, time_levels, \
    with_exterior
from .levy_measure import LevyMeasure, measure_distance, tail_mass, truncate, zero_measure, \
    total_mass, fractional
from .nonlinearities import Nonlinearity
from .nonlocal_ops import stencil

log = logging.getLogger(__name__)

MONOTONE_BUDGET = 0.9


class CertificateFailure(RuntimeError):
    """No admissible time step could be certified."""


class NotFiniteMeasure(ValueError):
    pass


@dataclass(frozen=True)
class ExteriorData:
    """Space-time closure u^c with its partial derivatives and Lipschitz constants."""

    func: Callable[[float, np.ndarray], np.ndarray]
    d_t: Callable[[float, np.ndarray], np.ndarray] | None = None
    d_x: Callable[[float, np.ndarray], np.ndarray] | None = None
    lip_t: float = 0.0
    lip_x: float = 0.0
    name: str = "custom"

    def __call__(self, t, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.func(t, x), dtype=float) * np.ones_like(x)

    def dt(self, t, x):
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x) if self.d_t is None else self.d_t(t, x) * np.ones_like(x)

    def dx(self, t, x):
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x) if self.d_x is None else self.d_x(t, x) * np.ones_like(x)


def constant_exterior(c: float) -> ExteriorData:
    return ExteriorData(lambda t, x: np.full_like(x, c), name=f"constant({c:g})")


@dataclass(frozen=True)
class Problem:
    grid: Grid
    nonlin: Nonlinearity
    mu: LevyMeasure
    u0: Callable[[np.ndarray], np.ndarray]
    uc: ExteriorData
    T: float
    r: float | None = None
    cfl_budget: float = CFL_BUDGET
    dt_max: float | None = None
    marks: tuple[float, ...] = ()
    name: str = "problem"

    @property
    def split(self) -> float:
        return self.grid.dx if self.r is None else self.r

    def initial_box(self) -> np.ndarray:
        """u0 on interior cells, u^c(0) on exterior cells."""
        g = self.grid
        return np.where(g.interior, self.u0(g.x), self.uc(0.0, g.x))

    def data_range(self, times: np.ndarray | None = None) -> tuple[float, float]:
        """Range of all data the scheme reads: u0 inside, u^c on exterior and far cells."""
        g = self.grid
        st = stencil(self.mu, g, self.r)
        ts = np.linspace(0.0, self.T, 9) if times is None else times
        vals = [self.u0(g.x)[g.interior]]
        pts = np.concatenate([g.x[g.exterior], st.far_mid])
        for t in ts:
            vals.append(self.uc(t, pts))
        v = np.concatenate(vals)
        return float(v.min()), float(v.max())

    def lipschitz(self) -> tuple[float, float]:
        lo, hi = self.data_range()
        bound = max(abs(lo), abs(hi))
        return self.nonlin.f.lipschitz(bound), self.nonlin.b.lipschitz(bound)

    def with_measure(self, mu: LevyMeasure, name: str | None = None) -> "Problem":
        return replace(self, mu=mu, name=name or self.name)


@dataclass
class SolutionField(SpaceTimeField):
    """Space-time field with provenance; every slice holds u^c on exterior cells."""

    problem: Problem | None = None

    def b_of_u(self) -> np.ndarray:
        return self.problem.nonlin.b(self.U)


# ------------------------------------------------------------- certificates

def diffusion_rate(mu: LevyMeasure, grid: Grid, r: float | None) -> float:
    """sigma_dx^2 / dx^2 + 2 mu(|z| >= dx): the bound on row rates used in the certificate."""
    if not (mu.atoms or mu.pieces):
        return 0.0
    st = stencil(mu, grid, r)
    return 2.0 * st.kappa + 2.0 * tail_mass(mu, st.r)


def certificate(p: Problem, dt: float) -> float:
    L_f, L_b = p.lipschitz()
    return dt * (L_f / p.grid.dx + L_b * diffusion_rate(p.mu, p.grid, p.r))


def choose_dt(p: Problem) -> float:
    """Largest step satisfying both the hyperbolic CFL and the monotonicity certificate."""
    L_f, L_b = p.lipschitz()
    dx = p.grid.dx
    dt = p.T / 16 if p.dt_max is None else p.dt_max
    if L_f > 0:
        dt = min(dt, p.cfl_budget * dx / L_f)
    total = L_f / dx + L_b * diffusion_rate(p.mu, p.grid, p.r)
    if total > 0 and dt * total > MONOTONE_BUDGET:
        new = MONOTONE_BUDGET / total
        log.info("monotonicity certificate: dt shrunk from %.4g to %.4g", dt, new)
        dt = new
    if not dt > 0 or not math.isfinite(dt):
        raise CertificateFailure("no positive time step satisfies the certificate")
    return dt


# ------------------------------------------------------------------ solves

def _levels(p: Problem) -> np.ndarray:
    return time_levels(p.T, choose_dt(p), p.marks)


def _finish(p: Problem, times, U, **info) -> SolutionField:
    L_f, L_b = p.lipschitz()
    dtm = float(np.max(np.diff(times)))
    info.setdefault("dt_max", dtm)
    info.setdefault("certificate", certificate(p, dtm))
    info.setdefault("data_range", p.data_range(times))
    info.setdefault("L_f", L_f)
    info.setdefault("L_b", L_b)
    return SolutionField(p.grid, times, U, info, problem=p)


def solve_direct(p: Problem, times: np.ndarray | None = None) -> SolutionField:
    """Hyperbolic step plus dt * L_h[b(u)] evaluated at the old time level."""
    g = p.grid
    times = _levels(p) if times is None else times
    cert = certificate(p, float(np.max(np.diff(times))))
    if cert > MONOTONE_BUDGET * (1 + 1e-12):
        raise CertificateFailure(f"monotonicity certificate {cert:.4g} > {MONOTONE_BUDGET}")
    L_f, _ = p.lipschitz()
    b = p.nonlin.b
    diffuse = not b.is_zero and bool(p.mu.atoms or p.mu.pieces)
    st = stencil(p.mu, g, p.r) if diffuse else None
    U = np.empty((times.size, g.N))
    U[0] = with_exterior(g, p.initial_box(), p.uc, 0.0)
    for n in range(times.size - 1):
        src = None
        if diffuse:
            far = b(p.uc(times[n], st.far_mid))
            src = st.apply(b(U[n]), far)
        state = HyperbolicState(g, p.nonlin.f, U[n], times[n], times[n + 1] - times[n], src,
                                L_f, p.cfl_budget)
        U[n + 1] = step(state, p.uc).u
    return _finish(p, times, U, path="direct", certificate=cert)


def _source_from(p: Problem, st, U: np.ndarray, times: np.ndarray) -> np.ndarray:
    b = p.nonlin.b
    far = np.stack([b(p.uc(t, st.far_mid)) for t in times])
    G = np.empty_like(U)
    for n in range(U.shape[0]):
        G[n] = st.apply(b(U[n]), far[n])
    return G


@dataclass
class FixedPointResult:
    field: SolutionField
    gaps: list[float]
    converged: bool
    mass: float            # ||mu|| as used by the factorial bound
    L_b: float

    def factorial_bound(self, k: int) -> float:
        """gap_1 (2 L_b ||mu|| T)^(k-1) / (k-1)! for the k-th gap (k >= 1)."""
        c = 2.0 * self.L_b * self.mass * self.field.times[-1]
        return self.gaps[0] * c ** (k - 1) / math.factorial(k - 1)


def solve_fixed_point(p: Problem, tol: float | None = None, k_max: int = 60,
                      times: np.ndarray | None = None) -> FixedPointResult:
    """u_{k+1} solves the conservation law with source L[b(u_k)], starting from u_0(t) = u0.

    gap_k = sup_t ||u_k(t) - u_{k-1}(t)||_{L1(domain)}.
    """
    if not p.mu.is_finite:
        raise NotFiniteMeasure("the fixed-point construction needs a finite Lévy measure")
    g = p.grid
    times = _levels(p) if times is None else times
    sl = g.interior_slice
    if tol is None:
        tol = 1e-8 * (g.b - g.a) * max(float(np.max(np.abs(p.u0(g.x)[sl]))), 1e-300)
    L_f, L_b = p.lipschitz()
    st = stencil(p.mu, g, p.r)
    U = np.repeat(with_exterior(g, p.initial_box(), p.uc, 0.0)[None, :], times.size, axis=0)
    for n, t in enumerate(times):
        U[n] = with_exterior(g, U[n], p.uc, t)
    gaps: list[float] = []
    converged = False
    for _ in range(k_max):
        G = _source_from(p, st, U, times)
        V = np.empty_like(U)
        V[0] = U[0]
        for n in range(times.size - 1):
            state = HyperbolicState(g, p.nonlin.f, V[n], times[n], times[n + 1] - times[n],
                                    G[n], L_f, p.cfl_budget)
            V[n + 1] = step(state, p.uc).u
        gap = float(np.max(np.sum(np.abs(V[:, sl] - U[:, sl]), axis=1)) * g.dx)
        gaps.append(gap)
        U = V
        if gap < tol:
            converged = True
            break
    if not converged:
        log.warning("fixed point: %d iterations without reaching tol %.3g", k_max, tol)
    fld = _finish(p, times, U, path="fixed_point", iterations=len(gaps), converged=converged)
    mass = total_mass(p.mu)
    return FixedPointResult(fld, gaps, converged, mass, L_b)


@dataclass
class SequenceMember:
    n: int
    distance: float
    absorbed: bool
    field: SolutionField


def run_truncated_sequence(p: Problem, n_ladder: Sequence[int],
                           times: np.ndarray | None = None) -> list[SequenceMember]:
    """Solve with the outer part of mu at 1/n for every n of the ladder.

    When 1/n is below the cell size the truncation is invisible to the grid
    and the full measure is used (``absorbed`` flag).
    """
    ns = list(n_ladder)
    if any(b <= a for a, b in zip(ns[:-1], ns[1:])):
        raise ValueError("n_ladder must be increasing")
    times = _levels(p) if times is None else times
    out = []
    for n in ns:
        _, outer = truncate(p.mu, 1.0 / n)
        dist = measure_distance(outer, p.mu)
        absorbed = 1.0 / n < p.grid.dx
        q = p if absorbed else p.with_measure(outer, f"{p.name}[n={n}]")
        fld = solve_direct(q, times)
        fld.info.update(n=n, measure_distance=dist, absorbed=absorbed,
                        path="truncated_sequence")
        out.append(SequenceMember(n, dist, absorbed, fld))
    return out


def l1_Q(A: np.ndarray, B: np.ndarray, field: SpaceTimeField) -> float:
    """||A - B||_{L1(Q)} with a left Riemann sum in time over the interior cells."""
    sl = field.grid.interior_slice
    per_t = np.sum(np.abs(A[:, sl] - B[:, sl]), axis=1) * field.grid.dx
    return float(np.sum(per_t[:-1] * np.diff(field.times)))


def l2_Q(A: np.ndarray, B: np.ndarray, field: SpaceTimeField) -> float:
    sl = field.grid.interior_slice
    per_t = np.sum((A[:, sl] - B[:, sl]) ** 2, axis=1) * field.grid.dx
    return float(math.sqrt(np.sum(per_t[:-1] * np.diff(field.times))))


@dataclass
class ViscosityResult:
    hyperbolic: SolutionField
    members: list[SolutionField]
    distances: list[float]
    ns: list[int]


def run_vanishing_viscosity(p: Problem, alpha: float, n_ladder: Sequence[int]
                            ) -> ViscosityResult:
    """Solve with L_n = -(1/n)(-Laplacian)^(alpha/2) and compare with the conservation law.

    The reference uses the same grid, flux and time levels (the finest
    member's levels, which satisfy every member's certificate).
    """
    ns = list(n_ladder)
    if any(b <= a for a, b in zip(ns[:-1], ns[1:])):
        raise ValueError("n_ladder must be increasing")
    base = fractional(alpha, p.mu.tail_cutoff if (p.mu.atoms or p.mu.pieces) else 1e3)
    problems = [p.with_measure(base.scaled(1.0 / n), f"{p.name}[visc n={n}]") for n in ns]
    times = _levels(problems[0])     # smallest n has the largest diffusion
    members = [solve_direct(q, times) for q in problems]
    hyp = solve_direct(p.with_measure(zero_measure(), f"{p.name}[hyperbolic]"), times)
    dists = [l1_Q(m.U, hyp.U, hyp) for m in members]
    for m, n, d in zip(members, ns, dists):
        m.info.update(n=n, l1_to_hyperbolic=d, path="vanishing_viscosity")
    return ViscosityResult(hyp, members, dists, ns)
