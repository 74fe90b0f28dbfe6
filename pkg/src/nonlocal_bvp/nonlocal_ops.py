"""Discrete Lévy operators on a grid with exterior closure.

One symmetric jump stencil carries everything.  Jumps of length at least
``r`` land on box cells (weight = measure of the offset cell) or on far
cells beyond the box, whose widths grow geometrically out to the tail
cutoff with a last cell reaching infinity.  Jumps shorter than ``r`` are
replaced by ``(sigma_r^2 / 2) D^2_h``, i.e. nearest-neighbour jumps of rate
``kappa = sigma_r^2 / (2 dx^2)``; at the box edge these go to the first far
cell, which has width ``dx``.

Every row rate is the sum of its nonnegative weights, so constants are
annihilated exactly and the operator is monotone.  Far cells carry width
``h_m``, and the reversed rates ``dx * w / h_m`` make the whole graph
reversible.  That is what turns the integration-by-parts and product-rule
rearrangements into exact finite-sum identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import toeplitz

from .grid import Grid, GridFunction
from .levy_measure import LevyMeasure, small_moment, tail_mass_split

FAR_UNIFORM_CELLS = 16
FAR_GROWTH = 1.1


class SubGridSplit(ValueError):
    """Jumps shorter than a cell cannot be resolved by the jump sum."""


def far_distances(grid: Grid, reach: float) -> np.ndarray:
    """Distances from the box edge of the far-cell boundaries on one side (last one inf)."""
    dx = grid.dx
    d = [k * dx for k in range(FAR_UNIFORM_CELLS + 1)]
    width = dx
    while d[-1] < reach:
        width *= FAR_GROWTH
        d.append(d[-1] + width)
    d.append(math.inf)
    return np.array(d)


@dataclass(frozen=True, eq=False)
class JumpStencil:
    """All weights of the discrete operator for one (measure, grid, r)."""

    grid: Grid
    r: float
    kappa: float
    W: np.ndarray            # W[d] = mu({(d-1/2) dx <= |z| < (d+1/2) dx} and |z| >= r), one side
    K_out: np.ndarray        # box-to-box jump weights, r and beyond
    K_in: np.ndarray         # box-to-box nearest-neighbour weights kappa
    F_out: np.ndarray        # box-to-far weights (N, M)
    F_in: np.ndarray         # kappa jumps from the two edge cells to the adjacent far cells
    far_mid: np.ndarray      # representative points of far cells (left ones first)
    far_width: np.ndarray    # widths of far cells (inf for the two outermost)
    tail_beyond: float       # mu(|z| >= tail cutoff), feeds the remainder bound

    @property
    def K(self) -> np.ndarray:
        return self.K_out + self.K_in

    @property
    def F(self) -> np.ndarray:
        return self.F_out + self.F_in

    @property
    def exit_rate(self) -> np.ndarray:
        """Rate of jumping from each box cell to a far cell."""
        return self.F.sum(axis=1)

    @property
    def rate(self) -> np.ndarray:
        return self.K.sum(axis=1) + self.exit_rate

    def far_values(self, phi: GridFunction) -> np.ndarray:
        return phi.exterior(self.far_mid)

    def weights(self, part: str) -> tuple[np.ndarray, np.ndarray]:
        if part == "outer":
            return self.K_out, self.F_out
        if part == "inner":
            return self.K_in, self.F_in
        if part == "full":
            return self.K, self.F
        raise ValueError(f"unknown operator part {part!r}")

    def apply(self, v: np.ndarray, far: np.ndarray, part: str = "full") -> np.ndarray:
        """sum_j K_ij (v_j - v_i) + sum_m F_im (far_m - v_i) on every box cell."""
        K, F = self.weights(part)
        return K @ v - K.sum(axis=1) * v + F @ far - F.sum(axis=1) * v

    def bilinear(self, v, v_far, w, w_far, part: str = "full") -> np.ndarray:
        """Pointwise 1/2 sum_j K_ij (v_j - v_i)(w_j - w_i) on every box cell."""
        K, F = self.weights(part)
        dv = v[None, :] - v[:, None]
        dw = w[None, :] - w[:, None]
        fv = v_far[None, :] - v[:, None]
        fw = w_far[None, :] - w[:, None]
        return 0.5 * (np.sum(K * dv * dw, axis=1) + np.sum(F * fv * fw, axis=1))

    def apply_exterior(self, v: np.ndarray, part: str = "full") -> np.ndarray:
        """Operator value on far cells for a function vanishing outside the box.

        The last cell on each side has infinite width, so only its total
        mass (value times width) is meaningful; it is returned as that mass.
        """
        _, F = self.weights(part)
        flux = self.grid.dx * (F.T @ v)
        width = self.far_width
        return np.where(np.isinf(width), flux, flux / np.where(np.isinf(width), 1.0, width))


def _lattice_weights(mu: LevyMeasure, dx: float, r: float, n: int) -> np.ndarray:
    d = np.arange(n, dtype=float)
    lo = np.maximum((d - 0.5) * dx, r)
    hi = (d + 0.5) * dx
    W = np.where(hi > lo, mu.side_mass(lo, np.maximum(hi, lo)), 0.0)
    W[0] = 0.0
    return W


@lru_cache(maxsize=64)
def stencil(mu: LevyMeasure, grid: Grid, r: float | None = None) -> JumpStencil:
    """Build (and cache) the jump stencil; ``r`` defaults to the cell size."""
    dx = grid.dx
    r = dx if r is None else float(r)
    if r < dx * (1.0 - 1e-12):
        raise SubGridSplit(f"r={r:g} is below the cell size {dx:g}; split at r = dx and "
                           "route the short jumps through apply_inner")
    N = grid.N
    W = _lattice_weights(mu, dx, r, N)
    K_out = toeplitz(W)
    np.fill_diagonal(K_out, 0.0)

    kappa = small_moment(mu, r) / (2.0 * dx * dx) if (mu.atoms or mu.pieces) else 0.0
    K_in = kappa * (np.eye(N, k=1) + np.eye(N, k=-1))

    dist = far_distances(grid, mu.tail_cutoff + grid.length)
    lo_d, hi_d = dist[:-1], dist[1:]
    M1 = lo_d.size
    x = grid.x
    gap_left = x - grid.x_min           # |z| reaching the left box edge
    gap_right = grid.x_max - x
    zl = gap_left[:, None] + lo_d[None, :]
    zh = gap_left[:, None] + hi_d[None, :]
    left = mu.side_mass(np.maximum(zl, r), np.maximum(zh, r))
    zl = gap_right[:, None] + lo_d[None, :]
    zh = gap_right[:, None] + hi_d[None, :]
    right = mu.side_mass(np.maximum(zl, r), np.maximum(zh, r))
    F_out = np.concatenate([left, right], axis=1)
    F_in = np.zeros_like(F_out)
    F_in[0, 0] = kappa
    F_in[N - 1, M1] = kappa

    width = hi_d - lo_d
    rep = lo_d + 0.5 * np.where(np.isinf(width), np.r_[dx, width[:-1]], width)
    far_mid = np.concatenate([grid.x_min - rep, grid.x_max + rep])
    far_width = np.concatenate([width, width])
    beyond = tail_mass_split(mu, mu.tail_cutoff)[1] if (mu.atoms or mu.pieces) else 0.0
    for arr in (W, K_out, K_in, F_out, F_in, far_mid, far_width):
        arr.setflags(write=False)
    return JumpStencil(grid, r, kappa, W, K_out, K_in, F_out, F_in, far_mid, far_width, beyond)


# ------------------------------------------------------------ public operators

def _result(phi: GridFunction, values: np.ndarray) -> GridFunction:
    return GridFunction(phi.grid, values, t=phi.t)


def apply_outer(mu: LevyMeasure, r: float, phi: GridFunction) -> GridFunction:
    """L^{>=r}[phi] on every box cell (restrict with ``grid.interior`` as needed)."""
    st = stencil(mu, phi.grid, r)
    return _result(phi, st.apply(phi.values, st.far_values(phi), "outer"))


def apply_inner(mu: LevyMeasure, r: float, phi: GridFunction) -> GridFunction:
    """(sigma_r^2 / 2) D^2_h phi with closure values beyond the box edge."""
    st = stencil(mu, phi.grid, r)
    return _result(phi, st.apply(phi.values, st.far_values(phi), "inner"))


def apply_full(mu: LevyMeasure, phi: GridFunction, r: float | None = None) -> GridFunction:
    st = stencil(mu, phi.grid, r)
    return _result(phi, st.apply(phi.values, st.far_values(phi), "full"))


def bilinear_form(mu: LevyMeasure, r: float | None, phi: GridFunction, psi: GridFunction,
                  part: str = "full") -> GridFunction:
    """Pointwise B[phi, psi]; the short-jump part is (sigma_r^2/2) times the averaged
    product of one-sided differences."""
    st = stencil(mu, phi.grid, r)
    vals = st.bilinear(phi.values, st.far_values(phi), psi.values, st.far_values(psi), part)
    return _result(phi, vals)


def bilinear_integral(mu: LevyMeasure, r: float | None, phi: GridFunction, psi: GridFunction,
                      weight: np.ndarray | None = None, part: str = "full") -> float:
    """int_R B[phi, psi] * weight for phi, psi vanishing outside the box.

    Without a weight (weight = 1 on all of R), the far cells contribute
    1/2 sum_i e_i phi_i psi_i dx, with e_i the exit rate of cell i.  A weight
    given on box cells is taken to vanish outside the box.
    """
    st = stencil(mu, phi.grid, r)
    dx = phi.grid.dx
    zero = np.zeros(st.far_mid.size)
    b = st.bilinear(phi.values, zero, psi.values, zero, part)
    if weight is not None:
        return float(np.sum(b * weight) * dx)
    _, F = st.weights(part)
    return float(np.sum(b) * dx + 0.5 * np.sum(F.sum(axis=1) * phi.values * psi.values) * dx)


def energy(mu: LevyMeasure, r: float | None, phi: GridFunction) -> float:
    return bilinear_integral(mu, r, phi, phi)


def lp_norm_R(mu: LevyMeasure, phi: GridFunction, p: float, r: float | None = None,
              part: str = "full") -> float:
    """||L[phi]||_{L^p(R)} for phi vanishing outside the box, far cells included."""
    st = stencil(mu, phi.grid, r)
    zero = np.zeros(st.far_mid.size)
    box = np.abs(st.apply(phi.values, zero, part))
    ext = np.abs(st.apply_exterior(phi.values, part))
    finite = np.isfinite(st.far_width)
    dx = phi.grid.dx
    if math.isinf(p):
        return float(max(box.max(initial=0.0), ext[finite].max(initial=0.0)))
    total = np.sum(box ** p) * dx + np.sum(ext[finite] ** p * st.far_width[finite])
    if p == 1:
        total += np.sum(ext[~finite])
    return float(total ** (1.0 / p))


def lp_norm_box(values: np.ndarray, grid: Grid, p: float) -> float:
    v = np.abs(np.asarray(values, dtype=float))
    if math.isinf(p):
        return float(v.max(initial=0.0))
    return float((np.sum(v ** p) * grid.dx) ** (1.0 / p))


def remainder_bound(mu: LevyMeasure, phi: GridFunction, r: float | None = None) -> float:
    """2 ||phi||_inf * mu(|z| >= tail cutoff): error of freezing the closure beyond the cutoff."""
    st = stencil(mu, phi.grid, r)
    sup = max(float(np.max(np.abs(phi.values))),
              float(np.max(np.abs(st.far_values(phi)), initial=0.0)))
    return 2.0 * sup * st.tail_beyond


# ------------------------------------------------------- two-variable forms

def _shift2(A: np.ndarray, sx: int, sy: int) -> np.ndarray:
    """A(x + sx, y + sy) with zero fill outside the array."""
    out = np.zeros_like(A)
    n0, n1 = A.shape
    xs = slice(max(0, -sx), min(n0, n0 - sx))
    ys = slice(max(0, -sy), min(n1, n1 - sy))
    xd = slice(max(0, sx), min(n0, n0 + sx))
    yd = slice(max(0, sy), min(n1, n1 + sy))
    out[xs, ys] = A[xd, yd]
    return out


def tensor_offsets(mu: LevyMeasure, grid: Grid, r: float | None = None,
                   max_offset: int | None = None) -> list[tuple[int, float]]:
    """Signed lattice offsets with their weights (box jumps plus the kappa jumps)."""
    st = stencil(mu, grid, r)
    D = grid.N - 1 if max_offset is None else int(max_offset)
    out = []
    for d in range(1, D + 1):
        w = float(st.W[d]) + (st.kappa if d == 1 else 0.0)
        if w > 0:
            out += [(d, w), (-d, w)]
    return out


def _form2(offsets, f_shift, g_shift, f, g):
    acc = np.zeros_like(f)
    for d, w in offsets:
        acc += w * (f_shift(f, d) - f) * (g_shift(g, d) - g)
    return 0.5 * acc


_sx = lambda A, d: _shift2(A, d, 0)
_sy = lambda A, d: _shift2(A, 0, d)
_sxy = lambda A, d: _shift2(A, d, d)


def cross_forms(offsets, phi2d: np.ndarray, psi2d: np.ndarray):
    """(B_{x,x+y}, B_{y,x+y}, B_{x,y}) of two-variable lattice functions.

    Arrays must be zero-padded by at least the largest offset wherever psi
    is nonzero; values beyond the array are read as zero.
    """
    phi2d = np.asarray(phi2d, dtype=float)
    psi2d = np.asarray(psi2d, dtype=float)
    return (_form2(offsets, _sx, _sxy, phi2d, psi2d),
            _form2(offsets, _sy, _sxy, phi2d, psi2d),
            _form2(offsets, _sx, _sy, phi2d, psi2d))


def diagonal_form(offsets, phi2d, psi2d):
    """B_{x+y}: jumps along the diagonal (x + z, y + z)."""
    return _form2(offsets, _sxy, _sxy, np.asarray(phi2d, float), np.asarray(psi2d, float))


def partial_form(offsets, phi2d, psi2d, axis: str):
    """B_x or B_y: jumps in one variable only."""
    s = _sx if axis == "x" else _sy
    return _form2(offsets, s, s, np.asarray(phi2d, float), np.asarray(psi2d, float))
