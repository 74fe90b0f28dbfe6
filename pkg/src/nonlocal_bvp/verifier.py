"""Numerical certificates for the a priori estimates of entropy solutions.

Every check reads a finished field and produces records of the form
``lhs <= rhs + tol``.  Space integrals are midpoint sums over cells, time
integrals left Riemann sums over the stored levels.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .grid import Grid
from .levy_measure import LevyMeasure
from .nonlinearities import Nonlinearity
from .nonlocal_ops import stencil
from .solver import Problem, SolutionField

# ------------------------------------------------------------ smooth pieces

def smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
        out = a / (a + b)
    return np.where(s <= 0, 0.0, np.where(s >= 1, 1.0, out))


def smooth_step_prime(s):
    s = np.asarray(s, dtype=float)
    inside = (s > 0) & (s < 1)
    sc = np.where(inside, s, 0.5)
    a = np.exp(-1.0 / sc)
    b = np.exp(-1.0 / (1.0 - sc))
    da = a / sc ** 2
    db = -b / (1.0 - sc) ** 2
    val = (da * (a + b) - a * (da + db)) / (a + b) ** 2
    return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class Bump:
    """exp(1 - 1/(1 - s^2)) with s = (x - center) / width, peak value 1."""

    center: float
    width: float

    def _s(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.width

    def __call__(self, x):
        s = self._s(x)
        inside = np.abs(s) < 1
        q = np.where(inside, 1.0 - s * s, 1.0)
        return np.where(inside, np.exp(1.0 - 1.0 / q), 0.0)

    def d1(self, x):
        s = self._s(x)
        inside = np.abs(s) < 1
        q = np.where(inside, 1.0 - s * s, 1.0)
        return np.where(inside, np.exp(1.0 - 1.0 / q) * (-2.0 * s / q ** 2) / self.width, 0.0)

    def d2(self, x):
        s = self._s(x)
        inside = np.abs(s) < 1
        q = np.where(inside, 1.0 - s * s, 1.0)
        e = np.exp(1.0 - 1.0 / q)
        g1 = -2.0 * s / q ** 2
        g2 = -2.0 / q ** 2 - 8.0 * s * s / q ** 3
        return np.where(inside, e * (g1 * g1 + g2) / self.width ** 2, 0.0)


def inner_operator(mu: LevyMeasure, r: float, beta: Callable, x: np.ndarray,
                   nodes: int = 48) -> np.ndarray:
    """L^{<r}[beta](x) = int_{0<|z|<r} (beta(x+z) - beta(x)) dmu, by Gauss quadrature.

    The symmetrised second difference (beta(x+z) + beta(x-z) - 2 beta(x)) / z^2
    is smooth in z, so power and tempered pieces use Gauss-Jacobi nodes for
    the weight z^(1-alpha).
    """
    x = np.asarray(x, dtype=float)[:, None]

    def second_diff(z):
        return (beta(x + z) + beta(x - z) - 2.0 * beta(x)) / (z * z)

    out = np.zeros(x.shape[0])
    zs, ws = mu.atom_arrays()
    for z, w in zip(zs, ws):
        if z < r:
            out += w * (z * z) * second_diff(np.array([z]))[:, 0]
    for pc in mu.pieces:
        lo, hi = pc.effective_lo, min(pc.effective_hi, r)
        if not hi > lo:
            continue
        if pc.family in ("power", "tempered"):
            # int_lo^hi g(z) z^2 * scale z^(-1-alpha) [e^(-lam z)] dz, weight z^(1-alpha) on [0, hi]
            if lo > 0:
                segs = [(lo, hi)]
                t, w = np.polynomial.legendre.leggauss(nodes)
                z = 0.5 * (hi - lo) * (t + 1) + lo
                wz = 0.5 * (hi - lo) * w * z ** (1.0 - pc.alpha)
            else:
                t, w = special.roots_jacobi(nodes, 0.0, 1.0 - pc.alpha)
                z = 0.5 * hi * (t + 1.0)
                wz = w * (0.5 * hi) ** (2.0 - pc.alpha)
            if pc.family == "tempered":
                wz = wz * np.exp(-pc.lam * z)
            out += pc.scale * (second_diff(z[None, :]) @ wz)
        else:
            edges = np.geomspace(max(lo, 1e-12), hi, 25)
            t, w = np.polynomial.legendre.leggauss(16)
            for a, b in zip(edges[:-1], edges[1:]):
                z = 0.5 * (b - a) * (t + 1) + a
                wz = 0.5 * (b - a) * w * z * z * pc.rho(z)
                out += second_diff(z[None, :]) @ wz
    return out


# ------------------------------------------------------------ test functions

@dataclass(frozen=True)
class TestFunction:
    """phi(t, x) = theta(t) beta(x); theta falls smoothly from 1 at t=0 to 0 at tau."""

    tau: float
    beta: Bump

    def theta(self, t):
        return smooth_step((self.tau - np.asarray(t, dtype=float)) / self.tau)

    def theta_prime(self, t):
        return -smooth_step_prime((self.tau - np.asarray(t, dtype=float)) / self.tau) / self.tau

    def c2_norm(self) -> float:
        xs = np.linspace(self.beta.center - self.beta.width, self.beta.center + self.beta.width,
                         2001)
        return float(max(np.max(np.abs(self.beta(xs))), np.max(np.abs(self.beta.d1(xs))),
                         np.max(np.abs(self.beta.d2(xs)))))

    def label(self) -> str:
        return f"tau={self.tau:g},c={self.beta.center:g},w={self.beta.width:g}"


@dataclass
class TestFunctionFamily:
    members: list[TestFunction]

    @classmethod
    def standard(cls, grid: Grid, T: float) -> "TestFunctionFamily":
        """Three temporal cut-offs times four bumps: two inside, two across the endpoints."""
        a, b = grid.a, grid.b
        L = b - a
        w_in = 0.2 * L
        w_edge = min(0.15 * L, 0.8 * grid.collar) if grid.collar > 0 else 0.15 * L
        bumps = [Bump(a + 0.3 * L, w_in), Bump(a + 0.65 * L, w_in), Bump(a, w_edge),
                 Bump(b, w_edge)]
        return cls([TestFunction(tau, bb) for tau in (0.25 * T, 0.5 * T, 0.75 * T)
                    for bb in bumps])

    def __len__(self):
        return len(self.members)


def standard_k_grid(lo: float, hi: float) -> np.ndarray:
    """17 equispaced values over [lo, hi] plus one value beyond each end."""
    w = hi - lo if hi > lo else 1.0
    return np.concatenate([[lo - 0.25 * w], np.linspace(lo, hi, 17), [hi + 0.25 * w]])


@dataclass
class BoundaryLayer:
    """Inner layers vanish off the domain; outer layers equal 1 on its closure."""

    a: float
    b: float
    deltas: Sequence[float]

    @classmethod
    def ladder(cls, grid: Grid, count: int = 6, largest: float | None = None) -> "BoundaryLayer":
        """Geometric ladder from ``largest`` (default a fifth of the domain) down to 4 dx."""
        top = 0.2 * (grid.b - grid.a) if largest is None else largest
        low = 4.0 * grid.dx
        if top <= low:
            raise ValueError("grid too coarse for a boundary-layer ladder")
        return cls(grid.a, grid.b, list(np.geomspace(top, low, count)))

    def inner(self, delta: float, x):
        x = np.asarray(x, dtype=float)
        return smooth_step((x - self.a) / delta) * smooth_step((self.b - x) / delta)

    def inner_prime(self, delta: float, x):
        x = np.asarray(x, dtype=float)
        sa, sb = (x - self.a) / delta, (self.b - x) / delta
        return (smooth_step_prime(sa) * smooth_step(sb) - smooth_step(sa) * smooth_step_prime(sb)) \
            / delta

    def outer(self, delta: float, x):
        x = np.asarray(x, dtype=float)
        dist = np.maximum(np.maximum(self.a - x, x - self.b), 0.0)
        return smooth_step(1.0 - dist / delta)


# ------------------------------------------------------------------ reports

@dataclass
class CheckRecord:
    name: str
    lhs: float
    rhs: float
    tol: float
    anchor: str
    detail: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs + self.tol - self.lhs

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.rhs + self.tol)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(slack=self.slack, passed=self.passed)
        return d


@dataclass
class VerificationReport:
    check: str
    records: list[CheckRecord] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def worst(self) -> CheckRecord | None:
        return min(self.records, key=lambda r: r.slack) if self.records else None

    def summary(self) -> dict:
        w = self.worst
        return {"check": self.check, "passed": self.passed, "records": len(self.records),
                "failures": sum(not r.passed for r in self.records),
                "worst_slack": None if w is None else w.slack,
                "worst": None if w is None else w.name, **self.notes}

    def lines(self) -> list[str]:
        out = []
        for r in self.records:
            out.append(f"{self.check} | {r.name} | lhs={r.lhs:.6e} rhs={r.rhs:.6e} "
                       f"tol={r.tol:.3e} slack={r.slack:.3e} | {'PASS' if r.passed else 'FAIL'}"
                       f" | {r.anchor}")
        return out


# ------------------------------------------------------------------ helpers

def _weights_t(field: SolutionField) -> np.ndarray:
    """Left Riemann weights over the stored levels (last level has weight 0)."""
    w = np.zeros(field.times.size)
    w[:-1] = np.diff(field.times)
    return w


def _lip_range(field: SolutionField) -> float:
    lo, hi = field.info["data_range"]
    return max(abs(lo), abs(hi))


def _far_b(p: Problem, st, times) -> np.ndarray:
    return np.stack([p.nonlin.b(p.uc(t, st.far_mid)) for t in times])


# ------------------------------------------------------- entropy inequalities

def check_entropy_inequalities(field: SolutionField, family: TestFunctionFamily,
                               k_grid: Sequence[float], r: float | None = None,
                               C_res: float = 8.0) -> VerificationReport:
    """Semi-Kruzkov inequalities for all admissible (sign, k, phi)."""
    p = field.problem
    g = field.grid
    nl = p.nonlin
    r = g.dx if r is None else max(float(r), g.dx)
    st = stencil(p.mu, g, r)
    x = g.x
    dx = g.dx
    interior = g.interior
    ext = ~interior
    times = field.times
    wt = _weights_t(field)
    U = field.U
    bU = nl.b(U)
    diffuse = not nl.b.is_zero and bool(p.mu.atoms or p.mu.pieces)
    if diffuse:
        farb = _far_b(p, st, times)
        Lout = np.stack([st.apply(bU[n], farb[n], "outer") for n in range(times.size)])
    else:
        Lout = np.zeros_like(U)
    bound = _lip_range(field)
    dt_max = float(np.max(np.diff(times)))
    tol = C_res * (dx + dt_max)
    u0 = U[0]
    uc_a = p.uc(times, np.full(times.size, g.a))
    uc_b = p.uc(times, np.full(times.size, g.b))
    # exterior data on the support of the bumps: box exterior cells and far cells
    uc_ext = np.stack([p.uc(t, x[ext]) for t in times])
    far_pts = st.far_mid
    uc_far = np.stack([p.uc(t, far_pts) for t in times])

    report = VerificationReport("entropy_inequalities", notes={
        "C_res": C_res, "dx": dx, "dt": dt_max, "r": r, "pairs": 0, "skipped": 0})
    for tf in family.members:
        beta = tf.beta(x)
        dbeta = tf.beta.d1(x)
        theta = tf.theta(times)
        dtheta = tf.theta_prime(times)
        inner_beta = inner_operator(p.mu, r, tf.beta, x) if diffuse else np.zeros_like(x)
        beta_ext = beta[ext]
        beta_far = tf.beta(far_pts)
        tmask = theta > 0
        for sign in (+1, -1):
            for k in k_grid:
                # admissibility: (b(u^c) - b(k))^+- phi = 0 outside the domain
                gap_ext = nl.b(uc_ext) - nl.b(k)
                gap_far = nl.b(uc_far) - nl.b(k)
                if sign < 0:
                    gap_ext, gap_far = -gap_ext, -gap_far
                viol = max(float(np.max((np.maximum(gap_ext, 0) * beta_ext)[tmask], initial=0.0)),
                           float(np.max((np.maximum(gap_far, 0) * beta_far)[tmask], initial=0.0)))
                if viol > 0.0:
                    report.notes["skipped"] += 1
                    continue
                report.notes["pairs"] += 1
                eta, F = nl.semi_kruzkov(U, k, sign)
                s = (U - k > 0) if sign > 0 else -(U - k < 0).astype(float)
                bgap = nl.b(U) - nl.b(k)
                bpos = np.maximum(bgap, 0.0) if sign > 0 else np.maximum(-bgap, 0.0)
                # integrals over Q: interior cells only
                I1 = -np.sum(wt[:, None] * (eta * dtheta[:, None] * beta
                                            + F * theta[:, None] * dbeta)[:, interior]) * dx
                I2 = -np.sum(wt[:, None] * (Lout * s * theta[:, None] * beta)[:, interior]) * dx
                # over M = (0,T) x R: box cells suffice since the bumps sit in the box
                I3 = -np.sum(wt[:, None] * bpos * theta[:, None] * inner_beta[None, :]) * dx
                lhs = float(I1 + I2 + I3)
                init = float(np.sum((np.maximum(u0 - k, 0) if sign > 0 else np.maximum(k - u0, 0))
                                    [interior] * beta[interior]) * dx)
                ca = np.maximum(uc_a - k, 0) if sign > 0 else np.maximum(k - uc_a, 0)
                cb = np.maximum(uc_b - k, 0) if sign > 0 else np.maximum(k - uc_b, 0)
                # Lipschitz constant over a range holding both the data and k
                L_f = nl.f.lipschitz(max(bound, abs(float(k))))
                bnd = L_f * float(np.sum(wt * theta * (ca * float(tf.beta(g.a))
                                                       + cb * float(tf.beta(g.b)))))
                report.records.append(CheckRecord(
                    f"{'+' if sign > 0 else '-'} k={k:.6g} {tf.label()}", lhs, init + bnd, tol,
                    "semi-Kruzkov entropy inequality"))
    return report


def required_residual_constant(report: VerificationReport) -> float:
    """Smallest C_res that would let every record of an entropy report pass."""
    h = report.notes["dx"] + report.notes["dt"]
    return max([(r.lhs - r.rhs) / h for r in report.records], default=0.0)


# -------------------------------------------------------------------- energy

def check_energy(field: SolutionField, p: Problem | None = None, rel: float = 0.05,
                 tol_abs: float = 1e-10) -> VerificationReport:
    """int_M B[w, w] <= int H(u0, u^c(0)) - int [(u - u^c) u^c_t + F(u, u^c) u^c_x] b'(u^c)
    + int_Q L[b(u^c)] w, with w = b(u) - b(u^c)."""
    p = field.problem if p is None else p
    g = field.grid
    nl = p.nonlin
    st = stencil(p.mu, g, p.r)
    x = g.x
    dx = g.dx
    inn = g.interior
    times = field.times
    wt = _weights_t(field)
    U = field.U
    lhs = 0.0
    transport = 0.0
    coupling = 0.0
    zero_far = np.zeros(st.far_mid.size)
    _, Fw = st.weights("full")
    exit_rate = Fw.sum(axis=1)
    diffuse = not nl.b.is_zero and bool(p.mu.atoms or p.mu.pieces)
    for n, t in enumerate(times):
        if wt[n] == 0.0:
            continue
        uc = p.uc(t, x)
        w = nl.b(U[n]) - nl.b(uc)
        w = np.where(inn, w, 0.0)
        bprime = nl.b.derivative(uc)
        Fc = nl.kruzkov_flux(U[n], uc)
        transport += wt[n] * float(np.sum(((U[n] - uc) * p.uc.dt(t, x) + Fc * p.uc.dx(t, x))
                                          * bprime * inn)) * dx
        if diffuse:
            e = st.bilinear(w, zero_far, w, zero_far)
            lhs += wt[n] * (float(np.sum(e)) + 0.5 * float(np.sum(exit_rate * w * w))) * dx
            Lbc = st.apply(nl.b(uc), nl.b(p.uc(t, st.far_mid)))
            coupling += wt[n] * float(np.sum(Lbc * w * inn)) * dx
    H0 = float(np.sum(nl.energy_density(U[0], p.uc(0.0, x))[inn])) * dx
    rhs = H0 - transport + coupling
    rec = CheckRecord("energy", lhs, rhs * (1.0 + rel) if rhs > 0 else rhs, tol_abs,
                      "energy estimate",
                      {"initial_H": H0, "transport": transport, "coupling": coupling,
                       "rhs_raw": rhs})
    return VerificationReport("energy", [rec])


# ----------------------------------------------------- boundary integrability

def exit_mass(mu: LevyMeasure, grid: Grid) -> np.ndarray:
    """mu({z : x_i + z outside (a, b)}) for every cell centre (inf off the domain)."""
    x = grid.x
    da = np.where(x > grid.a, x - grid.a, np.nan)
    db = np.where(x < grid.b, grid.b - x, np.nan)
    inside = grid.interior
    da = np.where(inside, da, 1.0)
    db = np.where(inside, db, 1.0)
    m = mu.side_mass(da, np.full_like(da, np.inf)) + mu.side_mass(db, np.full_like(db, np.inf))
    return np.where(inside, m, np.inf)


def boundary_constant(field: SolutionField, p: Problem, c_points: int = 33) -> dict:
    """The constant C bounding the boundary integral, with the sup over c sampled."""
    g = field.grid
    nl = p.nonlin
    st = stencil(p.mu, g, p.r)
    times = field.times
    wt = _weights_t(field)
    inn = g.interior
    x = g.x
    lo, hi = field.info["data_range"]
    T = float(times[-1])
    size = g.b - g.a
    L_f = nl.f.lipschitz(max(abs(lo), abs(hi)))
    L_uc = max(p.uc.lip_t, p.uc.lip_x)
    sup_u0 = float(np.max(np.abs(p.u0(x)[inn])))
    uc_all = np.stack([p.uc(t, np.concatenate([x, st.far_mid])) for t in times])
    sup_uc = float(np.max(np.abs(uc_all)))
    cs = np.linspace(lo, hi, c_points)
    best = 0.0
    diffuse = not nl.b.is_zero and bool(p.mu.atoms or p.mu.pieces)
    if diffuse:
        N = g.N
        for c in cs:
            for op in (np.minimum, np.maximum):
                total = 0.0
                for n in range(times.size):
                    if wt[n] == 0.0:
                        continue
                    v = nl.b(op(uc_all[n], c))
                    Lv = st.apply(v[:N], v[N:])
                    total += wt[n] * float(np.sum(np.abs(Lv[inn]))) * g.dx
                best = max(best, total)
    first = size * T * (1.0 + L_f) * L_uc
    second = size * (sup_u0 + sup_uc)
    return {"C": first + second + best, "lipschitz_part": first, "data_part": second,
            "sup_c_part": best}


def check_boundary_integrability(field: SolutionField, p: Problem | None = None,
                                 c_points: int = 33) -> VerificationReport:
    p = field.problem if p is None else p
    g = field.grid
    nl = p.nonlin
    inn = g.interior
    e = exit_mass(p.mu, g)
    wt = _weights_t(field)
    lhs = 0.0
    for n, t in enumerate(field.times):
        if wt[n] == 0.0:
            continue
        w = np.abs(nl.b(field.U[n][inn]) - nl.b(p.uc(t, g.x[inn])))
        lhs += wt[n] * float(np.sum(w * e[inn])) * g.dx
    parts = boundary_constant(field, p, c_points)
    rec = CheckRecord("boundary_integrability", lhs, parts["C"], 0.0,
                      "boundary integrability", parts)
    return VerificationReport("boundary_integrability", [rec])


# --------------------------------------------------------- boundary condition

class PairIdentityFailure(AssertionError):
    pass


def boundary_pair_gate(nl: Nonlinearity, lo: float, hi: float, trials: int = 2000,
                       seed: int = 0, tol: float = 1e-12) -> None:
    """The three-term and two-term forms of (Fcal, Sigma) must agree."""
    rng = np.random.default_rng(seed)
    span = max(hi - lo, 1.0)
    u, uc, k = rng.uniform(lo - 0.5 * span, hi + 0.5 * span, (3, trials))
    F1, S1 = nl.boundary_pairs(u, uc, k)
    F2, S2 = nl.boundary_pairs_two_term(u, uc, k)
    scale = 1.0 + np.abs(F1) + np.abs(S1)
    if np.any(np.abs(F1 - F2) > tol * scale) or np.any(np.abs(S1 - S2) > tol * scale):
        raise PairIdentityFailure("boundary entropy pair identity violated")


def _short_bilinear(st, S: np.ndarray, z: np.ndarray) -> np.ndarray:
    """B^{<r}[S_n, z] for every row of S (functions vanishing beyond the box).

    The short-jump part only couples neighbours and the box edges, so it is
    evaluated from the nonzero stencil entries instead of dense matrices.
    """
    K, F = st.weights("inner")
    i, j = np.nonzero(K)
    w = K[i, j]
    out = np.zeros_like(S)
    np.add.at(out.T, i, (0.5 * w * (z[j] - z[i]))[:, None] * (S[:, j] - S[:, i]).T)
    out += 0.5 * F.sum(axis=1)[None, :] * S * z[None, :]
    return out


def check_boundary_condition(field: SolutionField, p: Problem | None, layers: BoundaryLayer,
                             k_grid: Sequence[float], family: TestFunctionFamily,
                             r: float | None = None, rel_tol: float = 0.05
                             ) -> VerificationReport:
    """B_delta = int_Q Fcal zeta'_delta phi - int_M B^{<r}[Sigma, zeta_delta] phi along the
    delta ladder; pass when the minimum over the last three deltas is <= tol_bc."""
    p = field.problem if p is None else p
    g = field.grid
    deltas = list(layers.deltas)
    if any(b >= a for a, b in zip(deltas[:-1], deltas[1:])):
        raise ValueError("delta ladder must be decreasing")
    if deltas[-1] < 4.0 * g.dx * (1 - 1e-12):
        raise ValueError(f"delta ladder reaches {deltas[-1]:g} < 4 dx = {4 * g.dx:g}")
    nl = p.nonlin
    lo, hi = field.info["data_range"]
    boundary_pair_gate(nl, lo, hi)
    st = stencil(p.mu, g, r)
    x = g.x
    dx = g.dx
    inn = g.interior
    times = field.times
    wt = _weights_t(field)
    U = field.U
    UC = np.stack([p.uc(t, x) for t in times])
    diffuse = not nl.b.is_zero and bool(p.mu.atoms or p.mu.pieces)
    report = VerificationReport("boundary_condition", notes={"deltas": deltas})
    zetas = [layers.inner(d, x) for d in deltas]
    dzetas = [layers.inner_prime(d, x) for d in deltas]
    for k in k_grid:
        Fc, Sg = nl.boundary_pairs(U, UC, k)
        fsup = float(np.max(np.abs(Fc[:, inn]), initial=0.0))
        # B^{<r}[Sigma, zeta] per time level and delta
        if diffuse:
            Bs = [_short_bilinear(st, Sg, z) for z in zetas]
        else:
            Bs = [np.zeros_like(U) for _ in zetas]
        for tf in family.members:
            phi = tf.theta(times)[:, None] * tf.beta(x)[None, :]
            vals = []
            for dz, B in zip(dzetas, Bs):
                flux_part = float(np.sum(wt[:, None] * (Fc * dz[None, :] * phi)[:, inn])) * dx
                diff_part = float(np.sum(wt[:, None] * B * phi)) * dx
                vals.append(flux_part - diff_part)
            scale = float(np.sum(wt * np.max(phi, axis=1)))
            tol_bc = rel_tol * fsup * scale
            tail = min(vals[-3:])
            report.records.append(CheckRecord(
                f"k={k:.6g} {tf.label()}", tail, 0.0, tol_bc, "boundary condition",
                {"ladder": vals}))
    return report


# ---------------------------------------------------------------- mean lemma

def random_v_shape(rng: np.random.Generator, R: float, L: float):
    """Random piecewise-linear h >= 0, h(0)=0, nonincreasing on [-R,0], nondecreasing on
    [0,R], with largest slope exactly L."""
    nl, nr = rng.integers(1, 6, size=2)
    kl = np.sort(rng.uniform(-R, 0, nl - 1)) if nl > 1 else np.zeros(0)
    kr = np.sort(rng.uniform(0, R, nr - 1)) if nr > 1 else np.zeros(0)
    knots = np.concatenate([[-R], kl, [0.0], kr, [R]])
    slopes_l = rng.uniform(0, 1, nl)
    slopes_r = rng.uniform(0, 1, nr)
    top = max(slopes_l.max(), slopes_r.max())
    slopes_l *= L / top
    slopes_r *= L / top
    vals = np.zeros(knots.size)
    i0 = nl
    for j in range(i0 + 1, knots.size):
        vals[j] = vals[j - 1] + slopes_r[j - i0 - 1] * (knots[j] - knots[j - 1])
    for j in range(i0 - 1, -1, -1):
        vals[j] = vals[j + 1] + slopes_l[i0 - 1 - j] * (knots[j + 1] - knots[j])
    return knots, vals


def mean_lemma_trial(points, weights, knots, vals, L: float, R: float) -> tuple[float, float]:
    """(h(sbar)^2, L R hbar) for the discrete probability measure (points, weights)."""
    sbar = float(np.dot(weights, points))
    hbar = float(np.dot(weights, np.interp(points, knots, vals)))
    hs = float(np.interp(sbar, knots, vals))
    return hs * hs, L * R * hbar


def check_mean_lemma(trials: int = 10_000, seed: int = 0) -> VerificationReport:
    rng = np.random.default_rng(seed)
    report = VerificationReport("mean_lemma", notes={"trials": trials, "seed": seed})
    worst = None
    fails = 0
    for i in range(trials):
        R = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
        L = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
        m = int(rng.integers(1, 12))
        pts = rng.uniform(-R, R, m)
        if rng.random() < 0.2:
            pts[0] = 0.0
        wts = rng.dirichlet(np.ones(m))
        knots, vals = random_v_shape(rng, R, L)
        lhs, rhs = mean_lemma_trial(pts, wts, knots, vals, L, R)
        rec = CheckRecord(f"trial {i}", lhs, rhs, 1e-12, "mean lemma for V-shaped h")
        if not rec.passed:
            fails += 1
            report.records.append(rec)
        if worst is None or rec.slack < worst.slack:
            worst = rec
    if worst is not None and fails == 0:
        report.records.append(worst)
    report.notes["violations"] = fails
    return report
