"""Symmetric Lévy measures on the real line.

A measure is a finite list of symmetric atom pairs plus a finite list of
density pieces, each piece being an even density restricted to a window
``lo <= |z| < hi``.  Truncation, sums and rescaling only manipulate
windows and scales, so closed forms survive them.

All quantities returned by the public functions account for both sides
of the real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, reduce
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, special

DEFAULT_TAIL_CUTOFF = 1.0e3

# density pieces whose integrals need quadrature are tabulated on this log grid
_TAB_ZMIN = 1.0e-12
_TAB_PER_DECADE = 64
_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


class InvalidMeasure(ValueError):
    """The data does not describe a Lévy measure."""


class IncomparableMeasures(ValueError):
    """Two measures cannot be compared without re-sampling one of them."""


def fractional_constant(alpha: float) -> float:
    """Normalisation making the symbol of the fractional measure equal |xi|**alpha."""
    return (alpha * 2.0 ** (alpha - 1.0) * special.gamma((1.0 + alpha) / 2.0)
            / (math.sqrt(math.pi) * special.gamma(1.0 - alpha / 2.0)))


def _one_minus_cos_integral(x: float, alpha: float) -> float:
    """J(x) = int_0^x (1 - cos t) t^(-1-alpha) dt for x in [0, inf]."""
    if x <= 0.0:
        return 0.0
    x0 = min(x, 8.0)
    total, term_sign = 0.0, 1.0
    for n in range(1, 60):
        term = x0 ** (2 * n - alpha) / (math.factorial(2 * n) * (2 * n - alpha))
        total += term_sign * term
        term_sign = -term_sign
        if term < 1e-18 * max(abs(total), 1e-300):
            break
    if x <= 8.0:
        return total
    if math.isinf(x):
        # the closed form of the full integral is 1/(2 C)
        return 0.5 / fractional_constant(alpha)
    power = (x0 ** (-alpha) - x ** (-alpha)) / alpha
    osc, _ = integrate.quad(lambda t: t ** (-1.0 - alpha), x0, x,
                            weight="cos", wvar=1.0, limit=400, epsabs=1e-15)
    return total + power - osc


@dataclass(frozen=True)
class DensityPiece:
    """Even density ``scale * rho(|z|)`` restricted to ``lo <= |z| < hi``.

    ``family`` is one of ``power`` (rho = z^(-1-alpha)), ``tempered``
    (rho = exp(-lam z) z^(-1-alpha)), ``table`` (piecewise linear through
    ``table``, zero outside it) or ``callable`` (``func``).
    """

    family: str
    scale: float = 1.0
    alpha: float = 0.0
    lam: float = 0.0
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    lo: float = 0.0
    hi: float = math.inf

    def rho(self, z):
        z = np.abs(np.asarray(z, dtype=float))
        inside = (z >= self.lo) & (z < self.hi) & (z > 0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.family == "power":
                val = z ** (-1.0 - self.alpha)
            elif self.family == "tempered":
                val = np.exp(-self.lam * z) * z ** (-1.0 - self.alpha)
            elif self.family == "table":
                zt, rt = self.table
                val = np.interp(z, zt, rt, left=0.0, right=0.0)
            else:
                val = np.asarray(self.func(z), dtype=float)
        return np.where(inside, self.scale * val, 0.0)

    @property
    def effective_hi(self) -> float:
        if self.family == "table":
            return min(self.hi, self.table[0][-1])
        return self.hi

    @property
    def effective_lo(self) -> float:
        if self.family == "table":
            return max(self.lo, self.table[0][0])
        return self.lo

    def integral(self, a, b, p: float):
        """One-sided int over [a, b) of z^p * density, vectorised in a and b."""
        a = np.maximum(np.asarray(a, dtype=float), self.effective_lo)
        b = np.minimum(np.asarray(b, dtype=float), self.effective_hi)
        empty = ~(b > a)
        a_s = np.where(empty, 1.0, a)
        b_s = np.where(empty, 1.0, b)
        if self.family == "power":
            q = p - self.alpha
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                if abs(q) < 1e-15:
                    val = np.log(b_s / a_s)
                else:
                    val = (np.where(np.isinf(b_s), 0.0 if q < 0 else np.inf, b_s ** q)
                           - a_s ** q) / q
            out = self.scale * val
        elif self.family == "table":
            out = self.scale * self._table_integral(a_s, b_s, p)
        else:
            upper = self._cumulative(p)
            out = upper(a_s) - upper(b_s)
        return np.where(empty, 0.0, out)

    def _table_integral(self, a, b, p):
        zt = np.asarray(self.table[0])
        rt = np.asarray(self.table[1])
        slope = np.diff(rt) / np.diff(zt)
        icpt = rt[:-1] - slope * zt[:-1]

        def prim(z, k):
            return icpt[k] * z ** (p + 1) / (p + 1) + slope[k] * z ** (p + 2) / (p + 2)

        seg_full = prim(zt[1:], np.arange(len(slope))) - prim(zt[:-1], np.arange(len(slope)))
        cum = np.concatenate([[0.0], np.cumsum(seg_full)])

        def cumulative(z):
            k = np.clip(np.searchsorted(zt, z, side="right") - 1, 0, len(slope) - 1)
            return cum[k] + prim(z, k) - prim(zt[k], k)

        return cumulative(b) - cumulative(a)

    def _cumulative(self, p: float):
        """Upper cumulative int_z^top for quadrature families (cached per p).

        Accumulating from the top keeps tail differences free of cancellation
        against the large near-origin mass.
        """
        cache = self.__dict__.setdefault("_cum_cache", {})
        if p in cache:
            return cache[p]
        lo = max(self.effective_lo, _TAB_ZMIN)
        top = self.effective_hi
        if math.isinf(top):
            if self.family == "tempered":
                top = max(lo * 10.0, 60.0 / self.lam + 1.0)
            else:
                top = DEFAULT_TAIL_CUTOFF
        n_nodes = max(int(math.log10(top / lo) * _TAB_PER_DECADE), 16) + 1
        nodes = np.geomspace(lo, top, n_nodes)
        rho = self.rho

        def gl(a, b):
            a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
            mid = 0.5 * (a + b)[..., None]
            half = 0.5 * (b - a)[..., None]
            z = mid + half * _GL_X
            return np.sum(_GL_W * z ** p * rho(z), axis=-1) * half[..., 0]

        panel = gl(nodes[:-1], nodes[1:])
        upper = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])

        def cumulative(z):
            z = np.clip(np.asarray(z, float), lo, top)
            k = np.clip(np.searchsorted(nodes, z, side="right") - 1, 0, len(nodes) - 2)
            return upper[k + 1] + gl(z, nodes[k + 1])

        cache[p] = cumulative
        return cumulative

    def symbol(self, xi: float) -> float:
        """Two-sided int (1 - cos(xi z)) * density dz over the window."""
        xi = abs(float(xi))
        if xi == 0.0:
            return 0.0
        if self.family == "power":
            lo, hi = self.lo, self.hi
            jl = _one_minus_cos_integral(xi * lo, self.alpha) if lo > 0 else 0.0
            jh = _one_minus_cos_integral(xi * hi, self.alpha)
            return 2.0 * self.scale * xi ** self.alpha * (jh - jl)
        lo, hi = self.effective_lo, self.effective_hi
        if math.isinf(hi):
            # exp(-750) underflows, so the tempered range is finite in practice; the
            # infinite-range cosine quadrature crashes for tiny xi
            hi = max(lo, 750.0 / self.lam) if self.family == "tempered" else DEFAULT_TAIL_CUTOFF
        if not hi > lo:
            return 0.0
        # 8 / xi overflows for subnormal xi; 1e8 is far past any density's bulk
        split = min(hi, max(lo, min(8.0 / xi, 1e8)))
        smooth = 0.0
        if split > lo:
            start = max(lo, _TAB_ZMIN)
            edges = np.geomspace(start, split, max(int(math.log10(split / start) * 8), 1) + 1)
            for a, b in zip(edges[:-1], edges[1:]):
                val, _ = integrate.quad(
                    lambda z: 2.0 * np.sin(0.5 * xi * z) ** 2 * float(self.rho(z)), a, b,
                    limit=200, epsabs=0.0, epsrel=1e-12)
                smooth += val
        osc = 0.0
        if hi > split:
            mass = float(self.integral(split, hi, 0.0))
            if self.family == "table":
                zt = self.table[0]
                pts = [split] + [z for z in zt if split < z < hi] + [hi]
                cos_part = 0.0
                for a, b in zip(pts[:-1], pts[1:]):
                    val, _ = integrate.quad(lambda z: float(self.rho(z)), a, b,
                                            weight="cos", wvar=xi, limit=400, epsabs=1e-15)
                    cos_part += val
            else:
                cos_part, _ = integrate.quad(lambda z: float(self.rho(z)), split, hi,
                                             weight="cos", wvar=xi, limit=800, epsabs=1e-15)
            osc = mass - cos_part
        return 2.0 * (smooth + osc)

    def restricted(self, lo: float, hi: float) -> "DensityPiece":
        return replace(self, lo=max(self.lo, lo), hi=min(self.hi, hi))

    @property
    def is_empty(self) -> bool:
        return not self.effective_hi > self.effective_lo


@dataclass(frozen=True)
class LevyMeasure:
    """Symmetric Lévy measure: atom pairs at +-z with weight w per side, plus densities."""

    atoms: tuple[tuple[float, float], ...] = ()
    pieces: tuple[DensityPiece, ...] = ()
    tail_cutoff: float = DEFAULT_TAIL_CUTOFF
    kind: str = "custom"
    params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        for z, w in self.atoms:
            if not (z > 0 and w > 0 and math.isfinite(z) and math.isfinite(w)):
                raise InvalidMeasure(f"atom ({z}, {w}) needs positive location and weight")
        if not self.tail_cutoff > 0:
            raise InvalidMeasure("tail cutoff must be positive")

    @property
    def param(self) -> dict[str, float]:
        return dict(self.params)

    def density(self, z):
        z = np.asarray(z, dtype=float)
        return sum((pc.rho(z) for pc in self.pieces), np.zeros_like(z))

    def atom_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.atoms:
            return np.zeros(0), np.zeros(0)
        z, w = np.array(self.atoms, dtype=float).T
        return z, w

    def side_integral(self, a, b, p: float):
        """One-sided int over lo<=z<hi of z^p d(mu) for the density part, vectorised."""
        out = np.zeros(np.broadcast(np.asarray(a), np.asarray(b)).shape)
        for pc in self.pieces:
            out = out + pc.integral(a, b, p)
        return out

    def side_mass(self, a, b):
        """One-sided mass of [a, b), atoms included, vectorised in a and b (0 < a)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = self.side_integral(a, b, 0.0)
        z, w = self.atom_arrays()
        if z.size:
            inside = (z >= a[..., None]) & (z < b[..., None])
            out = out + np.sum(np.where(inside, w, 0.0), axis=-1)
        return out

    @cached_property
    def is_finite(self) -> bool:
        return all(pc.family == "table" or pc.effective_lo > 0 for pc in self.pieces)

    def scaled(self, factor: float) -> "LevyMeasure":
        return replace(
            self,
            atoms=tuple((z, w * factor) for z, w in self.atoms),
            pieces=tuple(replace(pc, scale=pc.scale * factor) for pc in self.pieces),
            params=self.params + (("scale", factor),))

    def __add__(self, other: "LevyMeasure") -> "LevyMeasure":
        merged: dict[float, float] = {}
        for z, w in self.atoms + other.atoms:
            merged[z] = merged.get(z, 0.0) + w
        return LevyMeasure(atoms=tuple(sorted(merged.items())),
                           pieces=self.pieces + other.pieces,
                           tail_cutoff=min(self.tail_cutoff, other.tail_cutoff),
                           kind="custom")


# ----------------------------------------------------------------- factories

def zero_measure() -> LevyMeasure:
    return LevyMeasure(kind="zero")


def fractional(alpha: float, tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> LevyMeasure:
    if not 0.0 < alpha < 2.0:
        raise InvalidMeasure(f"fractional order alpha={alpha} must lie in (0, 2)")
    piece = DensityPiece("power", scale=fractional_constant(alpha), alpha=alpha)
    return LevyMeasure(pieces=(piece,), tail_cutoff=tail_cutoff, kind="fractional",
                       params=(("alpha", alpha),))


def tempered(alpha: float, lam: float, tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> LevyMeasure:
    if not 0.0 < alpha < 2.0:
        raise InvalidMeasure(f"tempered order alpha={alpha} must lie in (0, 2)")
    if not lam > 0:
        raise InvalidMeasure("tempering rate must be positive")
    piece = DensityPiece("tempered", scale=fractional_constant(alpha), alpha=alpha, lam=lam)
    return LevyMeasure(pieces=(piece,), tail_cutoff=tail_cutoff, kind="tempered",
                       params=(("alpha", alpha), ("lam", lam)))


def compound_poisson(atoms: Sequence[tuple[float, float]],
                     tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> LevyMeasure:
    """Finite measure made of atom pairs at +-z with weight w on each side."""
    return LevyMeasure(atoms=tuple((float(z), float(w)) for z, w in atoms),
                       tail_cutoff=tail_cutoff, kind="compound_poisson")


def dyadic(levels: int = 64, tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> LevyMeasure:
    """Weights 2^(k-1) at +-2^-k; ``levels`` terms stand in for the infinite sum."""
    atoms = tuple((2.0 ** -k, 2.0 ** (k - 1)) for k in range(levels))
    return LevyMeasure(atoms=atoms, tail_cutoff=tail_cutoff, kind="dyadic",
                       params=(("levels", float(levels)),))


def custom(atoms: Sequence[tuple[float, float]] = (),
           table: tuple[Sequence[float], Sequence[float]] | None = None,
           func: Callable | None = None,
           tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> LevyMeasure:
    """Atom list plus an optional tabulated (z > 0, rho) or callable density."""
    pieces = []
    if table is not None:
        zt = np.asarray(table[0], float)
        rt = np.asarray(table[1], float)
        if zt.ndim != 1 or zt.shape != rt.shape or zt.size < 2:
            raise InvalidMeasure("density table needs two equal-length columns")
        if np.any(zt <= 0) or np.any(np.diff(zt) <= 0):
            raise InvalidMeasure("density table abscissae must be positive and increasing")
        if np.any(rt < 0):
            raise InvalidMeasure("density values must be nonnegative")
        pieces.append(DensityPiece("table", table=(tuple(zt), tuple(rt))))
    if func is not None:
        pieces.append(DensityPiece("callable", func=func, hi=tail_cutoff))
    mu = LevyMeasure(atoms=tuple((float(z), float(w)) for z, w in atoms),
                     pieces=tuple(pieces), tail_cutoff=tail_cutoff, kind="custom")
    levy_integrand_mass(mu)  # raises on divergence
    return mu


def read_density_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    if data.shape[1] != 2:
        raise InvalidMeasure(f"{path}: expected two columns z, rho")
    return data[:, 0], data[:, 1]


# ---------------------------------------------------------------- operations

def small_moment(mu: LevyMeasure, r: float) -> float:
    """sigma_r^2 = int_{|z|<r} z^2 dmu."""
    if not r > 0:
        raise ValueError("r must be positive")
    z, w = mu.atom_arrays()
    atom_part = 2.0 * float(np.sum(np.where(z < r, w * z * z, 0.0)))
    dens = sum(2.0 * float(pc.integral(0.0, r, 2.0)) for pc in mu.pieces)
    return atom_part + dens


def tail_mass(mu: LevyMeasure, r: float) -> float:
    """mu({|z| >= r}) including the density tail beyond the cutoff."""
    inside, beyond = tail_mass_split(mu, r)
    return inside + beyond


def tail_mass_split(mu: LevyMeasure, r: float) -> tuple[float, float]:
    """(mass of r <= |z| < tail_cutoff, mass of |z| >= max(r, tail_cutoff))."""
    if not r > 0:
        raise ValueError("r must be positive")
    zc = mu.tail_cutoff
    z, w = mu.atom_arrays()
    near = 2.0 * float(np.sum(np.where((z >= r) & (z < zc), w, 0.0)))
    far = 2.0 * float(np.sum(np.where(z >= max(r, zc), w, 0.0)))
    for pc in mu.pieces:
        if r < zc:
            near += 2.0 * float(pc.integral(r, zc, 0.0))
        far += 2.0 * float(pc.integral(max(r, zc), math.inf, 0.0))
    return near, far


def total_mass(mu: LevyMeasure) -> float:
    if not mu.is_finite:
        return math.inf
    z, w = mu.atom_arrays()
    return 2.0 * float(np.sum(w)) + sum(2.0 * float(pc.integral(0.0, math.inf, 0.0))
                                        for pc in mu.pieces)


def levy_integrand_mass(mu: LevyMeasure) -> float:
    """int (|z|^2 ^ 1) dmu; raises InvalidMeasure when the integral diverges."""
    for pc in mu.pieces:
        if pc.family == "callable" and pc.effective_lo < 1e-6:
            probes = [2.0 * float(pc.integral(eps, min(1.0, pc.effective_hi), 2.0))
                      for eps in (1e-4, 1e-7, 1e-10)]
            if probes[2] - probes[1] > 2.0 * max(probes[1] - probes[0], 1e-14) + 1e-12:
                raise InvalidMeasure("int_{|z|<1} z^2 dmu grows without bound under refinement")
        if pc.family == "power" and pc.effective_lo == 0 and pc.alpha >= 2:
            raise InvalidMeasure("power density not integrable against z^2 at the origin")
    value = small_moment(mu, 1.0) + tail_mass(mu, 1.0)
    if not math.isfinite(value):
        raise InvalidMeasure("int (|z|^2 ^ 1) dmu is not finite")
    return value


def symbol(mu: LevyMeasure, xi: float) -> float:
    """m(xi) = int (1 - cos(xi z)) dmu(z)."""
    xi = abs(float(xi))
    if xi == 0.0:
        return 0.0
    z, w = mu.atom_arrays()
    atom_part = float(np.sum(4.0 * w * np.sin(0.5 * xi * z) ** 2))
    return atom_part + sum(pc.symbol(xi) for pc in mu.pieces)


def symbol_many(mu: LevyMeasure, xis) -> np.ndarray:
    xis = np.abs(np.asarray(xis, dtype=float))
    z, w = mu.atom_arrays()
    out = np.zeros_like(xis)
    if z.size:
        out += np.sum(4.0 * w * np.sin(0.5 * xis[..., None] * z) ** 2, axis=-1)
    for pc in mu.pieces:
        if pc.family == "power" and pc.lo == 0.0 and math.isinf(pc.hi):
            out += pc.scale / fractional_constant(pc.alpha) * xis ** pc.alpha
        else:
            out += np.array([pc.symbol(x) for x in xis.ravel()]).reshape(xis.shape)
    return out


def truncate(mu: LevyMeasure, r: float) -> tuple[LevyMeasure, LevyMeasure]:
    """Split into the parts supported in {|z| < r} and {|z| >= r}."""
    if not r > 0:
        raise ValueError("r must be positive")
    inner_atoms = tuple(a for a in mu.atoms if a[0] < r)
    outer_atoms = tuple(a for a in mu.atoms if a[0] >= r)
    inner_pieces = tuple(p for p in (pc.restricted(0.0, r) for pc in mu.pieces) if not p.is_empty)
    outer_pieces = tuple(p for p in (pc.restricted(r, math.inf) for pc in mu.pieces)
                         if not p.is_empty)
    params = mu.params + (("split", r),)
    inner = replace(mu, atoms=inner_atoms, pieces=inner_pieces, params=params)
    outer = replace(mu, atoms=outer_atoms, pieces=outer_pieces, params=params)
    return inner, outer


def _sign_breaks(pos: list[DensityPiece], neg: list[DensityPiece], a: float, b: float
                 ) -> list[float]:
    """Points in (a, b) where pos - neg changes sign, located on a dense log grid.

    Sign changes below 1e-12 or above 1e12 are ignored; the families here are
    monotone ratios of powers and exponentials that far out."""
    lo = max(a, 1e-12)
    hi = min(b, 1e12)
    if not hi > lo:
        return []
    zs = np.geomspace(lo * (1 + 1e-12), hi * (1 - 1e-12), 2001)

    def net(z):
        z = np.asarray(z, dtype=float)
        return sum((q.rho(z) for q in pos), np.zeros_like(z)) \
            - sum((q.rho(z) for q in neg), np.zeros_like(z))

    vals = net(zs)
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    sgn = np.where(np.abs(vals) <= 1e-13 * scale, 0.0, np.sign(vals))
    nz = np.flatnonzero(sgn)
    out = []
    for i, j in zip(nz[:-1], nz[1:]):
        if sgn[i] != sgn[j]:
            out.append(optimize.brentq(lambda z: float(net(z)), zs[i], zs[j], xtol=1e-15,
                                       rtol=4 * np.finfo(float).eps))
    return out


def measure_distance(mu_a: LevyMeasure, mu_b: LevyMeasure) -> float:
    """int (|z|^2 ^ 1) d|mu_a - mu_b|."""
    if mu_a == mu_b:
        return 0.0
    weights: dict[float, float] = {}
    for z, w in mu_a.atoms:
        weights[z] = weights.get(z, 0.0) + w
    for z, w in mu_b.atoms:
        weights[z] = weights.get(z, 0.0) - w
    dist = sum(2.0 * abs(w) * min(z * z, 1.0) for z, w in weights.items())

    tables = {pc.table for pc in mu_a.pieces + mu_b.pieces if pc.family == "table"}
    if len(tables) > 1:
        raise IncomparableMeasures("tabulated densities on different grids; re-sample one "
                                   "measure onto the other's table first")
    edges = {0.0, 1.0, math.inf}
    for pc in mu_a.pieces + mu_b.pieces:
        edges.update((pc.effective_lo, pc.effective_hi))
    if mu_a.pieces or mu_b.pieces:
        edges = sorted(e for e in edges if e >= 0.0)
        for a, b in zip(edges[:-1], edges[1:]):
            if not b > a:
                continue
            p = 2.0 if b <= 1.0 else 0.0
            pos = [pc for pc in mu_a.pieces if pc.effective_lo <= a and pc.effective_hi >= b]
            neg = [pc for pc in mu_b.pieces if pc.effective_lo <= a and pc.effective_hi >= b]
            cuts = [a, *_sign_breaks(pos, neg, a, b), b]
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                val = sum(float(pc.integral(lo, hi, p)) for pc in pos) \
                    - sum(float(pc.integral(lo, hi, p)) for pc in neg)
                dist += 2.0 * abs(val)
    return dist


def _atom_lattice_step(mu: LevyMeasure) -> float | None:
    """Largest g with every atom location an integer multiple of g (rational atoms only)."""
    if not mu.atoms or mu.pieces:
        return None
    fracs = [Fraction(z).limit_denominator(1 << 62) for z, _ in mu.atoms]
    if any(abs(float(f) - z) > 1e-15 * z for f, (z, _) in zip(fracs, mu.atoms)):
        return None
    num = reduce(math.gcd, (f.numerator * (reduce(math.lcm, (g.denominator for g in fracs))
                                           // f.denominator) for f in fracs))
    den = reduce(math.lcm, (g.denominator for g in fracs))
    return num / den


def compactness_scan(mu: LevyMeasure, R_ladder: Sequence[float],
                     samples_per_shell: int = 512) -> list[tuple[float, float]]:
    """Minimum of the sampled symbol over |xi| >= R for every R of the ladder.

    Samples are a uniform grid on each shell [R_i, R_{i+1}) (the last shell
    is [R_last, 2 R_last]) plus, for purely atomic measures on a rational
    lattice, every resonance 2 pi n / g in range, where the symbol vanishes.
    """
    R = [float(x) for x in R_ladder]
    if any(b <= a for a, b in zip(R[:-1], R[1:])):
        raise ValueError("R_ladder must be increasing")
    bounds = R + [2.0 * R[-1]]
    shell_min = []
    step = _atom_lattice_step(mu)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        xs = np.linspace(lo, hi, samples_per_shell, endpoint=False)
        if step is not None:
            period = 2.0 * math.pi / step
            n0, n1 = math.ceil(lo / period), math.floor(hi / period)
            if n1 >= n0:
                xs = np.concatenate([xs, period * np.arange(n0, min(n1, n0 + 4096) + 1)])
        shell_min.append(float(np.min(symbol_many(mu, xs))))
    mins = np.minimum.accumulate(np.array(shell_min)[::-1])[::-1]
    return [(r, float(m)) for r, m in zip(R, mins)]


def compactness_verdict(scan: list[tuple[float, float]], floor: float = 1e-6) -> str:
    """'for' when the minima keep increasing, 'against' when a late minimum sits below floor."""
    mins = [m for _, m in scan]
    if mins[-1] <= floor:
        return "against"
    if all(b > a for a, b in zip(mins[:-1], mins[1:])):
        return "for"
    return "inconclusive"


def describe(mu: LevyMeasure) -> dict:
    """Plain metadata for manifests."""
    return {
        "kind": mu.kind,
        "params": {k: v for k, v in mu.params},
        "atoms": len(mu.atoms),
        "density_pieces": [
            {"family": pc.family, "scale": pc.scale, "alpha": pc.alpha, "lam": pc.lam,
             "lo": pc.lo, "hi": pc.hi if math.isfinite(pc.hi) else "inf"}
            for pc in mu.pieces],
        "tail_cutoff": mu.tail_cutoff,
        "tail_beyond_cutoff": tail_mass_split(mu, mu.tail_cutoff)[1] if mu.atoms or mu.pieces
        else 0.0,
    }
