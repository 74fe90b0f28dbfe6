"""Fluxes, diffusions and the entropy-pair algebra built on them.

Each flux carries closed forms of its Engquist-Osher halves f+ and f-, and
each diffusion carries its antiderivative, so the energy density
H(u, k) = int_k^u (b(s) - b(k)) ds is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

Array = np.ndarray


def sgn_plus(s):
    return (np.asarray(s) > 0).astype(float)


def sgn_minus(s):
    return -(np.asarray(s) < 0).astype(float)


# ---------------------------------------------------------------- fluxes

@dataclass(frozen=True)
class Flux:
    name: str
    c: float = 0.0

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.name == "burgers":
            return 0.5 * u * u
        if self.name == "linear":
            return self.c * u
        return np.zeros_like(u)

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        if self.name == "burgers":
            return u.copy()
        return np.full_like(u, self.c if self.name == "linear" else 0.0)

    def plus(self, u):
        """f+(u) = f(0) + int_0^u max(f', 0)."""
        u = np.asarray(u, dtype=float)
        if self.name == "burgers":
            return 0.5 * np.maximum(u, 0.0) ** 2
        if self.name == "linear":
            return max(self.c, 0.0) * u
        return np.zeros_like(u)

    def minus(self, u):
        """f-(u) = int_0^u min(f', 0)."""
        u = np.asarray(u, dtype=float)
        if self.name == "burgers":
            return 0.5 * np.minimum(u, 0.0) ** 2
        if self.name == "linear":
            return min(self.c, 0.0) * u
        return np.zeros_like(u)

    def lipschitz(self, bound: float) -> float:
        """Lipschitz constant on [-bound, bound]."""
        if self.name == "burgers":
            return float(bound)
        return abs(self.c) if self.name == "linear" else 0.0


def burgers() -> Flux:
    return Flux("burgers")


def linear(c: float) -> Flux:
    return Flux("linear", float(c))


def zero_flux() -> Flux:
    return Flux("zero")


# ------------------------------------------------------------- diffusions

@dataclass(frozen=True)
class Diffusion:
    """Nondecreasing b with b(0) = 0.

    ``identity``: b(u) = u; ``power``: |u|^(m-1) u; ``stefan``: max(u - L, 0)
    (L >= 0); ``zero``: b = 0.
    """

    name: str
    m: float = 1.0
    L: float = 0.0

    def __post_init__(self):
        if self.name == "power" and not self.m >= 1.0:
            raise ValueError("power diffusion needs m >= 1 to stay Lipschitz")
        if self.name == "stefan" and not self.L >= 0.0:
            raise ValueError("stefan threshold must be nonnegative so that b(0) = 0")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.name == "identity":
            return u.copy()
        if self.name == "power":
            return np.abs(u) ** (self.m - 1.0) * u
        if self.name == "stefan":
            return np.maximum(u - self.L, 0.0)
        return np.zeros_like(u)

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        if self.name == "identity":
            return np.ones_like(u)
        if self.name == "power":
            return self.m * np.abs(u) ** (self.m - 1.0)
        if self.name == "stefan":
            return (u > self.L).astype(float)
        return np.zeros_like(u)

    def antiderivative(self, u):
        """B with B' = b, B(0) = 0."""
        u = np.asarray(u, dtype=float)
        if self.name == "identity":
            return 0.5 * u * u
        if self.name == "power":
            return np.abs(u) ** (self.m + 1.0) / (self.m + 1.0)
        if self.name == "stefan":
            return 0.5 * np.maximum(u - self.L, 0.0) ** 2
        return np.zeros_like(u)

    def lipschitz(self, bound: float) -> float:
        if self.name == "power":
            return self.m * bound ** (self.m - 1.0)
        return 0.0 if self.name == "zero" else 1.0

    def derivative_tv(self, bound: float) -> float:
        """|b'|_TV on [-bound, bound]."""
        if self.name == "power" and self.m > 1.0:
            return 2.0 * self.m * bound ** (self.m - 1.0)
        if self.name == "stefan":
            return 1.0 if self.L < bound else 0.0
        return 0.0

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"


def identity() -> Diffusion:
    return Diffusion("identity")


def power(m: float) -> Diffusion:
    return Diffusion("power", m=float(m))


def stefan(L: float) -> Diffusion:
    return Diffusion("stefan", L=float(L))


def zero_diffusion() -> Diffusion:
    return Diffusion("zero")


@dataclass(frozen=True)
class Nonlinearity:
    f: Flux
    b: Diffusion

    def __post_init__(self):
        if abs(float(self.f(0.0))) > 0 or abs(float(self.b(0.0))) > 0:
            raise ValueError("nonlinearities must vanish at zero")

    # -------- semi-Kruzkov pairs

    def semi_kruzkov(self, u, k, sign: int):
        """((u-k)^+-, F^+-(u, k)) for sign = +1 or -1."""
        u = np.asarray(u, dtype=float)
        k = np.asarray(k, dtype=float)
        s = sgn_plus(u - k) if sign > 0 else sgn_minus(u - k)
        eta = np.maximum(u - k, 0.0) if sign > 0 else np.maximum(k - u, 0.0)
        return eta, s * (self.f(u) - self.f(k))

    def kruzkov_flux(self, u, k):
        return self.semi_kruzkov(u, k, +1)[1] + self.semi_kruzkov(u, k, -1)[1]

    def boundary_pairs(self, u, uc, k):
        """(Fcal, Sigma) from their defining three-term forms."""
        F = self.kruzkov_flux
        b = self.b
        Fcal = F(u, uc) + F(u, k) - F(uc, k)
        Sigma = (np.abs(b(u) - b(uc)) + np.abs(b(u) - b(k)) - np.abs(b(uc) - b(k)))
        return Fcal, Sigma

    def boundary_pairs_two_term(self, u, uc, k):
        """(Fcal, Sigma) from the two-term forms with uc v+ k = max, uc v- k = min."""
        hi = np.maximum(uc, k)
        lo = np.minimum(uc, k)
        b = self.b
        Fcal = 2.0 * (self.semi_kruzkov(u, hi, +1)[1] + self.semi_kruzkov(u, lo, -1)[1])
        Sigma = 2.0 * (np.maximum(b(u) - b(hi), 0.0) + np.maximum(b(lo) - b(u), 0.0))
        return Fcal, Sigma

    def energy_density(self, u, k):
        """H(u, k) = B(u) - B(k) - b(k)(u - k) >= 0."""
        u = np.asarray(u, dtype=float)
        k = np.asarray(k, dtype=float)
        B = self.b.antiderivative
        return np.maximum(B(u) - B(k) - self.b(k) * (u - k), 0.0)

    def eo_flux(self, uL, uR):
        return self.f.plus(uL) + self.f.minus(uR)


def eo_flux(f: Flux, uL, uR):
    """Engquist-Osher numerical flux f+(uL) + f-(uR)."""
    return f.plus(uL) + f.minus(uR)


def piecewise_linear(knots, values) -> Callable[[Array], Array]:
    """Piecewise-linear function through (knots, values), extended linearly."""
    kn = np.asarray(knots, dtype=float)
    va = np.asarray(values, dtype=float)
    s_left = (va[1] - va[0]) / (kn[1] - kn[0])
    s_right = (va[-1] - va[-2]) / (kn[-1] - kn[-2])

    def h(u):
        u = np.asarray(u, dtype=float)
        out = np.interp(u, kn, va)
        out = np.where(u < kn[0], va[0] + s_left * (u - kn[0]), out)
        return np.where(u > kn[-1], va[-1] + s_right * (u - kn[-1]), out)

    return h


def piecewise_linear_budget(knots, values) -> float:
    """||h'||_inf + |h'|_TV for the piecewise-linear h through the knots."""
    slopes = np.diff(np.asarray(values, float)) / np.diff(np.asarray(knots, float))
    return float(np.max(np.abs(slopes)) + np.sum(np.abs(np.diff(slopes))))


def invariant_range(*arrays) -> tuple[float, float]:
    lo = min(float(np.min(a)) for a in arrays)
    hi = max(float(np.max(a)) for a in arrays)
    return lo, hi


def bound_of(lo: float, hi: float) -> float:
    return max(abs(lo), abs(hi), math.ulp(1.0))
