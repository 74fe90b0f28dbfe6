"""Data presets and named scenarios.

A scenario is a plain dict of INI-style sections (strings only), so the
same description feeds the CLI config parser and the test suite.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Callable

import numpy as np

from .solver import ExteriorData, constant_exterior

# ------------------------------------------------------------ initial data

def riemann(left: float, right: float, x0: float = 0.0) -> Callable:
    def u(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < x0, float(left), float(right))
    return u


def bump(amp: float = 1.0, center: float = 0.0, width: float = 0.5) -> Callable:
    """amp * cos^2(pi (x - center) / (2 width)) on |x - center| < width."""
    def u(x):
        s = (np.asarray(x, dtype=float) - center) / width
        return np.where(np.abs(s) < 1, amp * np.cos(0.5 * math.pi * s) ** 2, 0.0)
    return u


def constant(c: float) -> Callable:
    return lambda x: np.full_like(np.asarray(x, dtype=float), float(c))


def wave(mean: float, amp: float, k: float, omega: float = 0.0) -> Callable:
    """(t, x) -> mean + amp sin(k x - omega t)."""
    return lambda t, x: mean + amp * np.sin(k * np.asarray(x, dtype=float) - omega * t)


# ----------------------------------------------------------- exterior data

def riemann_exterior(left: float, right: float, x0: float = 0.0) -> ExteriorData:
    """Piecewise constant extension; the jump sits inside the domain, so only the
    exterior (where the closure is read) is smooth."""
    u = riemann(left, right, x0)
    return ExteriorData(lambda t, x: u(x), name=f"riemann({left:g},{right:g},{x0:g})")


def wave_exterior(mean: float, amp: float, k: float, omega: float = 0.0) -> ExteriorData:
    f = wave(mean, amp, k, omega)
    return ExteriorData(
        f,
        d_t=lambda t, x: -amp * omega * np.cos(k * np.asarray(x, dtype=float) - omega * t),
        d_x=lambda t, x: amp * k * np.cos(k * np.asarray(x, dtype=float) - omega * t),
        lip_t=abs(amp * omega), lip_x=abs(amp * k),
        name=f"wave({mean:g},{amp:g},{k:g},{omega:g})")


def bump_exterior(amp: float, center: float, width: float) -> ExteriorData:
    u = bump(amp, center, width)

    def dx(t, x):
        s = (np.asarray(x, dtype=float) - center) / width
        return np.where(np.abs(s) < 1,
                        -amp * math.pi / (2 * width) * np.sin(math.pi * s), 0.0)

    return ExteriorData(lambda t, x: u(x), d_x=dx, lip_x=abs(amp) * math.pi / (2 * width),
                        name=f"bump({amp:g},{center:g},{width:g})")


# ---------------------------------------------------------------- presets

_BASE = {
    "grid": {"N": "200", "a": "-1", "b": "1", "collar": "0.5"},
    "output": {"dir": "out"},
    "verify": {"entropy": "true", "energy": "false", "boundary_integrability": "false",
               "boundary_condition": "false"},
}


def _preset(name, T, measure, nonlin, data, verify=None, **extra):
    sec = {k: dict(v) for k, v in _BASE.items()}
    sec["scenario"] = {"name": name, "T": str(T), "path": "direct", "seed": "0"}
    sec["measure"] = measure
    sec["nonlinearity"] = nonlin
    sec["data"] = data
    if verify:
        sec["verify"].update(verify)
    for k, v in extra.items():
        sec.setdefault(k, {}).update(v)
    return sec


PRESETS: dict[str, dict[str, dict[str, str]]] = {
    "constant": _preset(
        "constant", 0.5, {"kind": "fractional", "alpha": "1"},
        {"flux": "burgers", "diffusion": "identity"},
        {"u0": "constant", "u0_value": "0.7", "uc": "constant", "uc_value": "0.7"},
        {"energy": "true", "boundary_integrability": "true"}),
    "burgers-riemann": _preset(
        "burgers-riemann", 1.0, {"kind": "zero"},
        {"flux": "burgers", "diffusion": "zero"},
        {"u0": "riemann", "u0_left": "1", "u0_right": "0", "u0_x0": "0",
         "uc": "riemann", "uc_left": "1", "uc_right": "0", "uc_x0": "0"},
        {"boundary_condition": "true"}),
    "fractional-heat": _preset(
        "fractional-heat", 1.0, {"kind": "fractional", "alpha": "1"},
        {"flux": "zero", "diffusion": "identity"},
        {"u0": "bump", "u0_amp": "1", "u0_center": "0", "u0_width": "0.5",
         "uc": "constant", "uc_value": "0"},
        {"energy": "true", "boundary_integrability": "true"}),
    "burgers-fractional": _preset(
        "burgers-fractional", 1.0, {"kind": "fractional", "alpha": "0.5"},
        {"flux": "burgers", "diffusion": "identity"},
        {"u0": "bump", "u0_amp": "1", "u0_center": "0", "u0_width": "0.5",
         "uc": "constant", "uc_value": "0"},
        {"energy": "true", "boundary_integrability": "true"}),
    "stefan": _preset(
        "stefan", 1.0, {"kind": "fractional", "alpha": "1"},
        {"flux": "burgers", "diffusion": "stefan", "L": "0.2"},
        {"u0": "bump", "u0_amp": "1", "u0_center": "0", "u0_width": "0.5",
         "uc": "wave", "uc_mean": "0.3", "uc_amp": "0.2", "uc_k": "1.5707963267948966",
         "uc_omega": "3.141592653589793"},
        {"energy": "true", "boundary_integrability": "true"}),
    "inflow-transport": _preset(
        "inflow-transport", 0.5, {"kind": "zero"},
        {"flux": "linear", "c": "1", "diffusion": "zero"},
        {"u0": "wave", "u0_mean": "0.5", "u0_amp": "0.4", "u0_k": "3.141592653589793",
         "uc": "wave", "uc_mean": "0.5", "uc_amp": "0.4", "uc_k": "3.141592653589793",
         "uc_omega": "3.141592653589793"},
        {"boundary_condition": "true"}),
    "outflow-shock": _preset(
        "outflow-shock", 1.0, {"kind": "zero"},
        {"flux": "burgers", "diffusion": "zero"},
        {"u0": "riemann", "u0_left": "1", "u0_right": "0", "u0_x0": "0.3",
         "uc": "riemann", "uc_left": "1", "uc_right": "0", "uc_x0": "0"},
        {"boundary_condition": "true"}),
}


def preset(name: str) -> dict[str, dict[str, str]]:
    if name not in PRESETS:
        raise KeyError(f"unknown scenario {name!r}; known: {', '.join(sorted(PRESETS))}")
    return {k: dict(v) for k, v in PRESETS[name].items()}


def residual_constants() -> dict:
    """Calibrated C_res per scenario with the calibration record."""
    path = resources.files("nonlocal_bvp").joinpath("fixtures/c_res.json")
    return json.loads(path.read_text())


def residual_constant(name: str, default: float = 8.0) -> float:
    return float(residual_constants().get(name, {}).get("C_res", default))
