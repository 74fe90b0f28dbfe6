"""Sectioned key=value run configuration.

Values are kept as canonical strings so that a parsed config writes back
byte-identically; typed access goes through the ``get_*`` helpers, which
raise ``ConfigError`` anchored at the offending line.
"""

from __future__ import annotations

import configparser
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .grid import Grid
from .levy_measure import (InvalidMeasure, LevyMeasure, compound_poisson, dyadic, fractional,
                           tempered, zero_measure)
from .nonlinearities import (Nonlinearity, burgers, identity, linear, power, stefan,
                             zero_diffusion, zero_flux)
from . import scenarios
from .solver import ExteriorData, Problem

PATHS = ("direct", "fixed_point", "truncated_sequence", "vanishing_viscosity")
SECTIONS = ("scenario", "grid", "measure", "nonlinearity", "data", "ladder", "verify", "output")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _line_index(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> 1-based line number, plus (section, '') for headers."""
    out: dict[tuple[str, str], int] = {}
    section = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"^\[([^\]]+)\]$", line)
        if m:
            section = m.group(1).strip()
            out[(section, "")] = i
            continue
        m = re.match(r"^([^=:]+)[=:]", line)
        if m and section is not None:
            out[(section, m.group(1).strip().lower())] = i
    return out


@dataclass
class RunConfig:
    sections: dict[str, dict[str, str]]
    lines: dict[tuple[str, str], int] = field(default_factory=dict, compare=False)
    source: str = field(default="<config>", compare=False)

    def __post_init__(self):
        self.sections = {s: {k.lower(): str(v) for k, v in kv.items()}
                         for s, kv in self.sections.items()}

    # ---------------- construction

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None, strict=True)
        cp.optionxform = str.lower
        try:
            cp.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None),
                              source) from exc
        lines = _line_index(text)
        for s in cp.sections():
            if s not in SECTIONS:
                raise ConfigError(f"unknown section [{s}]", lines.get((s, "")), source)
        secs = {s: {k: v.strip() for k, v in cp[s].items()} for s in cp.sections()}
        cfg = cls(secs, lines, source)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", None, str(p)) from exc
        return cls.from_text(text, str(p))

    @classmethod
    def from_preset(cls, name: str, **overrides: dict[str, str]) -> "RunConfig":
        secs = scenarios.preset(name)
        for s, kv in overrides.items():
            secs.setdefault(s, {}).update({k: str(v) for k, v in kv.items()})
        cfg = cls(secs, {}, f"<preset {name}>")
        cfg.validate()
        return cfg

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str.lower
        for s in SECTIONS:
            if s in self.sections:
                cp[s] = self.sections[s]
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    # ---------------- typed access

    def _err(self, section: str, key: str, msg: str) -> ConfigError:
        line = self.lines.get((section, key), self.lines.get((section, "")))
        return ConfigError(f"[{section}] {key}: {msg}", line, self.source)

    def has(self, section: str, key: str) -> bool:
        return key in self.sections.get(section, {})

    def get_str(self, section: str, key: str, default: str | None = None) -> str:
        val = self.sections.get(section, {}).get(key)
        if val is None:
            if default is None:
                raise self._err(section, key, "missing required key")
            return default
        return val

    def get_float(self, section: str, key: str, default: float | None = None,
                  lo: float | None = None, hi: float | None = None, open_lo: bool = False,
                  open_hi: bool = False) -> float:
        raw = self.get_str(section, key, None if default is None else repr(default))
        try:
            v = float(raw)
        except ValueError:
            raise self._err(section, key, f"expected a number, got {raw!r}") from None
        if not math.isfinite(v):
            raise self._err(section, key, "must be finite")
        if lo is not None and (v < lo or (open_lo and v == lo)):
            raise self._err(section, key, f"{v:g} is out of range "
                                          f"({'(' if open_lo else '['}{lo:g}, ...)")
        if hi is not None and (v > hi or (open_hi and v == hi)):
            raise self._err(section, key, f"{v:g} is out of range "
                                          f"(..., {hi:g}{')' if open_hi else ']'})")
        return v

    def get_int(self, section: str, key: str, default: int | None = None, lo: int | None = None
                ) -> int:
        raw = self.get_str(section, key, None if default is None else str(default))
        try:
            v = int(raw)
        except ValueError:
            raise self._err(section, key, f"expected an integer, got {raw!r}") from None
        if lo is not None and v < lo:
            raise self._err(section, key, f"{v} is below {lo}")
        return v

    def get_bool(self, section: str, key: str, default: bool = False) -> bool:
        raw = self.get_str(section, key, "true" if default else "false").lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise self._err(section, key, f"expected a boolean, got {raw!r}")

    def get_list(self, section: str, key: str, cast=float, default: str | None = None) -> list:
        raw = self.get_str(section, key, default)
        try:
            return [cast(x) for x in raw.replace(";", ",").split(",") if x.strip()]
        except ValueError:
            raise self._err(section, key, f"cannot parse list {raw!r}") from None

    def get_choice(self, section: str, key: str, choices, default: str | None = None) -> str:
        v = self.get_str(section, key, default)
        if v not in choices:
            raise self._err(section, key, f"{v!r} is not one of {', '.join(choices)}")
        return v

    # ---------------- semantic views

    @property
    def name(self) -> str:
        return self.get_str("scenario", "name", "custom")

    @property
    def path(self) -> str:
        return self.get_choice("scenario", "path", PATHS, "direct")

    @property
    def T(self) -> float:
        return self.get_float("scenario", "t", None, lo=0.0, open_lo=True)

    @property
    def seed(self) -> int:
        return self.get_int("scenario", "seed", 0, lo=0)

    def grid(self) -> Grid:
        N = self.get_int("grid", "n", 200, lo=4)
        a = self.get_float("grid", "a", -1.0)
        b = self.get_float("grid", "b", 1.0)
        if not b > a:
            raise self._err("grid", "b", "need b > a")
        collar = self.get_float("grid", "collar", 0.5, lo=0.0, open_lo=True)
        try:
            return Grid.around(a, b, N, collar)
        except ValueError as exc:
            raise self._err("grid", "n", str(exc)) from None

    def measure(self) -> LevyMeasure:
        kind = self.get_choice("measure", "kind",
                               ("zero", "fractional", "tempered", "compound_poisson", "dyadic"),
                               "zero")
        try:
            if kind == "zero":
                return zero_measure()
            if kind in ("fractional", "tempered"):
                alpha = self.get_float("measure", "alpha", None, lo=0.0, hi=2.0, open_lo=True,
                                       open_hi=True)
                if kind == "fractional":
                    return fractional(alpha)
                return tempered(alpha, self.get_float("measure", "lam", None, lo=0.0,
                                                      open_lo=True))
            if kind == "dyadic":
                return dyadic(self.get_int("measure", "levels", 64, lo=1))
            pairs = []
            for item in self.get_str("measure", "atoms").split(","):
                try:
                    z, w = (float(s) for s in item.split(":"))
                except ValueError:
                    raise self._err("measure", "atoms",
                                    f"expected z:w pairs, got {item.strip()!r}") from None
                pairs.append((z, w))
            return compound_poisson(pairs)
        except InvalidMeasure as exc:
            raise self._err("measure", "kind", str(exc)) from None

    def nonlinearity(self) -> Nonlinearity:
        fk = self.get_choice("nonlinearity", "flux", ("burgers", "linear", "zero"), "zero")
        f = {"burgers": burgers, "zero": zero_flux}.get(fk)
        flux = linear(self.get_float("nonlinearity", "c", 1.0)) if fk == "linear" else f()
        bk = self.get_choice("nonlinearity", "diffusion", ("identity", "power", "stefan", "zero"),
                             "zero")
        if bk == "power":
            b = power(self.get_float("nonlinearity", "m", None, lo=1.0))
        elif bk == "stefan":
            b = stefan(self.get_float("nonlinearity", "l", 0.0, lo=0.0))
        else:
            b = identity() if bk == "identity" else zero_diffusion()
        return Nonlinearity(flux, b)

    def _profile(self, prefix: str):
        kinds = ("constant", "riemann", "bump", "wave")
        kind = self.get_choice("data", prefix, kinds)
        g = lambda k, d=None: self.get_float("data", f"{prefix}_{k}", d)  # noqa: E731
        if kind == "constant":
            return kind, (g("value", 0.0),)
        if kind == "riemann":
            return kind, (g("left"), g("right"), g("x0", 0.0))
        if kind == "bump":
            w = self.get_float("data", f"{prefix}_width", 0.5, lo=0.0, open_lo=True)
            return kind, (g("amp", 1.0), g("center", 0.0), w)
        return kind, (g("mean", 0.0), g("amp", 1.0), g("k", math.pi), g("omega", 0.0))

    def initial(self):
        kind, args = self._profile("u0")
        if kind == "wave":
            f = scenarios.wave(*args)
            return lambda x: f(0.0, x)
        return {"constant": scenarios.constant, "riemann": scenarios.riemann,
                "bump": scenarios.bump}[kind](*args)

    def exterior(self) -> ExteriorData:
        kind, args = self._profile("uc")
        return {"constant": scenarios.constant_exterior, "riemann": scenarios.riemann_exterior,
                "bump": scenarios.bump_exterior, "wave": scenarios.wave_exterior}[kind](*args)

    def problem(self, N: int | None = None, marks=()) -> Problem:
        g = self.grid()
        if N is not None:
            try:
                g = Grid.around(g.a, g.b, N, g.collar / (g.b - g.a))
            except ValueError as exc:
                raise ConfigError(str(exc), None, self.source) from None
        return Problem(g, self.nonlinearity(), self.measure(), self.initial(), self.exterior(),
                       self.T, marks=tuple(marks), name=self.name)

    def validate(self) -> None:
        """Touch every typed view so that errors surface at load time."""
        _ = self.name, self.path, self.T, self.seed
        self.grid()
        self.measure()
        self.nonlinearity()
        self.initial()
        self.exterior()
        for key in ("entropy", "energy", "boundary_integrability", "boundary_condition"):
            self.get_bool("verify", key, False)
        if self.has("verify", "c_res"):
            self.get_float("verify", "c_res", lo=0.0, open_lo=True)
        if self.has("ladder", "n"):
            ns = self.get_list("ladder", "n", int)
            if not ns or min(ns) < 1:
                raise self._err("ladder", "n", "ladder entries must be positive integers")
        if self.has("ladder", "grids"):
            self.get_list("ladder", "grids", int)
        if self.has("ladder", "alpha"):
            self.get_float("ladder", "alpha", lo=0.0, hi=2.0, open_lo=True, open_hi=True)
