"""Command line entry point: run, verify, convergence, symbol, sequence.

Exit codes: 0 success, 1 a gated verification check failed, 2 invalid
configuration, 3 the solver could not certify a time step.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import verifier as V
from .config import ConfigError, RunConfig
from .levy_measure import compactness_scan, compactness_verdict, describe, symbol_many
from .scenarios import PRESETS, residual_constant
from .solver import (CertificateFailure, NotFiniteMeasure, SolutionField, l1_Q, l2_Q,
                     run_truncated_sequence, run_vanishing_viscosity, solve_direct,
                     solve_fixed_point)

log = logging.getLogger("nonlocal_bvp")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CERT = 0, 1, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}

ANCHORS = {
    "entropy_inequalities": "semi-Kruzkov entropy inequalities with exterior admissibility",
    "energy": "energy estimate for b(u) - b(u^c)",
    "boundary_integrability": "boundary integrability with its data constant",
    "boundary_condition": "nonlocal boundary condition functional along a boundary layer ladder",
    "mean_lemma": "mean lemma for V-shaped Lipschitz functions",
}


# ------------------------------------------------------------------- fields

def write_field_csv(field: SolutionField, path: Path) -> None:
    b = field.problem.nonlin.b
    x = field.grid.x
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "u", "b_of_u"])
        for t, row in zip(field.times, field.U):
            bu = b(row)
            for xi, ui, bi in zip(x, row, bu):
                w.writerow([repr(float(t)), repr(float(xi)), repr(float(ui)), repr(float(bi))])


def read_field_csv(path: Path, cfg: RunConfig) -> SolutionField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times = np.unique(data[:, 0])
    N = data.shape[0] // times.size
    if N * times.size != data.shape[0]:
        raise ValueError(f"{path}: rows do not form a time-major grid")
    p = cfg.problem(N=N)
    U = data[:, 2].reshape(times.size, N)
    if not np.allclose(data[:N, 1], p.grid.x, rtol=0, atol=1e-12):
        raise ValueError(f"{path}: cell centres do not match the configured grid")
    from .solver import _finish
    return _finish(p, times, U, path="stored")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# -------------------------------------------------------------- verification

def verify_field(cfg: RunConfig, field: SolutionField, seed: int) -> list[V.VerificationReport]:
    p = field.problem
    lo, hi = field.info["data_range"]
    family = V.TestFunctionFamily.standard(p.grid, p.T)
    k_grid = V.standard_k_grid(lo, hi)
    reports = []
    if cfg.get_bool("verify", "entropy", True):
        c_res = (cfg.get_float("verify", "c_res") if cfg.has("verify", "c_res")
                 else residual_constant(cfg.name))
        reports.append(V.check_entropy_inequalities(field, family, k_grid, C_res=c_res))
    if cfg.get_bool("verify", "energy", False):
        reports.append(V.check_energy(field, p))
    if cfg.get_bool("verify", "boundary_integrability", False):
        reports.append(V.check_boundary_integrability(field, p))
    if cfg.get_bool("verify", "boundary_condition", False):
        layers = V.BoundaryLayer.ladder(p.grid)
        reports.append(V.check_boundary_condition(field, p, layers, k_grid, family))
    if cfg.get_bool("verify", "mean_lemma", False):
        reports.append(V.check_mean_lemma(cfg.get_int("verify", "mean_lemma_trials", 1000),
                                          seed))
    return reports


def write_reports(reports, out: Path) -> None:
    lines = []
    for r in reports:
        lines.extend(r.lines())
        s = r.summary()
        lines.append(f"{r.check} | SUMMARY | {'PASS' if s['passed'] else 'FAIL'} | "
                     f"records={s['records']} failures={s['failures']}")
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    payload = {r.check: {"summary": r.summary(), "records": [x.as_dict() for x in r.records]}
               for r in reports}
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True,
                                                default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o).__name__)


def write_manifest(out: Path, cfg: RunConfig, field: SolutionField | None, seed: int,
                   reports=(), extra: dict | None = None) -> None:
    artifacts = {f.name: _sha256(f) for f in sorted(out.iterdir())
                 if f.is_file() and f.name != "manifest.json"}
    man = {
        "version": __version__,
        "scenario": cfg.name,
        "path": cfg.path,
        "seed": seed,
        "config": cfg.to_text(),
        "artifacts": artifacts,
        "checks": {r.check: {"anchor": ANCHORS.get(r.check, r.check), "passed": r.passed}
                   for r in reports},
    }
    if field is not None:
        g = field.grid
        man["grid"] = {"N": g.N, "dx": g.dx, "box": [g.x_min, g.x_max], "domain": [g.a, g.b]}
        man["steps"] = int(field.times.size - 1)
        man["measure"] = describe(field.problem.mu)
        man["info"] = {k: v for k, v in field.info.items() if k != "data_range"}
        man["data_range"] = list(field.info["data_range"])
    if extra:
        man.update(extra)
    (out / "manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True,
                                                  default=_json_default) + "\n")


# ------------------------------------------------------------------- solving

def _ladder(cfg: RunConfig, default: str) -> list[int]:
    return cfg.get_list("ladder", "n", int, default)


def solve(cfg: RunConfig) -> tuple[SolutionField, dict]:
    p = cfg.problem()
    path = cfg.path
    if path == "direct":
        return solve_direct(p), {}
    if path == "fixed_point":
        res = solve_fixed_point(p)
        return res.field, {"gaps": res.gaps, "converged": res.converged,
                           "factorial_bounds": [res.factorial_bound(k)
                                                for k in range(1, len(res.gaps) + 1)]}
    if path == "truncated_sequence":
        members = run_truncated_sequence(p, _ladder(cfg, "4,8,16,32,64"))
        gaps = [l2_Q(p.nonlin.b(a.field.U), p.nonlin.b(b.field.U), b.field)
                for a, b in zip(members[:-1], members[1:])]
        return members[-1].field, {"sequence": [
            {"n": m.n, "distance": m.distance, "absorbed": m.absorbed} for m in members],
            "l2_gaps": gaps}
    alpha = cfg.get_float("ladder", "alpha", 1.0)
    res = run_vanishing_viscosity(p, alpha, _ladder(cfg, "1,10,100"))
    return res.members[-1], {"viscosity": {"n": res.ns, "l1_to_hyperbolic": res.distances}}


def cmd_run(cfg: RunConfig, out: Path, seed: int, jobs: int) -> int:
    out.mkdir(parents=True, exist_ok=True)
    field, extra = solve(cfg)
    write_field_csv(field, out / "field.csv")
    (out / "config.ini").write_text(cfg.to_text())
    reports = verify_field(cfg, field, seed)
    if reports:
        write_reports(reports, out)
        for r in reports:
            log.info("%s: %s", r.check, "PASS" if r.passed else "FAIL")
    write_manifest(out, cfg, field, seed, reports, extra)
    print(f"{cfg.name}: {field.times.size - 1} steps on N={field.grid.N}; artifacts in {out}")
    for r in reports:
        print(f"  {r.check}: {'PASS' if r.passed else 'FAIL'}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path, seed: int, field_path: Path | None) -> int:
    path = field_path or out / "field.csv"
    field = read_field_csv(path, cfg)
    reports = verify_field(cfg, field, seed)
    out.mkdir(parents=True, exist_ok=True)
    write_reports(reports, out)
    failed = [r.check for r in reports if not r.passed]
    for r in reports:
        print(f"{r.check}: {'PASS' if r.passed else 'FAIL'}")
    return EXIT_CHECK if failed else EXIT_OK


def self_distances(cfg: RunConfig, grids: list[int], jobs: int = 1, marks: int = 16
                   ) -> list[dict]:
    """L1(Q) distances between successive refinements, coarse values injected into the fine
    grid, time integral by a left sum over ``marks`` common levels."""
    T = cfg.T
    common = [T * j / marks for j in range(1, marks)]

    def run(N):
        return solve_direct(cfg.problem(N=N, marks=common))

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        fields = list(pool.map(run, grids))
    ts = [0.0] + common
    rows = []
    for (Nc, fc), (Nf, ff) in zip(zip(grids[:-1], fields[:-1]), zip(grids[1:], fields[1:])):
        if Nf % Nc:
            raise ValueError("grid ladder must nest (each N divides the next)")
        rep = Nf // Nc
        gf = ff.grid
        total = 0.0
        for t in ts:
            uc = np.repeat(fc.at(t), rep)
            total += (T / marks) * float(np.sum(np.abs(ff.at(t) - uc)[gf.interior])) * gf.dx
        rows.append({"N_coarse": Nc, "N_fine": Nf, "l1_distance": total})
    for a, b in zip(rows[:-1], rows[1:]):
        if a["l1_distance"] > 0 and b["l1_distance"] > 0:
            b["order"] = math.log2(a["l1_distance"] / b["l1_distance"])
    return rows


def cmd_convergence(cfg: RunConfig, out: Path, jobs: int, grids: list[int] | None) -> int:
    grids = grids or cfg.get_list("ladder", "grids", int, "48,96,192,384")
    rows = self_distances(cfg, grids, jobs)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "convergence.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N_coarse", "N_fine", "l1_distance", "order"])
        for r in rows:
            w.writerow([r["N_coarse"], r["N_fine"], repr(r["l1_distance"]),
                        repr(r["order"]) if "order" in r else ""])
    print(f"{'N':>6} {'2N':>6} {'L1(Q) distance':>16} {'order':>7}")
    for r in rows:
        order = f"{r['order']:7.3f}" if "order" in r else "      -"
        print(f"{r['N_coarse']:6d} {r['N_fine']:6d} {r['l1_distance']:16.6e} {order}")
    return EXIT_OK


def cmd_symbol(cfg: RunConfig, out: Path, xi_max: float, count: int) -> int:
    mu = cfg.measure()
    xis = np.linspace(0.0, xi_max, count)
    m = symbol_many(mu, xis)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "symbol.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["xi", "m"])
        for a, b in zip(xis, m):
            w.writerow([repr(float(a)), repr(float(b))])
    ladder = [xi_max / 2 ** k for k in range(6, 0, -1)]
    scan = compactness_scan(mu, ladder)
    verdict = compactness_verdict(scan)
    summary = {"scan": scan, "verdict": verdict, "measure": describe(mu)}
    (out / "symbol_scan.json").write_text(json.dumps(summary, indent=2, sort_keys=True,
                                                     default=_json_default) + "\n")
    for R, v in scan:
        print(f"min m over |xi| >= {R:.4g}: {v:.6g}")
    print(f"compactness: {verdict}")
    return EXIT_OK


def cmd_sequence(cfg: RunConfig, out: Path) -> int:
    p = cfg.problem()
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    if cfg.path == "vanishing_viscosity":
        res = run_vanishing_viscosity(p, cfg.get_float("ladder", "alpha", 1.0),
                                      _ladder(cfg, "1,10,100"))
        for n, d in zip(res.ns, res.distances):
            rows.append({"n": n, "l1_to_hyperbolic": d})
    else:
        members = run_truncated_sequence(p, _ladder(cfg, "4,8,16,32,64"))
        prev = None
        for m in members:
            row = {"n": m.n, "measure_distance": m.distance, "absorbed": m.absorbed}
            if prev is not None:
                row["l2_gap_b"] = l2_Q(p.nonlin.b(prev.field.U), p.nonlin.b(m.field.U),
                                       m.field)
                row["l1_gap"] = l1_Q(prev.field.U, m.field.U, m.field)
            rows.append(row)
            prev = m
    keys = sorted({k for r in rows for k in r}, key=lambda k: (k != "n", k))
    with open(out / "sequence.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    for r in rows:
        print("  ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                        for k, v in r.items()))
    return EXIT_OK


# ---------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonlocal-bvp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="INI run configuration")
    src.add_argument("--scenario", choices=sorted(PRESETS), help="built-in preset")
    common.add_argument("--out", type=Path, default=None, help="artifact directory")
    common.add_argument("--seed", type=int, default=None, help="random seed (u64)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for ladders")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="solve and write artifacts")
    v = sub.add_parser("verify", parents=[common], help="re-check a stored field")
    v.add_argument("--field", type=Path, default=None, help="field CSV (default OUT/field.csv)")
    c = sub.add_parser("convergence", parents=[common], help="grid self-convergence table")
    c.add_argument("--grids", type=str, default=None, help="comma separated N ladder")
    s = sub.add_parser("symbol", parents=[common], help="tabulate the Levy symbol")
    s.add_argument("--xi-max", type=float, default=1e3)
    s.add_argument("--count", type=int, default=1001)
    sub.add_parser("sequence", parents=[common], help="truncated or viscous sequence table")
    return ap


def _setup_logging() -> None:
    level = os.environ.get("LES_LOG_LEVEL", "warn").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else \
            RunConfig.from_preset(args.scenario)
        seed = cfg.seed if args.seed is None else args.seed
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        out = args.out or Path(cfg.get_str("output", "dir", "out"))
        if args.command == "run":
            return cmd_run(cfg, out, seed, args.jobs)
        if args.command == "verify":
            return cmd_verify(cfg, out, seed, args.field)
        if args.command == "convergence":
            grids = [int(x) for x in args.grids.split(",")] if args.grids else None
            return cmd_convergence(cfg, out, args.jobs, grids)
        if args.command == "symbol":
            return cmd_symbol(cfg, out, args.xi_max, args.count)
        return cmd_sequence(cfg, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CertificateFailure, NotFiniteMeasure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
