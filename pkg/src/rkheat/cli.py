"""Command-line benchmark harness.

Three subcommands: ``solve`` runs the full kernel pipeline on a built-in
problem and writes solution.csv, slices.csv and report.json; ``convergence``
repeats the solve over a sweep of node counts and writes convergence.csv;
``crosscheck`` runs the kernel solver against the finite-difference solver
and reports their discrepancy and each one's error against the closed form.

Configuration comes from subcommand flags, optionally seeded by a flat
key=value file (--config); explicit flags override file entries.  Output is
deterministic: rerunning a command with the same configuration reproduces
the CSV files byte for byte.  Exit codes: 0 success, 2 usage or
configuration error, 3 numerical failure; failures print a single JSON line
on stderr.  The environment variable RKHS_SEED is reserved for future
randomized node layouts and is only echoed, never used.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .collocation import (SolverConfig, assemble, error_norms, generate_nodes,
                          solve, solve_picard, standard_kernels)
from .errors import (GridMismatch, KernelDomainMismatch, NonDifferentiableData,
                     NumericallySingular, OutOfDomain, SingularConditionSystem,
                     SingularDiscretization, UnknownExample)
from .fd_reference import error_vs_exact, solve_coupled_fd
from .grids import GridField, SpaceTimeGrid
from .optimality import residual_adjoint, residual_forward
from .problems import builtin_example, cost_functional, homogenize

__all__ = ["RunConfig", "main"]

_trapz = getattr(np, "trapezoid", None) or np.trapz

PROSE_SLICE_TIMES = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
CAPTION_SLICE_TIMES = (0.0, 0.2, 0.5, 0.7, 0.9, 1.0)

SOLUTION_HEADER = ["x", "t", "y_exact", "y_approx", "p_exact", "p_approx",
                   "u_exact", "u_approx", "err_y", "err_p"]
CONVERGENCE_HEADER = ["n_total", "linf_y", "l2_y", "linf_p", "l2_p",
                      "cond_estimate", "seconds"]


class UsageError(Exception):
    pass


_USAGE_ERRORS = (UsageError, UnknownExample, GridMismatch, OutOfDomain,
                 NonDifferentiableData, KernelDomainMismatch, ValueError)
_NUMERICAL_ERRORS = (NumericallySingular, SingularDiscretization,
                     SingularConditionSystem, np.linalg.LinAlgError)


@dataclass(frozen=True)
class RunConfig:
    example_id: int = 1
    nu: float = 1e-2
    n_x: int = 8
    n_t: int = 8
    eval_grid: tuple[int, int] = (101, 101)
    ridge_lambda: float = 0.0
    mode: str = "direct"
    output_dir: str = "."
    slice_times: str = "prose"

    def __post_init__(self):
        if self.example_id not in (1, 2, 3):
            raise UsageError(f"example must be 1, 2 or 3, got {self.example_id}")
        if self.nu <= 0:
            raise UsageError("nu must be positive")
        if self.n_x < 1 or self.n_t < 1 or min(self.eval_grid) < 2:
            raise UsageError("node counts must be >= 1 and eval grid >= 2 per axis")
        if self.mode not in ("direct", "picard"):
            raise UsageError(f"mode must be direct or picard, got {self.mode!r}")
        if self.ridge_lambda < 0:
            raise UsageError("ridge must be >= 0")
        if self.slice_times not in ("prose", "caption"):
            raise UsageError("slice-times must be prose or caption")


def _fmt(v) -> str:
    return "%.17g" % float(v)


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.lower().replace(" ", "").split("x")
    if len(parts) != 2:
        raise UsageError(f"expected WIDTHxHEIGHT dimensions, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise UsageError(f"bad dimensions {text!r}") from exc


def _parse_sweep(text: str) -> list[tuple[int, int]]:
    pairs = [p for p in text.replace(" ", "").split(",") if p]
    sweep = [_parse_dims(p) for p in pairs]
    if len(sweep) < 2:
        raise UsageError("sweep needs at least two grid sizes")
    return sweep


def _read_config_file(path: str) -> dict:
    entries = {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                entries[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return entries


_CONFIG_KEYS = {
    "example": ("example_id", int),
    "nu": ("nu", float),
    "nx": ("n_x", int),
    "nt": ("n_t", int),
    "eval_grid": ("eval_grid", _parse_dims),
    "ridge": ("ridge_lambda", float),
    "mode": ("mode", str),
    "out": ("output_dir", str),
    "slice_times": ("slice_times", str),
}


def _resolve_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key in ("sweep", "oracle_grid"):
                continue                      # handled by the subcommands
            if key not in _CONFIG_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            field, conv = _CONFIG_KEYS[key]
            try:
                values[field] = conv(raw)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for config key {key!r}: {raw!r}") from exc
    overrides = {
        "example_id": args.example,
        "nu": args.nu,
        "n_x": args.nx,
        "n_t": args.nt,
        "eval_grid": _parse_dims(args.eval_grid) if args.eval_grid else None,
        "ridge_lambda": args.ridge,
        "mode": args.mode,
        "output_dir": args.out,
        "slice_times": args.slice_times,
    }
    for field, value in overrides.items():
        if value is not None:
            values[field] = value
    return RunConfig(**values)


def _config_echo(cfg: RunConfig) -> dict:
    echo = dataclasses.asdict(cfg)
    echo["eval_grid"] = list(cfg.eval_grid)
    seed = os.environ.get("RKHS_SEED")
    if seed is not None:
        echo["rkhs_seed"] = seed
    return echo


def _file_config_value(args, key: str):
    if getattr(args, "config", None):
        return _read_config_file(args.config).get(key)
    return None


# -- pipeline pieces -----------------------------------------------------


def _run_pipeline(cfg: RunConfig):
    problem, exact = builtin_example(cfg.example_id, nu=cfg.nu)
    hom = homogenize(problem)
    kernels = standard_kernels(problem.interval, problem.T)
    nodes = generate_nodes(cfg.n_x, cfg.n_t, (problem.interval, problem.T))
    system = assemble(hom, nodes, kernels)
    solver_cfg = SolverConfig(ridge_lambda=cfg.ridge_lambda)
    if cfg.mode == "picard":
        sol, _ = solve_picard(system, solver_cfg)
    else:
        sol = solve(system, solver_cfg)
    return problem, exact, hom, system, sol


def _heldout_residuals(sol, hom, n_x: int, n_t: int) -> dict:
    """Residual maxima on a midpoint grid offset from the nodes."""
    (a, b), T = hom.base.interval, hom.base.T
    xs = a + (np.arange(1, n_x + 2) - 0.5) * (b - a) / (n_x + 1)
    ts = (np.arange(1, n_t + 2) - 0.5) * T / (n_t + 1)
    X, Tt = np.meshgrid(xs, ts)
    yf, pf = sol.y_field(), sol.p_field()
    rf = residual_forward(yf, pf, hom, (X, Tt))
    ra = residual_adjoint(yf, pf, hom, (X, Tt))
    return {"forward_max": float(np.abs(rf).max()),
            "adjoint_max": float(np.abs(ra).max())}


def _cost(sol, problem, n: int = 100) -> float:
    grid = SpaceTimeGrid(n_x=n - 1, n_t=n - 1, interval=problem.interval,
                         horizon=problem.T)
    Y, _, U = sol.evaluate_grid(grid.xs, grid.ts)
    return cost_functional(GridField(grid, Y), GridField(grid, U), problem)


def _solution_rows(sol, exact, xs, ts):
    Y, P, U = sol.evaluate_grid(xs, ts)
    X, Tt = np.meshgrid(xs, ts)
    Ye = np.asarray(exact.y_exact(X, Tt), dtype=float)
    Pe = np.asarray(exact.p_exact(X, Tt), dtype=float)
    Ue = np.asarray(exact.u_exact(X, Tt), dtype=float)
    rows = []
    for j, t in enumerate(ts):
        for i, x in enumerate(xs):
            rows.append([x, t, Ye[j, i], Y[j, i], Pe[j, i], P[j, i],
                         Ue[j, i], U[j, i],
                         abs(Y[j, i] - Ye[j, i]), abs(P[j, i] - Pe[j, i])])
    return rows


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _emit_report(report: dict, path: str) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text + "\n")
    print(text)


# -- subcommands ---------------------------------------------------------


def cmd_solve(args) -> int:
    cfg = _resolve_config(args)
    os.makedirs(cfg.output_dir, exist_ok=True)
    t0 = time.perf_counter()
    problem, exact, hom, system, sol = _run_pipeline(cfg)
    norms = error_norms(sol, exact, eval_grid=cfg.eval_grid)

    ne_x, ne_t = cfg.eval_grid
    xs = np.linspace(problem.a, problem.b, ne_x)
    ts = np.linspace(0.0, problem.T, ne_t)
    _write_csv(os.path.join(cfg.output_dir, "solution.csv"),
               SOLUTION_HEADER, _solution_rows(sol, exact, xs, ts))

    slice_ts = np.asarray(PROSE_SLICE_TIMES if cfg.slice_times == "prose"
                          else CAPTION_SLICE_TIMES) * problem.T
    _write_csv(os.path.join(cfg.output_dir, "slices.csv"),
               SOLUTION_HEADER, _solution_rows(sol, exact, xs, slice_ts))

    # u error norms on the same evaluation grid, for the report only.
    Y, P, U = sol.evaluate_grid(xs, ts)
    X, Tt = np.meshgrid(xs, ts)
    Eu = U - np.asarray(exact.u_exact(X, Tt), dtype=float)
    norms["linf_u"] = float(np.abs(Eu).max())
    norms["l2_u"] = float(np.sqrt(_trapz(_trapz(Eu ** 2, xs, axis=1), ts)))

    report = {
        "config": _config_echo(cfg),
        "norms": norms,
        "cond": sol.info.get("cond", system.conditioning),
        "residuals": _heldout_residuals(sol, hom, cfg.n_x, cfg.n_t),
        "j_cost": _cost(sol, problem),
        "seconds": time.perf_counter() - t0,
    }
    if "picard" in sol.info:
        report["picard"] = sol.info["picard"]
    _emit_report(report, os.path.join(cfg.output_dir, "report.json"))
    return 0


def cmd_convergence(args) -> int:
    sweep_text = args.sweep or _file_config_value(args, "sweep") or "4x4,8x8,12x12,16x16"
    sweep = _parse_sweep(sweep_text)
    cfg = _resolve_config(args)
    os.makedirs(cfg.output_dir, exist_ok=True)

    rows = []
    prev_l2 = None
    violations = []
    for n_x, n_t in sweep:
        run_cfg = dataclasses.replace(cfg, n_x=n_x, n_t=n_t)
        t0 = time.perf_counter()
        _, exact, _, system, sol = _run_pipeline(run_cfg)
        seconds = time.perf_counter() - t0
        norms = error_norms(sol, exact, eval_grid=cfg.eval_grid)
        cond_est = sol.info.get("cond", {}).get("post", float("nan"))
        rows.append([n_x * n_t, norms["linf_y"], norms["l2_y"],
                     norms["linf_p"], norms["l2_p"], cond_est, seconds])
        if prev_l2 is not None and norms["l2_y"] > 1.05 * prev_l2:
            violations.append((n_x, n_t, prev_l2, norms["l2_y"]))
        prev_l2 = norms["l2_y"]

    _write_csv(os.path.join(cfg.output_dir, "convergence.csv"),
               CONVERGENCE_HEADER, rows)
    for n_x, n_t, before, after in violations:
        print(json.dumps({"warning": "l2_y is not non-increasing within 5%",
                          "grid": f"{n_x}x{n_t}",
                          "previous": before, "current": after}),
              file=sys.stderr)
    print(json.dumps({"sweep": [f"{nx}x{nt}" for nx, nt in sweep],
                      "rows": len(rows), "violations": len(violations),
                      "out": os.path.join(cfg.output_dir, "convergence.csv")}))
    return 0


def cmd_crosscheck(args) -> int:
    cfg = _resolve_config(args)
    oracle_text = args.oracle_grid or _file_config_value(args, "oracle_grid") or "64x64"
    oracle_dims = _parse_dims(oracle_text)
    os.makedirs(cfg.output_dir, exist_ok=True)

    t0 = time.perf_counter()
    problem, exact, hom, system, sol = _run_pipeline(cfg)
    grid = SpaceTimeGrid(n_x=oracle_dims[0], n_t=oracle_dims[1],
                         interval=problem.interval, horizon=problem.T)
    fd = solve_coupled_fd(problem, grid)

    Yk, Pk, _ = sol.evaluate_grid(grid.xs, grid.ts)
    disc_y = float(np.abs(Yk - fd.y.values).max())
    disc_p = float(np.abs(Pk - fd.p.values).max())

    report = {
        "config": _config_echo(cfg),
        "oracle_grid": list(oracle_dims),
        "discrepancy": {"y": disc_y, "p": disc_p},
        "kernel_error": error_norms(sol, exact, eval_grid=cfg.eval_grid),
        "oracle_error": {
            "y": error_vs_exact(fd.y, exact.y_exact),
            "p": error_vs_exact(fd.p, exact.p_exact),
        },
        "cond": sol.info.get("cond", system.conditioning),
        "seconds": time.perf_counter() - t0,
    }
    _emit_report(report, os.path.join(cfg.output_dir, "crosscheck.json"))
    return 0


# -- entry point ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(sub) -> None:
    sub.add_argument("--example", type=int, choices=(1, 2, 3), default=None)
    sub.add_argument("--nu", type=float, default=None)
    sub.add_argument("--nx", type=int, default=None)
    sub.add_argument("--nt", type=int, default=None)
    sub.add_argument("--ridge", type=float, default=None)
    sub.add_argument("--mode", choices=("direct", "picard"), default=None)
    sub.add_argument("--eval-grid", dest="eval_grid", default=None,
                     metavar="NXxNT")
    sub.add_argument("--out", default=None, metavar="DIR")
    sub.add_argument("--slice-times", dest="slice_times",
                     choices=("prose", "caption"), default=None)
    sub.add_argument("--config", default=None, metavar="FILE",
                     help="flat key=value file; flags override it")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rkheat",
                     description="kernel collocation benchmarks for the "
                                 "coupled heat-control system")
    subs = parser.add_subparsers(dest="command", required=True)

    p_solve = subs.add_parser("solve", help="run one configuration")
    _add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_conv = subs.add_parser("convergence", help="node-count sweep")
    _add_common(p_conv)
    p_conv.add_argument("--sweep", default=None,
                        metavar="N1xM1,N2xM2,...",
                        help="comma-separated grid sizes (at least two)")
    p_conv.set_defaults(func=cmd_convergence)

    p_cross = subs.add_parser("crosscheck",
                              help="kernel solver vs finite differences")
    _add_common(p_cross)
    p_cross.add_argument("--oracle-grid", dest="oracle_grid", default=None,
                         metavar="NXxNT")
    p_cross.set_defaults(func=cmd_crosscheck)
    return parser


def _fail(code: int, exc: Exception) -> int:
    print(json.dumps({"error": type(exc).__name__, "reason": str(exc)}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _USAGE_ERRORS as exc:
        return _fail(2, exc)
    except _NUMERICAL_ERRORS as exc:
        return _fail(3, exc)


if __name__ == "__main__":
    sys.exit(main())
