"""Command-line driver: ``nhbdi --scenario FILE --command CMD --out-dir DIR``.

Exit status is 0 on success, 1 on usage or configuration errors and 2 when
``validate`` finds a failing check.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import svg
from .calculus import build_table
from .csvio import HEADERS, write_columns, write_rows
from .deterministic import deterministic_series
from .exceptions import NHBDIError
from .oracle import forward_solve
from .pmf import alpha_beta, default_k, mesh, pmf
from .scenario import Scenario, load_scenario
from .simulator import derive_path_seed, run_ensemble, simulate_path
from .validation import format_table, run_checks

COMMANDS = ("table", "deterministic", "pmf", "moments", "mesh", "simulate", "oracle", "validate")
MESH_ROWS = 400
ORACLE_MAX_K = 10_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    scenario_path: str | None
    command: str
    out_dir: Path
    overrides: dict
    t: float | None = None
    svg: bool = False
    k_stride: int | None = None
    t_step: float = 5.0
    paths: int = 1
    criteria: list | None = None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nhbdi", description="Time-nonhomogeneous birth-death-immigration infection model")
    p.add_argument("--scenario", help="scenario file (.toml/.json) or bundled preset name")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--out-dir", default="out", help="output directory (created if missing)")
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--k-max", type=int)
    p.add_argument("--reps", type=int, help="Monte Carlo replications")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--delay-d", type=float, help="duration of the infection-rate transition")
    p.add_argument("--t", type=float, help="time for pmf/oracle")
    p.add_argument("--svg", action="store_true", help="also write SVG plots")
    p.add_argument("--k-stride", type=int, help="mesh: keep every n-th k")
    p.add_argument("--t-step", type=float, default=5.0, help="mesh: spacing of the time columns")
    p.add_argument("--paths", type=int, default=1, help="simulate: number of event logs to write")
    p.add_argument("--criteria", help="validate: comma-separated check numbers (default all)")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    criteria = None
    if args.criteria:
        try:
            criteria = sorted({int(c) for c in args.criteria.split(",") if c.strip()})
        except ValueError:
            raise UsageError(f"--criteria expects integers, got {args.criteria!r}") from None
    for name in ("reps", "k_max", "paths", "k_stride"):
        v = getattr(args, name)
        if v is not None and v < 1 and not (name == "paths" and v == 0):
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    if args.command != "validate" and not args.scenario:
        raise UsageError(f"--scenario is required for {args.command}")
    overrides = {
        "t_end": args.t_end, "dt": args.dt, "k_max": args.k_max,
        "replications": args.reps, "master_seed": args.seed, "delay_d": args.delay_d,
    }
    return RunConfig(
        args.scenario, args.command, Path(args.out_dir),
        {k: v for k, v in overrides.items() if v is not None},
        args.t, args.svg, args.k_stride, args.t_step, args.paths, criteria,
    )


def _scenario(cfg: RunConfig) -> Scenario:
    return load_scenario(cfg.scenario_path).with_overrides(**cfg.overrides)


def _time_arg(cfg, sc) -> float:
    t = sc.t_end if cfg.t is None else cfg.t
    if not 0 <= t <= sc.t_end:
        raise UsageError(f"--t {t} outside [0, {sc.t_end}]")
    return float(t)


def cmd_table(cfg, sc, out):
    tab = build_table(sc)
    write_columns(out / "table.csv", "table", [tab.grid, tab.s, tab.sigma, tab.n_fn, tab.l_fn, tab.m_fn])
    if cfg.svg:
        t = tab.grid
        svg.line_plot(out / "rates.svg", [(t, sc.lam(t), "lambda"), (t, sc.mu(t), "mu"), (t, sc.nu(t), "nu")],
                      "rates", ylabel="per day")
        svg.line_plot(out / "s.svg", [(t, tab.s, "s(t)")], "integrated growth rate", ylabel="s")
        svg.line_plot(out / "sigma.svg", [(t, tab.sigma, "Sigma"), (t, tab.n_fn, "N")], "Sigma and N")
        svg.line_plot(out / "lm.svg", [(t, tab.l_fn, "L"), (t, tab.m_fn, "M")], "L and M")
        alpha = tab.m_fn / (1 + tab.m_fn)
        beta = tab.l_fn / (1 + tab.m_fn)
        svg.line_plot(out / "alpha_beta.svg", [(t, alpha, "alpha"), (t, beta, "beta")], "alpha and beta")


def cmd_deterministic(cfg, sc, out):
    tab = build_table(sc)
    ser = deterministic_series(tab)
    write_columns(out / "deterministic.csv", "deterministic", [ser.grid, ser.i_bar, ser.a_bar, ser.b_bar, ser.r_bar])
    write_columns(out / "daily.csv", "daily", [ser.days, ser.i_new, ser.r_new])
    peak = int(np.argmax(ser.i_bar))
    print(f"expected infectious peaks at t = {ser.grid[peak]:.2f} with {ser.i_bar[peak]:.6g}")
    if cfg.svg:
        svg.line_plot(out / "i_bar.svg", [(ser.grid, ser.i_bar, "I")], "expected infectious", ylabel="cases")
        svg.line_plot(out / "cumulative.svg",
                      [(ser.grid, ser.a_bar, "A"), (ser.grid, ser.b_bar, "B"), (ser.grid, ser.r_bar, "R")],
                      "expected cumulative counts", ylabel="cases")
        svg.line_plot(out / "daily.svg", [(ser.days, ser.i_new, "new infections"), (ser.days, ser.r_new, "recoveries")],
                      "expected daily counts", xlabel="day", ylabel="cases")


def cmd_pmf(cfg, sc, out):
    t = _time_arg(cfg, sc)
    tab = build_table(sc, extra_nodes=[t])
    K = min(sc.k_max, default_k(tab, t, sc.i0))
    sl = pmf(tab, t, sc.i0, max(K, sc.i0))
    write_columns(out / "pmf.csv", "pmf", [np.arange(len(sl.p)), sl.p], trailer=("tail", sl.tail))
    print(f"P_0({t:g}) = {sl.p[0]:.6g}; K = {sl.k_max}; tail {sl.tail:.3g}")
    if cfg.svg:
        k = np.arange(len(sl.p))
        svg.line_plot(out / "pmf.svg", [(k, sl.p, f"t = {t:g}")], "probability mass function",
                      xlabel="k", ylabel="P_k", logy=True)


def cmd_moments(cfg, sc, out):
    tab = build_table(sc)
    days = np.arange(0, math.floor(sc.t_end) + 1, dtype=float)
    idx = np.searchsorted(tab.grid, days)
    s = tab.s[idx]
    lm = tab.l_fn[idx] + tab.m_fn[idx]
    mean = sc.i0 * np.exp(s)
    var = sc.i0 * np.exp(2 * s) * lm
    cv = np.sqrt(lm / sc.i0) if sc.i0 > 0 else np.full(len(days), np.nan)
    write_columns(out / "moments.csv", "moments", [days, mean, var, cv])
    if cfg.svg:
        svg.line_plot(out / "cv.svg", [(days, cv, "c_I")], "coefficient of variation", ylabel="cv")
        svg.line_plot(out / "moments.svg", [(days, mean, "mean"), (days, np.sqrt(var), "sd")],
                      "mean and standard deviation", ylabel="cases", logy=True)


def cmd_mesh(cfg, sc, out):
    tab = build_table(sc)
    times = np.arange(0.0, sc.t_end + 1e-9, cfg.t_step)
    K = sc.k_max
    stride = cfg.k_stride or max(1, math.ceil((K + 1) / MESH_ROWS))
    grid = mesh(tab, times, K, sc.i0, k_stride=stride)
    path = out / "meshgrid.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k"] + [f"{t:.17g}" for t in times])
        for j, k in enumerate(grid.ks):
            w.writerow([str(k)] + [f"{v:.17g}" for v in grid.z[j]])
        w.writerow(["tail"] + [f"{v:.17g}" for v in grid.tail])
    print(f"mesh: {len(grid.ks)} rows (k stride {stride}) x {len(times)} times")
    if cfg.svg:
        svg.heatmap(out / "mesh.svg", times, grid.ks, grid.z, "P_k(t), log10 color")
        rows = [k for k in (0, 1, 10, 100, 1000) if k in set(grid.ks.tolist())]
        svg.line_plot(out / "pk_rows.svg", [(times, grid.row(k), f"k = {k}") for k in rows],
                      "P_k(t) for fixed k", ylabel="P_k", logy=True)


def cmd_simulate(cfg, sc, out):
    days = np.arange(0.0, math.floor(sc.t_end) + 1)
    ens = run_ensemble(sc, days)
    seed = sc.master_seed
    pmf_rows = []
    snap_rows = []
    for j, t in enumerate(ens.snapshot_times):
        x = ens.snapshots[j]
        counts = np.bincount(x)
        nz = np.flatnonzero(counts)
        pmf_rows.extend((t, int(k), counts[k] / len(x)) for k in nz)
        q05, q50, q95 = np.quantile(x, [0.05, 0.5, 0.95])
        snap_rows.append((t, float(np.mean(x == 0)), q05, q50, q95))
    write_rows(out / "summary_pmf.csv", HEADERS["summary_pmf"], pmf_rows, seed)
    write_rows(out / "summary_snapshots.csv", HEADERS["summary_snapshots"], snap_rows, seed)
    inf = ens.daily_stats("infections")
    rec = ens.daily_stats("recoveries")
    cols = [inf["day"]] + [d[key] for d in (inf, rec) for key in ("mean", "sd", "q05", "q50", "q95")]
    write_columns(out / "summary_daily.csv", "summary_daily", cols, seed)
    rows = []
    for i in range(min(cfg.paths, ens.replications)):
        log = simulate_path(sc, derive_path_seed(seed, i))
        rows.extend((i, t, kind.name.lower(), k) for t, kind, k in log.events())
    write_rows(out / "paths.csv", HEADERS["paths"], rows, seed)
    print(f"{ens.replications} paths, {int(ens.events.sum())} events; extinct at {sc.t_end:g}: "
          f"{ens.extinction_fraction():.4f}")
    if cfg.svg:
        svg.line_plot(out / "sim_daily.svg",
                      [(inf["day"], inf["mean"], "infections mean"), (inf["day"], inf["q95"], "infections q95"),
                       (rec["day"], rec["mean"], "recoveries mean")],
                      "simulated daily counts", xlabel="day", ylabel="cases")


def cmd_oracle(cfg, sc, out):
    t = _time_arg(cfg, sc)
    if "k_max" in cfg.overrides:
        dist = forward_solve(sc, t, sc.k_max)
    else:
        K = max(100, sc.i0)
        while True:
            dist = forward_solve(sc, t, K)
            if dist.leaked < 1e-8:
                break
            if K >= ORACLE_MAX_K:
                raise UsageError(f"truncation {K} still leaks {dist.leaked:.2g}; the oracle is a desk-scale tool")
            K = min(2 * K, ORACLE_MAX_K)
    write_columns(out / "oracle.csv", "oracle", [np.arange(len(dist.q)), dist.q], trailer=("leaked", dist.leaked))
    print(f"forward equations to t = {t:g} on 0..{len(dist.q) - 1}: leaked {dist.leaked:.3g}")
    if cfg.svg:
        k = np.arange(len(dist.q))
        svg.line_plot(out / "oracle.svg", [(k, dist.q, f"t = {t:g}")], "forward-equation distribution",
                      xlabel="k", ylabel="q_k", logy=True)


def cmd_validate(cfg, out):
    reps = cfg.overrides.get("replications")
    results = run_checks(cfg.criteria, reps=reps, echo=print)
    write_rows(out / "validation.csv", HEADERS["validation"],
               [(r.number, r.title, r.passed, r.elapsed, r.detail) for r in results])
    print(format_table(results).splitlines()[-1])
    return 0 if all(r.passed for r in results) else 2


HANDLERS = {
    "table": cmd_table, "deterministic": cmd_deterministic, "pmf": cmd_pmf, "moments": cmd_moments,
    "mesh": cmd_mesh, "simulate": cmd_simulate, "oracle": cmd_oracle,
}


def run(cfg: RunConfig) -> int:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.command == "validate":
        return cmd_validate(cfg, cfg.out_dir)
    sc = _scenario(cfg)
    HANDLERS[cfg.command](cfg, sc, cfg.out_dir)
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except (UsageError, NHBDIError, ValueError, OSError) as exc:
        print(f"nhbdi: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
