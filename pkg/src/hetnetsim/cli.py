"""Command line harness: single runs and full experiment sweeps.

    hetnetsim simulate --config cfg.json --scenario hetnet --scheduler mlwdf \
        --users 40 --seed 7 --out results/
    hetnetsim sweep --config cfg.json --out results/ --workers 4

Each run contributes one row to a fixed-schema summary CSV; sweeps walk
every (scenario, algorithm, user count, seed) point in grid order so that
re-runs with the same root seed reproduce the same files.
"""

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import ConfigError, RunConfig, load_config, load_sweep
from .engine import run_simulation

SUMMARY_COLUMNS = (
    "scenario", "algorithm", "users", "seed",
    "throughput_bps_total", "throughput_bps_video", "plr_video",
    "delay_ms_video_mean", "fairness_eq11_video", "jain_video",
    "handovers", "dropped_bits", "transmitted_bits", "arrived_bits",
    "wall_time_s",
)


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_summary_rows(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_format(row[c]) for c in SUMMARY_COLUMNS])


def write_cells(path: str, cells) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("cell_id", "kind", "x_m", "y_m", "tx_power_dbm"))
        for c in cells:
            writer.writerow((c.cell_id, c.kind, _format(c.x_m), _format(c.y_m),
                             _format(c.tx_power_dbm)))


def write_flows(path: str, per_flow: list[dict]) -> None:
    if not per_flow:
        return
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(per_flow[0]))
        writer.writeheader()
        writer.writerows(per_flow)


def write_trace(path: str, trace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("tti", "cell_id", "served_bits", "queued_bits", "backlogged_flows"))
        writer.writerows(trace)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, scenario=args.scenario, scheduler=args.scheduler,
                      n_users=args.users, seed=args.seed, sim_duration_s=args.duration,
                      trace_ttis=True if args.trace else None)
    result = run_simulation(cfg)
    os.makedirs(args.out, exist_ok=True)
    write_summary_rows(os.path.join(args.out, "summary.csv"), [result.summary])
    write_cells(os.path.join(args.out, "cells.csv"), result.cells)
    write_flows(os.path.join(args.out, "flows.csv"), result.per_flow)
    if cfg.trace_ttis:
        write_trace(os.path.join(args.out, "trace.csv"), result.tti_trace)
    print(f"{cfg.scenario}/{cfg.scheduler} users={cfg.n_users} seed={cfg.seed}: "
          f"throughput {result.summary['throughput_bps_total'] / 1e6:.3f} Mbps, "
          f"video PLR {result.summary['plr_video']:.4f}, "
          f"video delay {result.summary['delay_ms_video_mean']:.2f} ms")
    return 0


def _sweep_worker(cfg: RunConfig):
    try:
        return run_simulation(cfg).summary, None
    except Exception as exc:  # noqa: BLE001 - a failed point must not kill the sweep
        return None, f"{type(exc).__name__}: {exc}"


def cmd_sweep(args) -> int:
    spec = load_sweep(args.config, runs_per_point=args.runs_per_point,
                      root_seed=args.root_seed)
    points = list(spec.points())
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            outcomes = list(pool.map(_sweep_worker, points))
    else:
        outcomes = [_sweep_worker(cfg) for cfg in points]
    rows, failures = [], []
    for cfg, (summary, error) in zip(points, outcomes):
        if summary is not None:
            rows.append(summary)
        else:
            failures.append({"scenario": cfg.scenario, "algorithm": cfg.scheduler,
                             "users": cfg.n_users, "seed": cfg.seed, "error": error})
    os.makedirs(args.out, exist_ok=True)
    write_summary_rows(os.path.join(args.out, "summary.csv"), rows)
    if failures:
        with open(os.path.join(args.out, "failures.csv"), "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["scenario", "algorithm", "users", "seed", "error"])
            writer.writeheader()
            writer.writerows(failures)
    print(f"sweep complete: {len(rows)} runs ok, {len(failures)} failed, output in {args.out}")
    return 0 if not failures else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetnetsim",
                                     description="LTE downlink macro/pico scheduling simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one simulation")
    sim.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    sim.add_argument("--scenario", choices=("macro", "hetnet"))
    sim.add_argument("--scheduler", choices=("pf", "mlwdf", "exppf"))
    sim.add_argument("--users", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--duration", type=float, help="simulation duration in seconds")
    sim.add_argument("--out", default="results")
    sim.add_argument("--trace", action="store_true", help="also write a per-TTI trace CSV")
    sim.add_argument("--workers", type=int, default=1,
                     help="accepted for interface parity; a single run is serial")
    sim.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", help="run the full experiment grid")
    sweep.add_argument("--config", help="JSON config file with an optional 'sweep' section")
    sweep.add_argument("--out", default="results")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--runs-per-point", type=int, default=None)
    sweep.add_argument("--root-seed", type=int, default=None)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
