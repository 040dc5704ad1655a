"""Command-line harness: ``impulsive-pressure {simulate,pressure,verify,plotdata}``.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 runtime guard tripped.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import kernels
from .config import SUITES, ConfigError, ExperimentConfig, load_config
from .errors import DomainError, InvalidInputError, SpacingViolationError, UnsupportedSystemError
from .flows import sample_times
from .impulsive import TrajectoryRecord, impulsive_trajectory
from .pressure import PressureEstimator, PressureTable
from .verify import run_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


def _header_lines(header: dict) -> list[str]:
    return [f"# {k}: {v}" for k, v in header.items()]


def trajectory_rows(rec: TrajectoryRecord, dt: float) -> list[tuple]:
    """Samples every ``dt`` plus one row per impulse holding the pre-jump limit.

    Rows are ``(t, coords, segment_index, is_impulse)``; an impulse row carries
    the index of the segment it ends and sorts before the regular row at the
    same time.
    """
    ts = sample_times(rec.horizon, dt)
    states = rec.state_at(ts)
    seg = rec.segment_index(ts)
    rows = [(float(t), s, int(k), 0) for t, s, k in zip(ts, states, seg)]
    for n, tau in enumerate(rec.impulse_times):
        rows.append((float(tau), rec.left_limit(n), n, 1))
    rows.sort(key=lambda r: (r[0], -r[3]))
    return rows


def write_trajectory_csv(path, rec: TrajectoryRecord, dt: float, header: dict | None = None) -> str:
    dim = rec.points.shape[1]
    cols = ["t"] + [f"x{i}" for i in range(dim)] + ["segment_index", "is_impulse"]
    lines = _header_lines(header or {}) + [",".join(cols)]
    for t, s, k, imp in trajectory_rows(rec, dt):
        lines.append(",".join([repr(t)] + [repr(float(v)) for v in s] + [str(k), str(imp)]))
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def plot_rows(table: PressureTable) -> list[tuple]:
    """``(kind, eps, delta, T, logZ/T)`` in series order."""
    rows = sorted(table.rows, key=lambda r: (r.kind, -r.eps, -r.delta, r.T))
    return [(r.kind, r.eps, r.delta, r.T, r.logZ / r.T) for r in rows]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if cfg.simulate is None:
        raise ConfigError(f"{cfg.source}: field 'simulate': required for the simulate command")
    sim = cfg.simulate
    rec = impulsive_trajectory(cfg.system, sim.x0, sim.T)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = cfg.header()
    header.update({"x0": json.dumps(sim.x0), "T": repr(sim.T), "dt": repr(sim.dt),
                   "impulses": len(rec.impulse_times)})
    path = out / cfg.outputs["trajectory"]
    write_trajectory_csv(path, rec, sim.dt, header)
    print(f"wrote {path} ({len(rec.impulse_times)} impulses)")
    return EXIT_OK


def cmd_pressure(args) -> int:
    cfg = _load(args)
    schedule = cfg.schedule()
    est = PressureEstimator(cfg.system, schedule, cfg.kinds, threads=cfg.threads, timing=args.timing)
    table = est.table(cfg.potential)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = cfg.header()
    header["schedule"] = json.dumps(schedule.to_dict(), sort_keys=True)
    table.to_csv(out / cfg.outputs["table"], header)
    summary = table.summary()
    summary["header"] = header
    (out / cfg.outputs["summary"]).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                                              encoding="utf-8")
    for k in summary["kinds"]:
        print(f"{k['kind']:<12} slope {k['slope']:.6f}  residual {k['residual']:.3g}  "
              f"(eps={k['eps']:g}, delta={k['delta']:g})")
    for w in table.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args) if args.config else None
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    threads = args.threads or (cfg.threads if cfg else 1)
    t0 = time.perf_counter()
    results = run_suite(args.suite, cfg, threads=threads, seed=seed)
    failed = [a for a in results if not a.passed]
    for a in results:
        print(a.row())
    print(f"{args.suite}: {len(results) - len(failed)}/{len(results)} passed "
          f"in {time.perf_counter() - t0:.1f}s (backend {kernels.BACKEND})")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_plotdata(args) -> int:
    if args.table:
        src = Path(args.table)
    elif args.config:
        cfg = _load(args)
        src = Path(args.out) / cfg.outputs["table"]
    else:
        raise InvalidInputError("plotdata needs --table PATH or --config PATH")
    if not src.is_file():
        raise InvalidInputError(f"{src}: no such pressure table")
    table = PressureTable.from_csv(src)
    if not table.rows:
        raise InvalidInputError(f"{src}: pressure table has no rows")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / (args.name or "plotdata.csv")
    lines = ["kind,eps,delta,T,logZ_over_T"]
    lines += [f"{k},{e!r},{d!r},{T!r},{v!r}" for k, e, d, T, v in plot_rows(table)]
    dest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {dest} ({len(lines) - 1} rows)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment configuration")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--seed", type=int, default=None, help="seed for sampled diagnostics")
    common.add_argument("--threads", type=int, default=None, help="worker threads for pairwise kernels")

    p = argparse.ArgumentParser(prog="impulsive-pressure",
                                description="Pressure estimators for impulsive semiflows.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common], help="write an impulsive trajectory as CSV")
    s.set_defaults(func=cmd_simulate, need_config=True)
    s = sub.add_parser("pressure", parents=[common], help="fill a pressure table and summary")
    s.add_argument("--timing", action="store_true", help="record wall-clock seconds per cell")
    s.set_defaults(func=cmd_pressure, need_config=True)
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=SUITES)
    s.set_defaults(func=cmd_verify, need_config=False)
    s = sub.add_parser("plotdata", parents=[common], help="long-format logZ/T series from a table")
    s.add_argument("--table", help="pressure table CSV (default: the config's table in --out)")
    s.add_argument("--name", help="output file name (default: plotdata.csv)")
    s.set_defaults(func=cmd_plotdata, need_config=False)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    if args.need_config and not args.config:
        print(f"error: {args.command} needs --config PATH", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except SpacingViolationError as exc:
        print(f"runtime guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InvalidInputError, DomainError, UnsupportedSystemError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
