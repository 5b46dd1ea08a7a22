"""Command line entry point: ``womp <subcommand> ...``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from womp.harness.config import SweepConfig
from womp.harness.stats import best_lambda, summarize
from womp.harness.sweeps import (
    ITER_COLUMNS,
    LAMBDA_COLUMNS,
    Trial,
    read_csv,
    sweep_iterations,
    sweep_lambda,
    write_csv,
)
from womp.linalg import normalize_columns
from womp.losses import LossSpec
from womp.problems import ProblemInstance
from womp.selection import RULES
from womp.solvers import SolverOptions, omp_run, relative_l2_error

TRACE_COLUMNS = ["k", "selected_index", "support_size", "delta", "fidelity", "loss", "rel_error", "status"]


def _load_config(args) -> SweepConfig:
    data = {}
    if args.config:
        data = yaml.safe_load(Path(args.config).read_text()) or {}
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        data[key.strip()] = yaml.safe_load(value)
    if getattr(args, "out", None):
        data["out"] = args.out
    return SweepConfig.from_dict(data)


def _add_config_args(p):
    p.add_argument("-c", "--config", help="YAML config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    p.add_argument("-o", "--out", help="output path (overrides the config's out)")


def cmd_gen(args) -> int:
    cfg = _load_config(args)
    levels = cfg.levels
    if not 0 <= args.level < len(levels):
        raise SystemExit(f"level must be in [0, {len(levels) - 1}]")
    inst = Trial(cfg, levels[args.level], args.trial).instance
    out = args.out or "instance.json"
    inst.save(out)
    print(f"wrote {out} ({inst.A.shape[0]}x{inst.A.shape[1]})")
    return 0


def cmd_solve(args) -> int:
    inst = ProblemInstance.load(args.instance)
    if inst.meta.get("normalized", True):
        A, scales = inst.A, np.ones(inst.A.shape[1])
    else:
        A, scales = normalize_columns(inst.A)
    spec = LossSpec.from_rule(args.rule, args.lam)
    opts = SolverOptions(max_iterations=args.K, restrict_to_complement=args.restrict)
    trace = omp_run(spec, A, inst.y, inst.w, opts)
    rows = []
    for rec in trace.records:
        err = math.nan if inst.x_true is None else relative_l2_error(rec.x / scales, inst.x_true)
        flags = rec.flags + (("stalled",) if rec.stalled else ())
        rows.append(dict(k=rec.k, selected_index=rec.index + 1, support_size=len(rec.support),
                         delta=float(rec.delta), fidelity=float(rec.fidelity), loss=float(rec.loss),
                         rel_error=err, status="ok" if not flags else "ok:" + "+".join(flags)))
    out = args.out or "trace.csv"
    write_csv(rows, TRACE_COLUMNS, out)
    support = " ".join(str(j + 1) for j in trace.support)
    print(f"{trace.status.value}: {len(trace)} iterations, support = [{support}]")
    print(f"wrote {out}")
    return 0


def _finish_sweep(rows, columns, cfg, args, title) -> None:
    write_csv(rows, columns, cfg.out)
    print(f"wrote {cfg.out} ({len(rows)} rows)")
    if not args.no_figure:
        from womp.harness.plotting import plot_table

        svg = Path(cfg.out).with_suffix(".svg")
        plot_table(rows, svg, title)
        print(f"wrote {svg}")


def cmd_sweep_lambda(args) -> int:
    cfg = _load_config(args)
    rows = sweep_lambda(cfg, workers=args.workers)
    _finish_sweep(rows, LAMBDA_COLUMNS, cfg, args, f"{cfg.rule}, K={cfg.K}")
    return 0


def cmd_sweep_iter(args) -> int:
    cfg = _load_config(args)
    lambdas = None
    if args.lambdas:
        lambdas = [float(v) for v in args.lambdas.split(",")]
    rows = sweep_iterations(cfg, lambdas=lambdas, workers=args.workers)
    _finish_sweep(rows, ITER_COLUMNS, cfg, args, f"{cfg.rule}")
    return 0


def cmd_stats(args) -> int:
    rows = read_csv(args.table)
    if not rows:
        raise SystemExit("empty table")
    iter_table = "k" in rows[0]
    keys = args.by.split(",") if args.by else (["lambda", "k"] if iter_table else ["level_id", "lambda"])
    summary = summarize(rows, keys)
    cols = keys + ["n", "median", "q1", "q3", "log_mean", "log_std"]
    if args.out:
        write_csv(summary, cols, args.out)
        print(f"wrote {args.out}")
    else:
        print(",".join(cols))
        for rec in summary:
            print(",".join(repr(v) if isinstance(v, float) else str(v) for v in (rec[c] for c in cols)))
    if not iter_table:
        for lid in sorted({int(r["level_id"]) for r in rows}):
            desc = next(r["level_desc"] for r in rows if int(r["level_id"]) == lid)
            try:
                lam = best_lambda(rows, lid, args.statistic)
            except ValueError as exc:
                print(f"# level {lid} ({desc}): {exc}", file=sys.stderr)
                continue
            print(f"# best lambda, level {lid} ({desc}): {lam!r}", file=sys.stderr)
    return 0


def cmd_plot(args) -> int:
    from womp.harness.plotting import plot_table

    rows = read_csv(args.table)
    out = args.out or str(Path(args.table).with_suffix(".svg"))
    plot_table(rows, out, args.title)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="womp", description="Loss-based weighted OMP experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write one problem instance file")
    _add_config_args(p)
    p.add_argument("--level", type=int, default=0, help="level index (default 0)")
    p.add_argument("--trial", type=int, default=0, help="trial index (default 0)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run one greedy solve and write its trace")
    p.add_argument("instance")
    p.add_argument("-r", "--rule", choices=sorted(RULES), default="lasso-l1")
    p.add_argument("-l", "--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("-K", type=int, default=10, help="iterations")
    p.add_argument("--restrict", action="store_true", help="only select indices outside the support")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_solve)

    for name, func, helptext in (("sweep-lambda", cmd_sweep_lambda, "error against lambda at fixed K"),
                                 ("sweep-iter", cmd_sweep_iter, "error against iteration count")):
        p = sub.add_parser(name, help=helptext)
        _add_config_args(p)
        p.add_argument("--workers", type=int, help="worker processes (default: WOMP_THREADS or CPU count)")
        p.add_argument("--no-figure", action="store_true", help="skip the SVG next to the CSV")
        if name == "sweep-iter":
            p.add_argument("--lambdas", help="comma separated lambda values (must include 0)")
        p.set_defaults(func=func)

    p = sub.add_parser("stats", help="summarize a sweep table")
    p.add_argument("table")
    p.add_argument("--by", help="comma separated grouping columns")
    p.add_argument("--statistic", choices=["median", "logmean"], default="median")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot", help="render a sweep table as SVG")
    p.add_argument("table")
    p.add_argument("-o", "--out")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
