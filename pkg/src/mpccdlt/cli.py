"""Command-line front end: ``allocate``, ``size`` and ``experiment``.

Exit codes: 0 success, 1 valid but infeasible query, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .constellation import RT_W_RANGE, RT_Z_RANGE, normalize, sample_cluster
from .core import DivisibilitySpec, allocate, makespan_for_load
from .errors import MpccError
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .formats import fmt, load_cluster, parse_interval, write_csv
from .sizing import DeadlineQuery, n_min

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2


def _interval_arg(text):
    try:
        iv = parse_interval(text)
    except MpccError as e:
        raise argparse.ArgumentTypeError(str(e))
    return (iv.lo, iv.hi)


def _add_platform_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--cluster", type=Path, help="cluster description file")
    src.add_argument("--sample", type=int, metavar="N",
                     help="sample a random star with N neighbours instead")
    p.add_argument("--ci", type=float, default=1.0,
                   help="task compute intensity in Flops/MB, used with --cluster (default 1)")
    p.add_argument("--seed", type=int, default=0, help="platform sampling seed")
    p.add_argument("--w-range", type=_interval_arg, default=RT_W_RANGE, metavar="LO:HI")
    p.add_argument("--z-range", type=_interval_arg, default=RT_Z_RANGE, metavar="LO:HI")


def _platform(args):
    if args.cluster is not None:
        return normalize(load_cluster(args.cluster), args.ci)
    return sample_cluster(args.sample, args.w_range, args.z_range, args.seed)


def cmd_allocate(args, out):
    platform = _platform(args)
    f = 1.0 - args.gamma if args.gamma is not None else args.f
    alloc = allocate(platform, DivisibilitySpec(f, args.beta))
    makespan = makespan_for_load(alloc, args.L)
    print(f"regime={alloc.regime}", file=out)
    print(f"t_star={fmt(alloc.t_star)}", file=out)
    print(f"alpha0={fmt(alloc.alpha0)}", file=out)
    for i, a in enumerate(alloc.alphas, start=1):
        print(f"alpha{i}={fmt(a)}", file=out)
    print(f"makespan={fmt(makespan)}", file=out)
    if args.csv:
        header = ("regime", "f", "beta", "L", "t_star", "makespan", "alpha0",
                  *(f"alpha{i}" for i in range(1, platform.n + 1)))
        write_csv(args.csv, header, [(str(alloc.regime), f, args.beta, args.L, alloc.t_star,
                                      makespan, alloc.alpha0, *alloc.alphas)])
    return EXIT_OK


def cmd_size(args, out):
    platform = _platform(args)
    report = n_min(DeadlineQuery(args.t_req, platform, args.beta))
    print(f"delta={fmt(report.delta)}", file=out)
    chosen = report.n_min or 0
    rows = []
    for rank, (child, cum) in enumerate(zip(report.order, report.cumulative), start=1):
        g = report.contributions[child]
        selected = int(report.feasible and rank <= chosen)
        rows.append((rank, g, cum, report.delta, selected))
        print(f"rank={rank} child={child + 1} g={fmt(g)} cumulative={fmt(cum)}"
              f"{' selected' if selected else ''}", file=out)
    print(f"n_min={report.n_min if report.feasible else 'INFEASIBLE'}", file=out)
    if args.csv:
        write_csv(args.csv, ("rank", "g", "cumulative", "threshold", "selected"), rows)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_experiment(args, out):
    cfg = ExperimentConfig.from_file(args.config)
    if args.output is not None:
        cfg.set("output", args.output.resolve())
    if args.seed is not None:
        cfg.set("seed", args.seed)
    if args.workers is not None:
        cfg.set("workers", args.workers)
    tables = run_experiment(cfg)
    written = []
    try:
        for table in tables:
            if table.path is None:
                continue
            write_csv(table.path, table.header, table.rows)
            written.append(table.path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    if not written:
        # no output path: first table to stdout
        table = tables[0]
        print(",".join(table.header), file=out)
        for row in table.rows:
            print(",".join(fmt(v) for v in row), file=out)
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mpccdlt",
        description="Multi-port divisible-load allocation, cluster sizing and "
                    "admission-control experiments for relay-centred satellite clusters.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="optimal load fractions and makespan for one task")
    _add_platform_args(p)
    frac = p.add_mutually_exclusive_group()
    frac.add_argument("--f", type=float, default=0.0, help="relay-only fraction (default 0)")
    frac.add_argument("--gamma", type=float, help="distributable fraction; sets f = 1 - gamma")
    p.add_argument("--beta", type=float, default=0.0, help="result-size ratio (default 0)")
    p.add_argument("--L", type=float, default=1.0, help="task size in MB (default 1)")
    p.add_argument("--csv", type=Path, help="also write the allocation as a CSV row")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("size", help="minimum cooperating satellites for a deadline")
    _add_platform_args(p)
    p.add_argument("--t-req", type=float, required=True,
                   help="required completion time per unit load (s/MB)")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--csv", type=Path)
    p.set_defaults(func=cmd_size)

    p = sub.add_parser("experiment", help=f"run an experiment config ({', '.join(EXPERIMENTS)})")
    p.add_argument("config", type=Path)
    p.add_argument("-o", "--output", type=Path, help="override the config's output path")
    p.add_argument("--seed", type=int, help="override the config's seed")
    p.add_argument("--workers", type=int, help="parallel processes for replications")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (MpccError, OSError) as e:
        print(f"mpccdlt: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
