"""Command-line entry point.

Subcommands:

* ``run``      -- execute an experiment grid from a JSON config file.
* ``ecdf``     -- aggregate trace files into an ECDF curve (CSV).
* ``heatmap``  -- sample a finished run's generator onto a 2-D grid (CSV).
* ``bench``    -- inspect the benchmark suite (``bench list``).

Exit codes for ``run``: 0 all cells completed, 1 at least one cell failed at
runtime, 2 unusable configuration.
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import KERNELS
from .domain import Box
from .harness import (ConfigError, compute_ecdf, default_ecdf_targets,
                      export_generator_heatmap, run_experiment)
from .optimizer import params_from_dict
from .trace import read_trace


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optgan",
                                     description="Black-box optimization experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment grid from a config file")
    run.add_argument("--config", required=True, help="JSON experiment description")
    run.add_argument("--out", default="traces", help="output directory for traces")
    run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    run.add_argument("--time-limit", type=float, default=None,
                     help="wall-clock limit per run in seconds (overrides config)")

    ecdf = sub.add_parser("ecdf", help="ECDF curve over a set of trace files")
    ecdf.add_argument("--traces", required=True, help="glob pattern of trace files")
    ecdf.add_argument("--targets", default=None,
                      help="comma-separated indicator targets "
                           "(default: 1e2 down to 1e-8)")
    ecdf.add_argument("--budgets", default=None,
                      help="comma-separated budgets (default: all recorded fes)")
    ecdf.add_argument("--out", default=None, help="output CSV (default: stdout)")

    heat = sub.add_parser("heatmap", help="generator distribution of a finished run")
    heat.add_argument("--trace", required=True, help="trace file of an opt-gan run")
    heat.add_argument("--res", default="64x64", help="grid resolution, e.g. 64x64")
    heat.add_argument("--samples", type=int, default=1_000_000,
                      help="Monte-Carlo sample count")
    heat.add_argument("--bounds", default=None,
                      help="window as xlow,xhigh,ylow,yhigh (default: the domain)")
    heat.add_argument("--seed", type=int, default=0, help="sampling seed")
    heat.add_argument("--out", required=True, help="output CSV")

    bench = sub.add_parser("bench", help="benchmark suite utilities")
    bench.add_argument("action", choices=["list"], help="what to do")
    return parser


def _cmd_run(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.time_limit is not None:
        config["time_limit_secs"] = args.time_limit
    try:
        results = run_experiment(config, args.out, jobs=args.jobs)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = [r for r in results if r["error"]]
    for r in results:
        status = "FAILED: " + r["error"] if r["error"] else "ok"
        print(f"{r['path']}: {status}")
    print(f"{len(results) - len(failed)}/{len(results)} cells completed")
    return 1 if failed else 0


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _cmd_ecdf(args) -> int:
    paths = sorted(glob.glob(args.traces))
    if not paths:
        print(f"error: no traces match {args.traces!r}", file=sys.stderr)
        return 2
    traces = [read_trace(p) for p in paths]
    targets = _parse_floats(args.targets) if args.targets else default_ecdf_targets()
    if args.budgets:
        budgets = _parse_floats(args.budgets)
    else:
        budgets = sorted({fes for t in traces for fes, _ in t.records})
    curve = compute_ecdf(traces, targets, budgets)
    lines = ["budget,proportion"]
    lines += [f"{float(b)!r},{float(p)!r}"
              for b, p in zip(curve.budgets, curve.proportion)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out} ({len(traces)} traces, {len(targets)} targets)")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_heatmap(args) -> int:
    trace = read_trace(args.trace)
    gen_data = trace.header.get("final_generator")
    if gen_data is None:
        print("error: trace carries no generator (not an opt-gan run)",
              file=sys.stderr)
        return 2
    gen = params_from_dict(gen_data)
    try:
        nx, ny = (int(p) for p in args.res.lower().split("x"))
    except ValueError:
        print(f"error: cannot parse resolution {args.res!r}", file=sys.stderr)
        return 2
    if args.bounds:
        xlow, xhigh, ylow, yhigh = _parse_floats(args.bounds)
        bounds = Box(np.array([xlow, ylow]), np.array([xhigh, yhigh]))
    else:
        problem = trace.header["problem"]
        bounds = Box(np.asarray(problem["domain_low"], dtype=np.float64),
                     np.asarray(problem["domain_high"], dtype=np.float64))
    rng = np.random.default_rng(args.seed)
    try:
        export_generator_heatmap(gen, bounds, (nx, ny), args.samples, rng,
                                 path=args.out)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} ({nx}x{ny} grid, {args.samples} samples)")
    return 0


def _cmd_bench(args) -> int:
    if args.action == "list":
        print(f"{'kernel':24s} {'domain':16s} {'min_dim':8s} {'shifted':8s} rotated")
        for name in sorted(KERNELS):
            spec = KERNELS[name]
            domain = f"[{spec.bounds[0]:g}, {spec.bounds[1]:g}]^n"
            print(f"{name:24s} {domain:16s} {spec.min_dim:<8d} "
                  f"{str(spec.shifted):8s} {spec.rotated_default}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "ecdf": _cmd_ecdf, "heatmap": _cmd_heatmap,
                "bench": _cmd_bench}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
