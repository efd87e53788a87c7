"""Experiment harness: baselines, batch runner, ECDF curves, heatmap export.

Experiments are grids of (problem, optimizer, seed) cells.  Every cell runs to
one of the three termination rules (precision reached, budget exhausted, time
limit) and produces one trace file.  Cells are independent, own their RNG
stream, and may run concurrently without changing any trace's content.
"""

from __future__ import annotations

import copy
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import (KERNELS, BenchmarkProblem, EvalCounter, evaluate,
                         make_problem, problem_to_dict)
from .domain import Box
from .nets import MlpParams, mlp_forward
from .optimizer import OptGanConfig, optimize
from .trace import RunTrace, write_trace

OPTIMIZER_NAMES = ("opt-gan", "random-search", "nelder-mead")

DEFAULT_PRECISION = 1e-8


class ConfigError(ValueError):
    """Raised for unusable experiment configurations (unknown names, bad types)."""


def _baseline_header(problem: BenchmarkProblem, name: str, seed: int,
                     config: dict) -> dict:
    return {
        "format": "optgan-trace-v1",
        "build": __version__,
        "optimizer": name,
        "problem": problem_to_dict(problem),
        "config": config,
        "seed": seed,
    }


class _BudgetTracker:
    """Running-best bookkeeping shared by the baseline optimizers."""

    def __init__(self, problem: BenchmarkProblem, precision: float,
                 time_limit: float | None):
        self.problem = problem
        self.precision = precision
        self.time_limit = time_limit
        self.counter = EvalCounter()
        self.best = math.inf
        self.best_x: np.ndarray | None = None
        self.records: list[tuple[int, float]] = []
        self.start = time.monotonic()

    def query(self, x: np.ndarray) -> float:
        value = evaluate(self.problem, x, self.counter)
        if not math.isfinite(value):
            value = math.inf
        if value < self.best:
            self.best = value
            self.best_x = np.array(x, dtype=np.float64)
            self.records.append((self.counter.count, self.indicator()))
        return value

    def indicator(self) -> float:
        return self.best - self.problem.f_star - self.precision

    def solved(self) -> bool:
        return self.indicator() < 0.0

    def out_of_time(self) -> bool:
        return (self.time_limit is not None
                and time.monotonic() - self.start > self.time_limit)

    def finish(self, reason: str) -> tuple[list[tuple[int, float]], str]:
        records = list(self.records)
        if not records or records[-1][0] != self.counter.count:
            records.append((self.counter.count, self.indicator()))
        return records, reason


def random_search_baseline(problem: BenchmarkProblem, max_fes: int,
                           rng: np.random.Generator,
                           precision: float = DEFAULT_PRECISION,
                           time_limit_secs: float | None = None) -> RunTrace:
    """Uniform random queries on the domain; the simplest exploration-only
    reference point."""
    if max_fes < 1:
        raise ValueError("max_fes must be >= 1")
    tracker = _BudgetTracker(problem, precision, time_limit_secs)
    reason = "budget"
    while tracker.counter.count < max_fes:
        tracker.query(problem.domain.sample(rng, 1)[0])
        if tracker.solved():
            reason = "precision"
            break
        if tracker.out_of_time():
            reason = "time"
            break
    records, reason = tracker.finish(reason)
    header = _baseline_header(problem, "random-search", -1,
                              {"max_fes": max_fes, "precision": precision})
    header["evaluations"] = tracker.counter.count
    return RunTrace(header, records, [], reason)


def nelder_mead_baseline(problem: BenchmarkProblem, max_fes: int,
                         rng: np.random.Generator,
                         precision: float = DEFAULT_PRECISION,
                         time_limit_secs: float | None = None) -> RunTrace:
    """Downhill simplex with textbook coefficients (reflection 1, expansion 2,
    contraction 0.5, shrink 0.5) and restart from a fresh uniform simplex when
    the current one collapses."""
    if max_fes < 1:
        raise ValueError("max_fes must be >= 1")
    n = problem.dim
    tracker = _BudgetTracker(problem, precision, time_limit_secs)
    reason = "budget"

    def budget_left() -> bool:
        return tracker.counter.count < max_fes

    stop = False
    while not stop and budget_left():
        # Fresh uniform simplex of n+1 vertices.
        points = list(problem.domain.sample(rng, n + 1))
        values = []
        for p in points:
            if not budget_left():
                stop = True
                break
            values.append(tracker.query(p))
            if tracker.solved():
                reason = "precision"
                stop = True
                break
            if tracker.out_of_time():
                reason = "time"
                stop = True
                break
        if stop or len(values) < n + 1:
            break

        while budget_left():
            order = np.argsort(values, kind="stable")
            points = [points[i] for i in order]
            values = [values[i] for i in order]
            # Collapse check: restart when the simplex has lost all extent.
            spread = max(np.max(np.abs(p - points[0])) for p in points[1:])
            if spread < 1e-12 or values[-1] - values[0] < 1e-15:
                break  # restart from uniform

            centroid = np.mean(points[:-1], axis=0)
            worst = points[-1]

            def step(x: np.ndarray) -> float | None:
                if not budget_left():
                    return None
                return tracker.query(x)

            reflected = centroid + 1.0 * (centroid - worst)
            f_r = step(reflected)
            if f_r is None:
                break
            if f_r < values[0]:
                expanded = centroid + 2.0 * (centroid - worst)
                f_e = step(expanded)
                if f_e is not None and f_e < f_r:
                    points[-1], values[-1] = expanded, f_e
                else:
                    points[-1], values[-1] = reflected, f_r
            elif f_r < values[-2]:
                points[-1], values[-1] = reflected, f_r
            else:
                contracted = centroid + 0.5 * (worst - centroid)
                f_c = step(contracted)
                if f_c is None:
                    break
                if f_c < values[-1]:
                    points[-1], values[-1] = contracted, f_c
                else:
                    # Shrink all vertices toward the best one.
                    for i in range(1, n + 1):
                        points[i] = points[0] + 0.5 * (points[i] - points[0])
                        f_s = step(points[i])
                        if f_s is None:
                            break
                        values[i] = f_s
            if tracker.solved():
                reason = "precision"
                stop = True
                break
            if tracker.out_of_time():
                reason = "time"
                stop = True
                break

    records, reason = tracker.finish(reason)
    header = _baseline_header(problem, "nelder-mead", -1,
                              {"max_fes": max_fes, "precision": precision})
    header["evaluations"] = tracker.counter.count
    return RunTrace(header, records, [], reason)


@dataclass
class EcdfCurve:
    """Fraction of (trace, target) pairs solved within each budget."""

    budgets: np.ndarray
    proportion: np.ndarray


def compute_ecdf(traces, targets, budgets) -> EcdfCurve:
    """Empirical distribution of solving events over budgets.

    A (trace, target) pair counts as solved at budget ``b`` when some record
    with ``fes <= b`` has indicator strictly below the target.  The output is
    invariant to the ordering of traces and targets.
    """
    traces = list(traces)
    targets = [float(t) for t in targets]
    if not traces:
        raise ValueError("need at least one trace")
    if not targets or not all(math.isfinite(t) for t in targets):
        raise ValueError("targets must be non-empty and finite")
    budgets = np.asarray(sorted(float(b) for b in budgets))
    hits = []
    for trace in traces:
        for target in targets:
            fes = trace.first_fes_below(target)
            if fes is not None:
                hits.append(fes)
    hits_arr = np.asarray(sorted(hits), dtype=np.float64)
    total = len(traces) * len(targets)
    proportion = np.searchsorted(hits_arr, budgets, side="right") / total
    return EcdfCurve(budgets, proportion)


def default_ecdf_targets() -> list[float]:
    """Geometric target ladder 1e2 down to 1e-8."""
    return [10.0 ** e for e in range(2, -9, -1)]


@dataclass
class HeatmapGrid:
    """2-D histogram of generator samples on a bounded window."""

    bounds: Box
    nx: int
    ny: int
    counts: np.ndarray
    total_samples: int


def export_generator_heatmap(generator, bounds: Box, resolution: tuple[int, int],
                             n_samples: int = 1_000_000,
                             rng: np.random.Generator | None = None,
                             path=None) -> HeatmapGrid:
    """Monte-Carlo estimate of the generator's sampling distribution.

    ``generator`` is an :class:`MlpParams` or an optimizer state carrying one.
    Samples outside ``bounds`` are dropped, so the counts sum to the in-bounds
    sample count.  When ``path`` is given the grid is also written as CSV.
    """
    gen: MlpParams = getattr(generator, "gen", generator)
    if gen.out_dim != 2 or bounds.dim != 2:
        raise ValueError("heatmaps are only defined for 2-D generators")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    nx, ny = int(resolution[0]), int(resolution[1])
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be >= 1 in both axes")
    hist_range = [[bounds.low[0], bounds.high[0]], [bounds.low[1], bounds.high[1]]]
    counts = np.zeros((nx, ny), dtype=np.int64)
    remaining = n_samples
    while remaining > 0:
        batch = min(remaining, 131072)
        noise = rng.uniform(-1.0, 1.0, size=(batch, gen.in_dim))
        samples = mlp_forward(gen, noise)
        block, _, _ = np.histogram2d(samples[:, 0], samples[:, 1],
                                     bins=[nx, ny], range=hist_range)
        counts += block.astype(np.int64)
        remaining -= batch
    grid = HeatmapGrid(bounds, nx, ny, counts, n_samples)
    if path is not None:
        write_heatmap_csv(grid, path)
    return grid


def write_heatmap_csv(grid: HeatmapGrid, path) -> Path:
    """Row-major counts with one comment line stating bounds and resolution."""
    path = Path(path)
    lines = [f"# xlow={grid.bounds.low[0]!r} xhigh={grid.bounds.high[0]!r} "
             f"ylow={grid.bounds.low[1]!r} yhigh={grid.bounds.high[1]!r} "
             f"nx={grid.nx} ny={grid.ny} total_samples={grid.total_samples}"]
    for row in grid.counts:
        lines.append(",".join(str(int(c)) for c in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def validate_experiment_config(config: dict) -> dict:
    """Check an experiment description; returns it with defaults filled in.

    Schema: ``{"problems": [{"kernel", "dim", "instance_seed", "rotated"?}],
    "optimizers": [{"name", "overrides"?}], "seeds": [int], "max_fes": int,
    "time_limit_secs": float|null}``.
    """
    if not isinstance(config, dict):
        raise ConfigError("experiment config must be a JSON object")
    out = copy.deepcopy(config)
    problems = out.get("problems")
    if not isinstance(problems, list) or not problems:
        raise ConfigError("config needs a non-empty 'problems' list")
    for p in problems:
        if not isinstance(p, dict) or "kernel" not in p or "dim" not in p:
            raise ConfigError("each problem needs 'kernel' and 'dim'")
        if p["kernel"] not in KERNELS:
            raise ConfigError(f"unknown kernel {p['kernel']!r}")
        if int(p["dim"]) < KERNELS[p["kernel"]].min_dim:
            raise ConfigError(f"kernel {p['kernel']!r} requires dim >= "
                              f"{KERNELS[p['kernel']].min_dim}")
        p.setdefault("instance_seed", 0)
        p.setdefault("rotated", None)
    optimizers = out.get("optimizers")
    if not isinstance(optimizers, list) or not optimizers:
        raise ConfigError("config needs a non-empty 'optimizers' list")
    # Per-run seeds come from the 'seeds' sweep, never from overrides.
    known_overrides = set(OptGanConfig.__dataclass_fields__) - {"seed"}
    for o in optimizers:
        if not isinstance(o, dict) or o.get("name") not in OPTIMIZER_NAMES:
            raise ConfigError(f"optimizer name must be one of {OPTIMIZER_NAMES}")
        o.setdefault("overrides", {})
        if not isinstance(o["overrides"], dict):
            raise ConfigError("'overrides' must be an object")
        if o["name"] == "opt-gan":
            unknown = set(o["overrides"]) - known_overrides
        else:
            unknown = set(o["overrides"]) - {"precision", "max_fes"}
        if unknown:
            raise ConfigError(f"unknown overrides for {o['name']}: {sorted(unknown)}")
    seeds = out.get("seeds")
    if not isinstance(seeds, list) or not seeds or \
            not all(isinstance(s, int) for s in seeds):
        raise ConfigError("config needs a non-empty integer 'seeds' list")
    if "max_fes" not in out or int(out["max_fes"]) < 1:
        raise ConfigError("config needs a positive 'max_fes'")
    out.setdefault("time_limit_secs", None)
    return out


def _cell_filename(problem_desc: dict, optimizer: str, seed: int) -> str:
    rot = "r" if problem_desc.get("rotated") else "u"
    return (f"{problem_desc['kernel']}_{problem_desc['dim']}d"
            f"_i{problem_desc['instance_seed']}{rot}__{optimizer}__s{seed}.trace")


def run_cell(cell: dict) -> dict:
    """Run one (problem, optimizer, seed) cell and write its trace file.

    Top-level so worker processes can import it.  Returns
    ``{"path": str, "error": None}`` on success; the error field carries the
    failure message otherwise.
    """
    path = Path(cell["out_dir"]) / _cell_filename(cell["problem"],
                                                  cell["optimizer"], cell["seed"])
    try:
        spec = cell["problem"]
        rotated = spec.get("rotated")
        problem = make_problem(spec["kernel"], int(spec["dim"]),
                               int(spec["instance_seed"]),
                               rotated=None if rotated is None else bool(rotated))
        seed = int(cell["seed"])
        rng = np.random.default_rng(seed)
        overrides = dict(cell.get("overrides", {}))
        max_fes = int(overrides.pop("max_fes", cell["max_fes"]))
        time_limit = cell.get("time_limit_secs")
        name = cell["optimizer"]
        if name == "opt-gan":
            overrides["seed"] = seed
            overrides.setdefault("time_limit_secs", time_limit)
            config = OptGanConfig(max_fes=max_fes, **overrides)
            _, trace = optimize(problem, config, rng)
        elif name == "random-search":
            trace = random_search_baseline(
                problem, max_fes, rng,
                precision=float(overrides.get("precision", DEFAULT_PRECISION)),
                time_limit_secs=time_limit)
            trace.header["seed"] = seed
        elif name == "nelder-mead":
            trace = nelder_mead_baseline(
                problem, max_fes, rng,
                precision=float(overrides.get("precision", DEFAULT_PRECISION)),
                time_limit_secs=time_limit)
            trace.header["seed"] = seed
        else:
            raise ConfigError(f"unknown optimizer {name!r}")
        write_trace(trace, path)
        return {"path": str(path), "error": None}
    except Exception as exc:  # cell failures are reported, not raised
        return {"path": str(path), "error": f"{type(exc).__name__}: {exc}"}


def experiment_cells(config: dict, out_dir) -> list[dict]:
    """Expand a validated config into independent cell descriptions."""
    cells = []
    for p in config["problems"]:
        for o in config["optimizers"]:
            for seed in config["seeds"]:
                cells.append({
                    "problem": dict(p),
                    "optimizer": o["name"],
                    "overrides": dict(o.get("overrides", {})),
                    "seed": seed,
                    "max_fes": int(config["max_fes"]),
                    "time_limit_secs": config.get("time_limit_secs"),
                    "out_dir": str(out_dir),
                })
    return cells


def run_experiment(config: dict, out_dir, jobs: int = 1) -> list[dict]:
    """Run every cell of the experiment grid; returns per-cell results.

    The config is validated first (raising :class:`ConfigError`), the output
    directory is created, and cells run either inline or on a bounded process
    pool.  Each cell writes to its own file, so workers never contend.
    """
    config = validate_experiment_config(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = experiment_cells(config, out_dir)
    if jobs <= 1 or len(cells) == 1:
        return [run_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_cell, cells))
