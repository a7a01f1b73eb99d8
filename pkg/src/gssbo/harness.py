"""Experiment harness: trace files, grid execution, summaries, RMSE study."""

from __future__ import annotations

import csv
import json
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .gp import Dataset, fit, posterior_batch
from .loop import FULL, ExperimentRecord, RunConfig, run
from .objectives import make_objective

TRACE_FIXED_COLUMNS = [
    "t", "strategy", "seed", "best_so_far", "simple_regret", "regret",
    "cum_regret", "iter_time_ms", "subset_size", "phase",
]

_FLOAT_FMT = "%.17g"


def trace_header(dim: int) -> list[str]:
    return TRACE_FIXED_COLUMNS + ["y"] + [f"x_{j}" for j in range(dim)]


def write_trace(record: ExperimentRecord, path: str) -> None:
    """One CSV row per iteration; floats at 17 significant digits."""
    dim = record.dataset.points.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace_header(dim))
        for row in record.rows:
            writer.writerow(
                [row.t, record.config.strategy, record.config.seed]
                + [_FLOAT_FMT % v for v in (
                    row.best_so_far, row.simple_regret, row.inst_regret,
                    row.cum_regret, row.iter_time_s * 1000.0,
                )]
                + [row.subset_size, row.phase]
                + [_FLOAT_FMT % row.y]
                + [_FLOAT_FMT % v for v in row.x]
            )


def read_trace(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        out = []
        for raw in reader:
            parsed = dict(raw)
            for key, value in raw.items():
                if key in ("t", "seed", "subset_size"):
                    parsed[key] = int(value)
                elif key not in ("strategy", "phase"):
                    parsed[key] = float(value)
            out.append(parsed)
        return out


@dataclass
class SummaryRow:
    objective: str
    strategy: str
    n_seeds: int
    final_cum_regret_mean: float
    final_cum_regret_std: float
    total_time_mean_s: float
    runtime_ratio_vs_full: float | None
    switch_iteration_mean: float | None
    information_gain_mean: float


def summarize(records: list[ExperimentRecord]) -> list[SummaryRow]:
    """Aggregate per (objective, strategy) cell, with runtime ratios vs full."""
    from .loop import information_gain

    cells: dict[tuple[str, str], list[ExperimentRecord]] = {}
    for rec in records:
        cells.setdefault((rec.config.objective, rec.config.strategy), []).append(rec)

    full_time = {
        obj: float(np.mean([r.total_time_s for r in recs]))
        for (obj, strat), recs in cells.items() if strat == FULL
    }
    rows = []
    for (obj, strat), recs in sorted(cells.items()):
        finals = [r.final_cumulative_regret() for r in recs]
        times = [r.total_time_s for r in recs]
        switches = [r.switch_iteration for r in recs if r.switch_iteration is not None]
        gains = [
            information_gain(
                [row.sigma2_pre for row in r.rows if np.isfinite(row.sigma2_pre)],
                r.config.noise_variance,
            )
            for r in recs
        ]
        ratio = None
        if obj in full_time and full_time[obj] > 0:
            ratio = float(np.mean(times) / full_time[obj])
        rows.append(SummaryRow(
            objective=obj, strategy=strat, n_seeds=len(recs),
            final_cum_regret_mean=float(np.mean(finals)),
            final_cum_regret_std=float(np.std(finals)),
            total_time_mean_s=float(np.mean(times)),
            runtime_ratio_vs_full=ratio,
            switch_iteration_mean=float(np.mean(switches)) if switches else None,
            information_gain_mean=float(np.mean(gains)),
        ))
    return rows


def rmse_study(record: ExperimentRecord, objective=None, test_grid_size: int = 512,
               grid_seed: int = 12345, start_iteration: int | None = None) -> list[tuple[int, float]]:
    """Per-iteration RMSE of the posterior mean against the noiseless objective
    on a seeded uniform test grid. Requires model snapshots in the record."""
    if not record.model_snapshots:
        raise ValueError("record has no model snapshots; run with track_models=True")
    obj = objective or make_objective(record.config.objective)
    rng = np.random.default_rng(grid_seed)
    lo, hi = obj.bounds[:, 0], obj.bounds[:, 1]
    grid = lo + rng.random((test_grid_size, obj.dim)) * (hi - lo)
    truth = obj.evaluate_many(grid)

    series = []
    pts = record.dataset.points
    obs = record.dataset.observations
    for snap in record.model_snapshots:
        if start_iteration is not None and snap.t < start_iteration:
            continue
        y_std = (obs - snap.y_shift) / snap.y_scale
        ds = Dataset(points=pts, observations=y_std, bounds=obj.bounds)
        model = fit(ds, snap.active_indices, snap.hyperparams, record.config.kernel)
        mean, _ = posterior_batch(model, grid)
        mean = mean * snap.y_scale + snap.y_shift
        series.append((snap.t, float(np.sqrt(np.mean((mean - truth) ** 2)))))
    return series


def subset_dump(record: ExperimentRecord, path: str | None = None) -> list[tuple[int, list[int]]]:
    """Rows of (iteration, retained indices) for each post-switch iteration."""
    if not record.subset_traces:
        raise ValueError("record has no subset traces; run with track_subsets=True")
    rows = [(int(t), [int(i) for i in idx]) for t, idx in record.subset_traces]
    if path is not None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "indices"])
            for t, idx in rows:
                writer.writerow([t, " ".join(str(i) for i in idx)])
    return rows


class GridConfigError(Exception):
    pass


def _run_cell(args):
    config_kwargs, = args
    record = run(RunConfig(**config_kwargs))
    return config_kwargs, record


def run_grid(grid_config: dict, output_dir: str, max_workers: int = 1) -> int:
    """Execute objectives x strategies x seeds; write one trace per cell plus a
    JSON summary. Cell failures are recorded and the grid continues.

    Returns 0 on full success, 2 if any cell failed.
    """
    try:
        objectives = list(grid_config["objectives"])
        strategies = list(grid_config["strategies"])
        seeds = [int(s) for s in grid_config["seeds"]]
    except KeyError as exc:
        raise GridConfigError(f"missing grid config key: {exc}") from exc
    if not strategies:
        raise GridConfigError("no strategies")
    if not objectives:
        raise GridConfigError("no objectives")
    if not seeds:
        raise GridConfigError("no seeds")
    common = {k: v for k, v in grid_config.items()
              if k not in ("objectives", "strategies", "seeds", "max_workers")}

    cells = [
        dict(common, objective=obj, strategy=strat, seed=seed)
        for obj in objectives for strat in strategies for seed in seeds
    ]
    os.makedirs(output_dir, exist_ok=True)

    records, failures = [], []
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(_run_cell, (kwargs,)) for kwargs in cells]
            for fut, kwargs in zip(futures, cells):
                try:
                    _, record = fut.result()
                    records.append(record)
                except Exception:
                    failures.append({"cell": kwargs, "error": traceback.format_exc()})
    else:
        for kwargs in cells:
            try:
                records.append(run(RunConfig(**kwargs)))
            except Exception:
                failures.append({"cell": kwargs, "error": traceback.format_exc()})

    for record in records:
        name = f"trace_{record.config.objective}_{record.config.strategy}_s{record.config.seed}.csv"
        write_trace(record, os.path.join(output_dir, name))

    summary = [asdict(row) for row in summarize(records)]
    with open(os.path.join(output_dir, "summary.json"), "w") as fh:
        json.dump({"summary": summary, "failures": failures}, fh, indent=2)
    return 2 if failures else 0
