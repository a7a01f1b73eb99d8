"""Command-line front end: single runs, experiment grids, low-rank
approximation reports, and posterior-RMSE studies."""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import harness
from .kernels import MATERN52, SQUARED_EXPONENTIAL, KernelHyperparams, build_gram
from .loop import FULL, GSSBO, RSSBO, RunConfig, run as run_loop
from .nystrom import build_report
from .objectives import make_objective

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

_STRATEGY = click.Choice([GSSBO, RSSBO, FULL])
_KERNEL = click.Choice([MATERN52, SQUARED_EXPONENTIAL])
_BETA = click.Choice(["constant", "srinivas", "gssbo_adjusted"])


def _objective_id(objective: str, dim: int | None) -> str:
    if dim is not None and "_" not in objective:
        return f"{objective}_{dim}"
    return objective


class _Group(click.Group):
    """Exit-code policy: 0 success, 1 usage error, 2 runtime failure."""

    def main(self, *args, standalone_mode=True, **kwargs):
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.exceptions.Exit as exc:
            sys.exit(exc.exit_code)
        except click.UsageError as exc:
            exc.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as exc:
            exc.show()
            sys.exit(EXIT_USAGE)
        except click.exceptions.Abort:
            sys.exit(EXIT_USAGE)
        if standalone_mode:
            sys.exit(EXIT_OK)
        return rv


@click.group(cls=_Group)
def main():
    """Subset-based GP-UCB optimization engine."""


@main.command("run")
@click.option("--objective", required=True, help="Objective id, e.g. hartmann6 or levy_10.")
@click.option("--dim", type=int, default=None, help="Dimension for parametric objectives.")
@click.option("--budget", type=int, required=True)
@click.option("--n0", type=int, default=20, show_default=True)
@click.option("--strategy", type=_STRATEGY, default=GSSBO, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--z-factor", type=float, default=4.0, show_default=True)
@click.option("--fixed-m", type=int, default=None, help="Fixed buffer size; bypasses the timing policy.")
@click.option("--noise", type=float, default=0.01, show_default=True)
@click.option("--kernel", type=_KERNEL, default=MATERN52, show_default=True)
@click.option("--beta", type=_BETA, default="srinivas", show_default=True)
@click.option("--delta", type=float, default=0.1, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Trace CSV path.")
@click.option("--trace-subsets", is_flag=True, help="Also write retained-index rows per iteration.")
def run_cmd(objective, dim, budget, n0, strategy, seed, z_factor, fixed_m,
            noise, kernel, beta, delta, out, trace_subsets):
    """Execute one optimization run and print a summary line."""
    try:
        make_objective(_objective_id(objective, dim))
        config = RunConfig(
            objective=_objective_id(objective, dim), budget=budget, n0=n0,
            strategy=strategy, seed=seed, z_factor=z_factor,
            fixed_buffer_size=fixed_m, noise_variance=noise, kernel=kernel,
            beta_kind=beta, delta=delta, track_subsets=trace_subsets,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        record = run_loop(config)
    except Exception as exc:
        click.echo(f"run failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    if out:
        harness.write_trace(record, out)
        if trace_subsets:
            root, ext = os.path.splitext(out)
            harness.subset_dump(record, root + "_subsets" + ext)
    last = record.rows[-1]
    click.echo(json.dumps({
        "objective": config.objective, "strategy": strategy, "seed": seed,
        "best": last.best_so_far, "simple_regret": last.simple_regret,
        "cum_regret": last.cum_regret,
        "switch_iteration": record.switch_iteration,
        "buffer_size": record.buffer_size,
        "total_time_s": record.total_time_s,
    }))


@main.command("grid")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="JSON with objectives, strategies, seeds plus shared run settings.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--workers", type=int, default=1, show_default=True)
def grid_cmd(config_path, out_dir, workers):
    """Run an objectives x strategies x seeds grid; traces and summary.json."""
    with open(config_path) as fh:
        try:
            grid = json.load(fh)
        except json.JSONDecodeError as exc:
            raise click.UsageError(f"bad grid config: {exc}")
    try:
        code = harness.run_grid(grid, out_dir, max_workers=workers)
    except harness.GridConfigError as exc:
        raise click.UsageError(str(exc))
    sys.exit(code)


@main.command("nystrom")
@click.option("--objective", required=True)
@click.option("--dim", type=int, default=None)
@click.option("--n", "n_points", type=int, default=120, show_default=True)
@click.option("--m", "subset_size", type=int, default=30, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise", type=float, default=0.01, show_default=True)
@click.option("--lengthscale", type=float, default=None, help="Defaults to 20%% of the domain diameter.")
@click.option("--kernel", type=_KERNEL, default=MATERN52, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def nystrom_cmd(objective, dim, n_points, subset_size, seed, noise, lengthscale, kernel, out):
    """Report the low-rank approximation and its posterior error bounds."""
    try:
        obj = make_objective(_objective_id(objective, dim))
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if not 1 <= subset_size <= n_points:
        raise click.UsageError("require 1 <= m <= n")
    rng = np.random.default_rng(seed)
    lo, hi = obj.bounds[:, 0], obj.bounds[:, 1]
    pts = lo + rng.random((n_points, obj.dim)) * (hi - lo)
    y = obj.evaluate_many(pts) + np.sqrt(noise) * rng.standard_normal(n_points)
    ell = lengthscale or 0.2 * float(np.linalg.norm(hi - lo))
    hp = KernelHyperparams(lengthscales=ell, signal_variance=float(np.var(y)) or 1.0,
                           noise_variance=noise)
    try:
        K = build_gram(pts, hp, kernel)
        x_star = lo + rng.random(obj.dim) * (hi - lo)
        from .kernels import cross_gram
        k_star = cross_gram(x_star[None, :], pts, hp, kernel)[0]
        report = build_report(K, y, k_star, noise, subset_size)
    except Exception as exc:
        click.echo(f"analysis failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    text = report.to_json()
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


@main.command("rmse")
@click.option("--objective", required=True)
@click.option("--dim", type=int, default=None)
@click.option("--budget", type=int, required=True)
@click.option("--n0", type=int, default=20, show_default=True)
@click.option("--strategy", type=_STRATEGY, default=GSSBO, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--fixed-m", type=int, default=None)
@click.option("--noise", type=float, default=0.01, show_default=True)
@click.option("--grid-size", type=int, default=512, show_default=True)
@click.option("--start", "start_iteration", type=int, default=None,
              help="First iteration included in the series.")
@click.option("--out", type=click.Path(), default=None, help="CSV of (t, rmse).")
def rmse_cmd(objective, dim, budget, n0, strategy, seed, fixed_m, noise,
             grid_size, start_iteration, out):
    """Posterior-mean RMSE against the noiseless objective over the run."""
    try:
        make_objective(_objective_id(objective, dim))
        config = RunConfig(
            objective=_objective_id(objective, dim), budget=budget, n0=n0,
            strategy=strategy, seed=seed, fixed_buffer_size=fixed_m,
            noise_variance=noise, track_models=True,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        record = run_loop(config)
        series = harness.rmse_study(record, test_grid_size=grid_size,
                                    start_iteration=start_iteration)
    except Exception as exc:
        click.echo(f"rmse study failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    if out:
        with open(out, "w") as fh:
            fh.write("t,rmse\n")
            for t, v in series:
                fh.write(f"{t},{v:.17g}\n")
    click.echo(json.dumps({
        "objective": config.objective, "strategy": strategy,
        "n_points": len(series),
        "final_rmse": series[-1][1] if series else None,
        "mean_rmse": float(np.mean([v for _, v in series])) if series else None,
    }))


if __name__ == "__main__":
    main()
