"""End-to-end optimization loop for the three strategies: gradient subset
(gssbo), random subset (rssbo), and full-data GP-UCB."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import acquisition as acq
from . import buffer as bufmod
from .gp import (Dataset, GPModel, HyperparamSearchConfig, fit,
                 fit_hyperparameters)
from .kernels import MATERN52, KernelHyperparams, build_gram
from .objectives import Objective, make_objective
from .select import EmbeddingTracker, select_subset

GSSBO = "gssbo"
RSSBO = "rssbo"
FULL = "full"
STRATEGIES = (GSSBO, RSSBO, FULL)

PHASE_FULL = "full"
PHASE_SELECTED = "selected"


@dataclass(frozen=True)
class RunConfig:
    objective: str
    budget: int
    strategy: str = GSSBO
    n0: int = 20
    seed: int = 0
    noise_variance: float = 0.01
    z_factor: float = 4.0
    fixed_buffer_size: int | None = None
    kernel: str = MATERN52
    refit_every: int = 10       # 0 disables hyperparameter refitting
    beta_kind: str = acq.SRINIVAS
    beta_constant: float = 4.0
    delta: float = 0.1
    standardize: bool = True
    n_candidates: int | None = None
    n_polish: int = 5
    initial_window: int | None = None  # defaults to n0
    track_models: bool = False
    track_subsets: bool = False
    hyperparam_starts: int = 8
    # When set, MLE is skipped and these hyperparameters are used throughout.
    fixed_lengthscale: float | None = None
    fixed_signal_variance: float = 1.0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0 < self.n0 < self.budget:
            raise ValueError("require 0 < n0 < budget")
        if self.noise_variance < 0:
            raise ValueError("noise variance must be >= 0")


@dataclass(frozen=True)
class IterationRow:
    t: int
    x: np.ndarray
    y: float
    best_so_far: float
    simple_regret: float
    inst_regret: float
    cum_regret: float
    iter_time_s: float
    fit_time_s: float
    subset_size: int
    phase: str
    sigma2_pre: float  # latent posterior variance at x before observing it


@dataclass(frozen=True)
class ModelSnapshot:
    t: int
    active_indices: np.ndarray
    hyperparams: KernelHyperparams
    y_shift: float
    y_scale: float


@dataclass
class ExperimentRecord:
    config: RunConfig
    rows: list
    dataset: Dataset
    switch_iteration: int | None
    buffer_size: int | None
    model_snapshots: list = field(default_factory=list)
    subset_traces: list = field(default_factory=list)  # (t, indices) post-switch

    @property
    def total_time_s(self) -> float:
        return sum(r.iter_time_s for r in self.rows)

    def final_cumulative_regret(self) -> float:
        return self.rows[-1].cum_regret


def instantaneous_regret(objective: Objective, x_t) -> float:
    """f(x*) - f(x_t) using the noiseless objective."""
    if objective.optimum_value is None:
        raise ValueError(f"objective {objective.id} has no known optimum")
    return objective.optimum_value - objective.evaluate(x_t)


def information_gain(posterior_variances, noise_variance: float) -> float:
    """Chain-rule mutual information: 0.5 * sum log(1 + var / noise)."""
    if noise_variance <= 0:
        raise ValueError("noise variance must be > 0")
    v = np.asarray(list(posterior_variances), dtype=float)
    return float(0.5 * np.sum(np.log1p(v / noise_variance)))


def two_phase_split(record: ExperimentRecord) -> tuple[float, float]:
    """(regret before the switch, regret after); sums exactly to the total."""
    r_full = sum(r.inst_regret for r in record.rows if r.phase == PHASE_FULL)
    r_selected = sum(r.inst_regret for r in record.rows if r.phase == PHASE_SELECTED)
    return r_full, r_selected


class _Standardizer:
    """Frozen-at-refit shift/scale of observations so MLE stays well scaled."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.shift = 0.0
        self.scale = 1.0

    def refresh(self, y: np.ndarray) -> None:
        if not self.enabled:
            return
        self.shift = float(np.mean(y))
        std = float(np.std(y))
        self.scale = std if std > 1e-8 else 1.0

    def forward(self, y: np.ndarray) -> np.ndarray:
        return (y - self.shift) / self.scale


def run(config: RunConfig, clock=None) -> ExperimentRecord:
    """Execute one seeded optimization run and return its full trace.

    ``clock`` is an injectable monotonic time source (callable returning
    seconds); the process clock is used when omitted.
    """
    clock = clock or time.perf_counter
    objective = make_objective(config.objective)
    bounds = objective.bounds
    lo, hi = bounds[:, 0], bounds[:, 1]
    d = objective.dim
    rng = np.random.default_rng(config.seed)

    schedule = acq.BetaSchedule(
        kind=config.beta_kind, delta=config.delta, d=d,
        r=float(np.linalg.norm(hi - lo)), constant_value=config.beta_constant,
    )
    acq_cfg = acq.AcquisitionSearchConfig(
        n_candidates=config.n_candidates, n_polish=config.n_polish,
    )

    # Initial design: seeded uniform points in the box.
    X = lo + rng.random((config.n0, d)) * (hi - lo)
    f_true = objective.evaluate_many(X)
    y = f_true + np.sqrt(config.noise_variance) * rng.standard_normal(config.n0)
    X = list(X)
    y = list(y)

    scaler = _Standardizer(config.standardize)
    rows: list[IterationRow] = []
    cum_regret = 0.0
    best_so_far = -np.inf
    for i in range(config.n0):
        inst = objective.optimum_value - float(f_true[i])
        cum_regret += inst
        best_so_far = max(best_so_far, float(y[i]))
        rows.append(IterationRow(
            t=i + 1, x=np.asarray(X[i]), y=float(y[i]), best_so_far=best_so_far,
            simple_regret=objective.optimum_value - float(np.max(f_true[: i + 1])),
            inst_regret=inst, cum_regret=cum_regret, iter_time_s=0.0,
            fit_time_s=0.0, subset_size=i + 1, phase=PHASE_FULL, sigma2_pre=np.nan,
        ))

    def dataset() -> Dataset:
        return Dataset(points=np.asarray(X), observations=np.asarray(y), bounds=bounds)

    def refit_hyperparams(ds: Dataset, idx, previous: KernelHyperparams | None):
        if config.fixed_lengthscale is not None:
            return KernelHyperparams(
                lengthscales=config.fixed_lengthscale,
                signal_variance=config.fixed_signal_variance,
                noise_variance=config.noise_variance,
            )
        scaler.refresh(ds.observations[idx])
        std_ds = Dataset(points=ds.points, observations=scaler.forward(ds.observations),
                         bounds=bounds)
        noise_std = config.noise_variance / scaler.scale**2
        if previous is None:
            search = HyperparamSearchConfig(
                n_starts=config.hyperparam_starts, seed=config.seed,
                noise_variance=noise_std,
            )
        else:
            # Warm start from the previous optimum: cheap single-start polish.
            search = HyperparamSearchConfig(
                n_starts=1, seed=config.seed, noise_variance=noise_std,
                starts=((float(previous.lengthscales[0]),
                         float(previous.signal_variance)),),
                max_sweeps=4, initial_step=0.25, min_step=0.05,
            )
        return fit_hyperparameters(std_ds, idx, config.kernel, search)

    policy = bufmod.BufferPolicyState(
        z_factor=config.z_factor,
        initial_window=config.initial_window or config.n0,
    )
    baseline_times: list[float] = []
    prev_iter_time: float | None = None
    tracker = EmbeddingTracker()
    snapshots: list[ModelSnapshot] = []
    subset_traces: list[tuple[int, np.ndarray]] = []
    switch_iteration: int | None = None

    ds = dataset()
    all_idx = np.arange(len(ds))
    hp = refit_hyperparams(ds, all_idx, None)
    model = _fit_standardized(config, ds, all_idx, hp, scaler, bounds)
    frozen_m = config.fixed_buffer_size

    for t in range(config.n0 + 1, config.budget + 1):
        tic = clock()

        beta_t = _beta_for_iteration(config, schedule, t)
        x_t = acq.optimize_acquisition(
            model, bounds, beta_t, seed=_derived_seed(config.seed, t), config=acq_cfg,
        )
        mean_pre, var_pre = _posterior_at(model, x_t, scaler)
        f_t = objective.evaluate(x_t)
        y_t = f_t + float(np.sqrt(config.noise_variance) * rng.standard_normal())
        X.append(np.asarray(x_t))
        y.append(y_t)
        ds = dataset()
        n = len(ds)
        all_idx = np.arange(n)
        newest = n - 1

        switched = policy.switched
        if frozen_m is not None:
            # Fixed-M override bypasses timing entirely.
            if not switched and n > frozen_m:
                switched = True
                policy = replace(policy, switched=True, buffer_size=int(frozen_m))
        else:
            if policy.t_bar is None:
                if len(baseline_times) >= policy.initial_window:
                    policy = bufmod.establish_baseline(policy, baseline_times)
            if policy.t_bar is not None and prev_iter_time is not None:
                policy = bufmod.observe_iteration(policy, prev_iter_time, n)
            switched = policy.switched
        if switched and switch_iteration is None:
            switch_iteration = t

        if config.strategy == FULL:
            # The full strategy never truncates; the policy still runs so the
            # switch iteration is observable for diagnostics.
            switched = False
        if switched:
            # Selection uses the current hyperparameters; a refit (below) then
            # runs on the chosen subset.
            fit_idx = _choose_subset(
                config, ds, hp, scaler, tracker, policy.buffer_size, newest, rng,
                subset_traces, t,
            )
            phase = PHASE_SELECTED
        else:
            fit_idx = all_idx
            phase = PHASE_FULL

        # fit_time covers the GP fit step only (hyperparameter refit included);
        # subset selection is timed as part of the overall iteration.
        fit_tic = clock()
        refit_due = config.refit_every > 0 and (
            (t - config.n0) % config.refit_every == 0 or t == switch_iteration
        )
        if refit_due:
            hp = refit_hyperparams(ds, fit_idx, hp)

        model = _fit_standardized(config, ds, fit_idx, hp, scaler, bounds)
        fit_time = clock() - fit_tic

        iter_time = clock() - tic
        prev_iter_time = iter_time
        if policy.t_bar is None and frozen_m is None:
            baseline_times.append(iter_time)

        inst = objective.optimum_value - f_t
        cum_regret += inst
        best_so_far = max(best_so_far, y_t)
        simple = min(rows[-1].simple_regret, inst)
        rows.append(IterationRow(
            t=t, x=np.asarray(x_t), y=y_t, best_so_far=best_so_far,
            simple_regret=simple, inst_regret=inst, cum_regret=cum_regret,
            iter_time_s=iter_time, fit_time_s=fit_time,
            subset_size=int(fit_idx.shape[0]), phase=phase, sigma2_pre=var_pre,
        ))
        if config.track_models:
            snapshots.append(ModelSnapshot(
                t=t, active_indices=np.asarray(fit_idx).copy(),
                hyperparams=model.hyperparams,
                y_shift=scaler.shift, y_scale=scaler.scale,
            ))

    return ExperimentRecord(
        config=config, rows=rows, dataset=ds,
        switch_iteration=switch_iteration,
        buffer_size=policy.buffer_size,
        model_snapshots=snapshots,
        subset_traces=subset_traces,
    )


def _fit_standardized(config: RunConfig, ds: Dataset, fit_idx, hp, scaler,
                      bounds) -> GPModel:
    std_ds = Dataset(points=ds.points, observations=scaler.forward(ds.observations),
                     bounds=bounds)
    hp_eff = KernelHyperparams(
        lengthscales=hp.lengthscales, signal_variance=hp.signal_variance,
        noise_variance=config.noise_variance / scaler.scale**2,
    )
    return fit(std_ds, fit_idx, hp_eff, config.kernel)


def _derived_seed(seed: int, t: int) -> int:
    return int(np.random.SeedSequence(entropy=(seed, t)).generate_state(1)[0])


def _beta_for_iteration(config: RunConfig, schedule, t: int) -> float:
    # The adjusted schedule needs subset penalty terms; the loop runs it with
    # the no-penalty form (penalties belong to offline theory experiments).
    return acq.beta(schedule, t)


def _posterior_at(model: GPModel, x, scaler: _Standardizer):
    from .gp import posterior_batch

    mean, var = posterior_batch(model, np.atleast_2d(x))
    return (float(mean[0]) * scaler.scale + scaler.shift,
            float(var[0]) * scaler.scale**2)


def _choose_subset(config: RunConfig, ds: Dataset, hp, scaler, tracker,
                   M: int, newest: int, rng, subset_traces, t: int) -> np.ndarray:
    n = len(ds)
    if M >= n:
        return np.arange(n)
    if config.strategy == FULL:
        return np.arange(n)
    if config.strategy == RSSBO:
        others = np.delete(np.arange(n), newest)
        chosen = rng.choice(others, size=M - 1, replace=False)
        idx = np.sort(np.append(chosen, newest))
    else:
        noise_std = config.noise_variance / scaler.scale**2
        K = build_gram(ds.points, hp, config.kernel)
        K_y = K + noise_std * np.eye(n)
        stamp = (float(hp.lengthscales[0]), float(hp.signal_variance), noise_std)
        embedding = tracker.embeddings(K_y, stamp)
        selection = select_subset(embedding, M, newest)
        idx = np.sort(selection.indices)
    if config.track_subsets:
        subset_traces.append((t, idx.copy()))
    return idx
