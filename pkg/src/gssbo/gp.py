"""Exact GP regression: fitting, posterior prediction and MLE hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from .kernels import MATERN52, KernelHyperparams, build_gram, cross_gram

# Diagonal jitter escalation used when a Cholesky factorization fails.
JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


class NotPositiveDefinite(Exception):
    """Raised when K + noise*I cannot be factorized even after max jitter."""


@dataclass(frozen=True)
class Dataset:
    """Input points inside a box domain with noisy scalar observations."""

    points: np.ndarray
    observations: np.ndarray
    bounds: np.ndarray  # shape (d, 2)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        obs = np.asarray(self.observations, dtype=float).ravel()
        bnd = np.atleast_2d(np.asarray(self.bounds, dtype=float))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "bounds", bnd)
        if pts.shape[0] != obs.shape[0]:
            raise ValueError("points and observations must have equal length")
        if bnd.shape != (pts.shape[1], 2):
            raise ValueError("bounds must have shape (d, 2)")
        lo, hi = bnd[:, 0], bnd[:, 1]
        if np.any(pts < lo - 1e-9) or np.any(pts > hi + 1e-9):
            raise ValueError("points must lie within bounds")

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class GPModel:
    """Immutable fitted posterior state over a subset of dataset indices."""

    active_indices: np.ndarray
    hyperparams: KernelHyperparams
    family: str
    chol: np.ndarray          # lower triangular factor of K + noise*I
    alpha: np.ndarray         # (K + noise*I)^{-1} (y - mean_const)
    mean_const: float
    X_active: np.ndarray
    y_active: np.ndarray
    jitter: float

    @property
    def n_active(self) -> int:
        return self.active_indices.shape[0]


def chol_with_jitter(K_y: np.ndarray):
    """Lower Cholesky of K_y with escalating diagonal jitter.

    Returns (L, jitter_used); raises NotPositiveDefinite after the last step.
    """
    n = K_y.shape[0]
    for jitter in JITTERS:
        try:
            L = cholesky(K_y + jitter * np.eye(n), lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            continue
    raise NotPositiveDefinite(
        f"Cholesky failed for {n}x{n} matrix after jitter escalation to {JITTERS[-1]}"
    )


def fit(dataset: Dataset, active_indices, hp: KernelHyperparams,
        family: str = MATERN52, mean_const: float = 0.0) -> GPModel:
    """Fit an exact GP over the dataset rows named by ``active_indices``."""
    idx = np.asarray(active_indices, dtype=int)
    if idx.size == 0:
        raise ValueError("active_indices must be nonempty")
    X = dataset.points[idx]
    y = dataset.observations[idx]
    K = build_gram(X, hp, family)
    K_y = K + hp.noise_variance * np.eye(idx.size)
    L, jitter = chol_with_jitter(K_y)
    alpha = cho_solve((L, True), y - mean_const)
    return GPModel(
        active_indices=idx,
        hyperparams=hp,
        family=family,
        chol=L,
        alpha=alpha,
        mean_const=mean_const,
        X_active=X,
        y_active=y,
        jitter=jitter,
    )


def posterior_batch(model: GPModel, X_star) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at each row of ``X_star``."""
    X_star = np.atleast_2d(np.asarray(X_star, dtype=float))
    if X_star.shape[1] != model.X_active.shape[1]:
        raise ValueError(
            f"dimension mismatch: {X_star.shape[1]} vs {model.X_active.shape[1]}"
        )
    k_star = cross_gram(model.X_active, X_star, model.hyperparams, model.family)
    mean = model.mean_const + k_star.T @ model.alpha
    v = solve_triangular(model.chol, k_star, lower=True)
    var = model.hyperparams.signal_variance - np.sum(v * v, axis=0)
    var = np.where(var < 1e-12, 0.0, var)
    return mean, var


def posterior(model: GPModel, dataset: Dataset, x_star) -> tuple[float, float]:
    """Posterior mean and variance at a single test point."""
    mean, var = posterior_batch(model, np.atleast_2d(x_star))
    return float(mean[0]), float(var[0])


def log_marginal_likelihood(model: GPModel, dataset: Dataset | None = None) -> float:
    """Gaussian log marginal likelihood of the active observations."""
    y = model.y_active - model.mean_const
    n = y.shape[0]
    return float(
        -0.5 * y @ model.alpha
        - np.sum(np.log(np.diag(model.chol)))
        - 0.5 * n * np.log(2.0 * np.pi)
    )


@dataclass(frozen=True)
class HyperparamSearchConfig:
    """Multi-start coordinate-descent settings for MLE hyperparameter fitting.

    The observation noise is held fixed at ``noise_variance`` rather than
    learned. ``starts`` may carry explicit initial (lengthscale, signal
    variance) pairs; remaining starts are sampled log-uniform inside bounds.
    """

    n_starts: int = 8
    seed: int = 0
    noise_variance: float = 0.01
    max_sweeps: int = 20
    initial_step: float = 0.5
    min_step: float = 1e-3
    log_signal_bounds: tuple[float, float] = (-6.0, 6.0)
    starts: tuple[tuple[float, float], ...] = ()


def fit_hyperparameters(dataset: Dataset, active_indices, family: str = MATERN52,
                        search_config: HyperparamSearchConfig | None = None,
                        mean_const: float = 0.0) -> KernelHyperparams:
    """Maximize the log marginal likelihood over (lengthscale, signal variance).

    Seeded multi-start coordinate descent on the log parameters; isotropic
    lengthscale. Returns hyperparams at least as good as every start.
    """
    cfg = search_config or HyperparamSearchConfig()
    idx = np.asarray(active_indices, dtype=int)
    if idx.size < 2:
        raise ValueError("need at least 2 active points to fit hyperparameters")

    lo, hi = dataset.bounds[:, 0], dataset.bounds[:, 1]
    diameter = float(np.linalg.norm(hi - lo))
    log_ls_bounds = (np.log(1e-2 * diameter), np.log(1e2 * diameter))
    log_sv_bounds = cfg.log_signal_bounds

    def objective(theta) -> float:
        hp = KernelHyperparams(
            lengthscales=np.exp(theta[0]),
            signal_variance=np.exp(theta[1]),
            noise_variance=cfg.noise_variance,
        )
        try:
            model = fit(dataset, idx, hp, family, mean_const)
        except NotPositiveDefinite:
            return -np.inf
        return log_marginal_likelihood(model)

    rng = np.random.default_rng(cfg.seed)
    starts = [np.array([np.log(ls), np.log(sv)]) for ls, sv in cfg.starts]
    # Data-driven guess: median pairwise distance and observation variance.
    X = dataset.points[idx]
    y = dataset.observations[idx]
    med = np.median(
        np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)[np.triu_indices(idx.size, 1)]
    )
    guess_ls = np.clip(med if med > 0 else diameter / 4, *np.exp(log_ls_bounds))
    guess_sv = np.clip(np.var(y - mean_const) if np.var(y) > 0 else 1.0,
                       np.exp(log_sv_bounds[0]), np.exp(log_sv_bounds[1]))
    starts.append(np.array([np.log(guess_ls), np.log(guess_sv)]))
    while len(starts) < cfg.n_starts:
        starts.append(np.array([
            rng.uniform(*log_ls_bounds),
            rng.uniform(*log_sv_bounds),
        ]))
    starts = starts[: max(cfg.n_starts, len(cfg.starts))]

    bounds = (log_ls_bounds, log_sv_bounds)
    best_theta, best_val = None, -np.inf
    for theta0 in starts:
        theta = np.clip(theta0, [b[0] for b in bounds], [b[1] for b in bounds])
        val = objective(theta)
        step = cfg.initial_step
        while step >= cfg.min_step:
            improved = False
            for j in range(2):
                for direction in (+1.0, -1.0):
                    cand = theta.copy()
                    cand[j] = np.clip(cand[j] + direction * step, *bounds[j])
                    cand_val = objective(cand)
                    if cand_val > val:
                        theta, val = cand, cand_val
                        improved = True
            if not improved:
                step *= 0.5
        if val > best_val:
            best_theta, best_val = theta, val

    if best_theta is None or not np.isfinite(best_val):
        raise NotPositiveDefinite("all hyperparameter candidates failed to fit")
    return KernelHyperparams(
        lengthscales=np.exp(best_theta[0]),
        signal_variance=np.exp(best_theta[1]),
        noise_variance=cfg.noise_variance,
    )
