"""UCB acquisition: confidence-width schedules and derivative-free maximization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gp import GPModel, posterior_batch

CONSTANT = "constant"
SRINIVAS = "srinivas"
GSSBO_ADJUSTED = "gssbo_adjusted"


@dataclass(frozen=True)
class BetaSchedule:
    kind: str = SRINIVAS
    delta: float = 0.1
    d: int = 1
    a: float = 1.0
    b: float = 1.0
    r: float = 1.0  # domain diameter
    constant_value: float = 4.0
    sigma_min_floor: float = 1e-3

    def __post_init__(self):
        if self.kind not in (CONSTANT, SRINIVAS, GSSBO_ADJUSTED):
            raise ValueError(f"unknown beta schedule kind {self.kind!r}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")


def _srinivas_value(schedule: BetaSchedule, t: int) -> float:
    pi_t = np.pi**2 * t**2 / 6.0
    term1 = 2.0 * np.log(4.0 * pi_t / schedule.delta)
    inner = (
        t**2 * schedule.b * schedule.r * schedule.d
        * np.sqrt(np.log(4.0 * schedule.d * schedule.a / schedule.delta))
    )
    term2 = 2.0 * schedule.d * np.log(inner)
    return term1 + term2


def beta(schedule: BetaSchedule, t: int, penalties=None, sigma_min=None) -> float:
    """Confidence-width multiplier at iteration ``t`` (clamped at 0).

    For the adjusted kind, ``penalties`` is an (A, B) pair of subset-induced
    UCB error terms and ``sigma_min`` the posterior-std floor; both default to
    the no-penalty case.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if schedule.kind == CONSTANT:
        return float(schedule.constant_value)
    base = _srinivas_value(schedule, t)
    if schedule.kind == SRINIVAS:
        return float(max(base, 0.0))
    A, B = penalties if penalties is not None else (0.0, 0.0)
    s_min = max(float(sigma_min) if sigma_min is not None else schedule.sigma_min_floor,
                schedule.sigma_min_floor)
    return float(max((s_min * base - A) / (s_min + B), 0.0))


def ucb_score(mean: float, std: float, beta_t: float):
    """mean + sqrt(beta) * std."""
    return mean + np.sqrt(beta_t) * std


@dataclass(frozen=True)
class AcquisitionSearchConfig:
    n_candidates: int | None = None  # default 1024 * min(d, 8)
    n_polish: int = 5
    polish_steps: int = 50
    polish_initial_frac: float = 0.1
    polish_shrink: float = 0.8

    def candidates_for_dim(self, d: int) -> int:
        return self.n_candidates if self.n_candidates else 1024 * min(d, 8)


def optimize_acquisition(model: GPModel, bounds, beta_t: float, seed: int,
                         config: AcquisitionSearchConfig | None = None) -> np.ndarray:
    """Maximize the UCB over the box via seeded random candidates plus
    shrinking coordinate polish of the top candidates. Deterministic per seed."""
    cfg = config or AcquisitionSearchConfig()
    bounds = np.atleast_2d(np.asarray(bounds, dtype=float))
    lo, hi = bounds[:, 0], bounds[:, 1]
    if np.any(lo >= hi):
        raise ValueError("degenerate bounds: lo >= hi in some dimension")
    d = lo.shape[0]
    rng = np.random.default_rng(seed)
    cands = lo + rng.random((cfg.candidates_for_dim(d), d)) * (hi - lo)

    def score(X):
        mean, var = posterior_batch(model, X)
        return ucb_score(mean, np.sqrt(var), beta_t)

    scores = score(cands)
    order = np.argsort(-scores, kind="stable")[: cfg.n_polish]
    best_x = cands[order[0]].copy()
    best_score = float(scores[order[0]])

    for start in order:
        x = cands[start].copy()
        val = float(scores[start])
        step = cfg.polish_initial_frac * (hi - lo)
        for _ in range(cfg.polish_steps):
            proposals = np.repeat(x[None, :], 2 * d, axis=0)
            for j in range(d):
                proposals[2 * j, j] = min(x[j] + step[j], hi[j])
                proposals[2 * j + 1, j] = max(x[j] - step[j], lo[j])
            p_scores = score(proposals)
            k = int(np.argmax(p_scores))
            if p_scores[k] > val:
                x = proposals[k]
                val = float(p_scores[k])
            else:
                step = step * cfg.polish_shrink
        if val > best_score:
            best_x, best_score = x, val
    return np.clip(best_x, lo, hi)
