"""Subset-of-Regressors low-rank kernel approximation and its error theory:
spectral error, eigenvalue floors, greedy column selection, projection-energy
residuals, posterior error bounds, and subset-size sizing."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import cho_solve, eigh

from .gp import NotPositiveDefinite, chol_with_jitter

# Ties in greedy residual scores within this tolerance break to the lowest index.
TIE_TOL = 1e-9


@dataclass
class NystromReport:
    n: int
    m: int
    selected_indices: list
    spectral_error: float
    lambda_m_plus_1: float
    eps_g: float
    c_m: float
    mean_bound: float
    var_bound: float
    actual_mean_err: float
    actual_var_err: float
    penalty_a: float
    penalty_b: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def spectral_norm(A: np.ndarray) -> float:
    """Operator 2-norm of a symmetric matrix via dense eigendecomposition."""
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (A + A.T)))))


def build_sor_approx(K: np.ndarray, indices) -> np.ndarray:
    """Low-rank approximation K[:,U] K[U,U]^{-1} K[U,:]; exact on the selected block."""
    idx = np.asarray(indices, dtype=int)
    if idx.size == 0:
        raise ValueError("indices must be nonempty")
    if len(set(idx.tolist())) != idx.size:
        raise ValueError("indices must be distinct")
    K_du = K[:, idx]
    K_uu = K[np.ix_(idx, idx)]
    L, _ = chol_with_jitter(K_uu)
    K_hat = K_du @ cho_solve((L, True), K_du.T)
    return 0.5 * (K_hat + K_hat.T)


def _posterior_pair(K_eff: np.ndarray, y: np.ndarray, k_star: np.ndarray,
                    noise_variance: float, k_star_star: float):
    A = K_eff + noise_variance * np.eye(K_eff.shape[0])
    L, _ = chol_with_jitter(A)
    alpha = cho_solve((L, True), y)
    mean = float(k_star @ alpha)
    var = float(k_star_star - k_star @ cho_solve((L, True), k_star))
    return mean, var


def c_m_factor(K: np.ndarray, K_hat: np.ndarray, noise_variance: float) -> float:
    """Product of inverse-operator norms of the regularized exact and approximate Grams."""
    n = K.shape[0]
    eye = noise_variance * np.eye(n)
    lam_a = float(np.min(np.linalg.eigvalsh(K + eye)))
    lam_b = float(np.min(np.linalg.eigvalsh(K_hat + eye)))
    return 1.0 / (lam_a * lam_b)


def theorem1_bounds(K: np.ndarray, K_hat: np.ndarray, y: np.ndarray,
                    k_star: np.ndarray, noise_variance: float,
                    k_star_star: float | None = None):
    """Posterior mean/variance error bounds and the exactly computed errors.

    Returns (mean_err_bound, var_err_bound, actual_mean_err, actual_var_err).
    """
    if noise_variance <= 0:
        raise ValueError("noise_variance must be > 0")
    y = np.asarray(y, dtype=float)
    k_star = np.asarray(k_star, dtype=float)
    kss = float(K[0, 0]) if k_star_star is None else float(k_star_star)

    err_norm = spectral_norm(K - K_hat)
    cm = c_m_factor(K, K_hat, noise_variance)
    mean_bound = float(np.linalg.norm(k_star) * np.linalg.norm(y) * cm * err_norm)
    var_bound = float(np.linalg.norm(k_star) ** 2 * cm * err_norm)

    mu_full, var_full = _posterior_pair(K, y, k_star, noise_variance, kss)
    mu_hat, var_hat = _posterior_pair(K_hat, y, k_star, noise_variance, kss)
    return mean_bound, var_bound, abs(mu_full - mu_hat), abs(var_full - var_hat)


def _greedy_residual_indices(columns: np.ndarray, M: int, forced_index=None):
    """Greedy residual-norm maximization over the given column set."""
    n = columns.shape[1]
    basis: list[np.ndarray] = []
    selected: list[int] = []

    def residual(v):
        r = v.copy()
        for q in basis:
            r -= (q @ r) * q
        return r

    def add(j):
        r = residual(columns[:, j])
        nrm = np.linalg.norm(r)
        if nrm > 1e-12:
            basis.append(r / nrm)
        selected.append(j)

    if forced_index is not None:
        add(int(forced_index))
    while len(selected) < M:
        scores = np.full(n, -np.inf)
        for i in range(n):
            if i in selected:
                continue
            scores[i] = np.linalg.norm(residual(columns[:, i]))
        best = float(np.max(scores))
        j = int(np.argmax(scores >= best - TIE_TOL * max(best, 1.0)))
        add(j)
    return selected


def greedy_nystrom_select(K: np.ndarray, M: int, forced_index=None) -> np.ndarray:
    """Greedy kernel-column selection: each step adds the column with the
    largest residual norm outside the span of those already chosen."""
    n = K.shape[0]
    if not 1 <= M <= n:
        raise ValueError(f"M must be in [1, {n}], got {M}")
    return np.asarray(_greedy_residual_indices(K.copy(), M, forced_index), dtype=int)


def selection_equivalence_check(K_y: np.ndarray, M: int):
    """Run the gradient-side greedy (on columns of K_y^{-1}, scored through the
    conjugation identity) and the kernel-column greedy side by side.

    Returns (match, kernel_trace, gradient_trace). A mismatch indicates an
    implementation bug: the two residual scores are algebraically equal.
    """
    n = K_y.shape[0]
    kernel_trace = _greedy_residual_indices(K_y.copy(), M)

    psi = np.linalg.inv(K_y)  # gradient columns (sign plays no role in norms)
    # Conjugated scoring: residuals of the gradient columns measured in the
    # K^4-weighted geometry, i.e. standard residuals of the mapped columns
    # K^2 psi_i. Algebraically ||(I - P_g,K4) psi_i||_{K^4} equals the
    # kernel-side residual norm ||(I - P_K) phi_i||, so both greedy rules must
    # pick the same index at every step.
    mapped = K_y @ (K_y @ psi)
    gradient_trace = _greedy_residual_indices(mapped, M)

    return kernel_trace == gradient_trace, kernel_trace, gradient_trace


def eps_g(K: np.ndarray, selected_indices, M: int) -> float:
    """Residual energy of the top-M eigenspace outside the span of the
    selected kernel columns: sqrt(sum_k ||(I - P_U) u_k||^2)."""
    n = K.shape[0]
    if M > n:
        raise ValueError("M must be <= N")
    idx = np.asarray(selected_indices, dtype=int)
    vals, vecs = eigh(0.5 * (K + K.T))
    top = vecs[:, np.argsort(vals)[::-1][:M]]
    Q, _ = np.linalg.qr(K[:, idx])
    resid = top - Q @ (Q.T @ top)
    return float(np.sqrt(np.sum(resid**2)))


def min_subset_size(K: np.ndarray, tolerance: float = 0.05, selector=None) -> int:
    """Smallest M with lambda_{M+1} + eps_g * sum_i K_ii^2 <= tolerance * ||K||."""
    if not 0.0 < tolerance < 1.0:
        raise ValueError("tolerance must be in (0, 1)")
    sel = selector or (lambda K_, M_: greedy_nystrom_select(K_, M_))
    n = K.shape[0]
    vals = np.sort(np.linalg.eigvalsh(0.5 * (K + K.T)))[::-1]
    norm_k = float(np.max(np.abs(vals)))
    trace_sq = float(np.sum(np.diag(K) ** 2))
    for M in range(1, n + 1):
        lam = float(max(vals[M], 0.0)) if M < n else 0.0
        idx = sel(K, M)
        if lam + eps_g(K, idx, M) * trace_sq <= tolerance * norm_k:
            return M
    return n


def theorem2_penalties(K: np.ndarray, K_hat: np.ndarray, y: np.ndarray,
                       k_star: np.ndarray, noise_variance: float,
                       lambda_m_plus_1: float, eps_g_value: float,
                       K_diag: np.ndarray | None = None):
    """Additive (A) and std-scaled (B) UCB penalty terms from the subset error."""
    diag = np.diag(K) if K_diag is None else np.asarray(K_diag, dtype=float)
    gap = lambda_m_plus_1 + eps_g_value * float(np.sum(diag**2))
    cm = c_m_factor(K, K_hat, noise_variance)
    k_norm = float(np.linalg.norm(k_star))
    A = k_norm * float(np.linalg.norm(y)) * cm * gap
    B = k_norm * float(np.sqrt(cm * gap))
    return A, B


def build_report(K: np.ndarray, y: np.ndarray, k_star: np.ndarray,
                 noise_variance: float, M: int,
                 forced_index=None) -> NystromReport:
    """Full analysis bundle for a greedy selection of size M."""
    n = K.shape[0]
    idx = greedy_nystrom_select(K, M, forced_index)
    K_hat = build_sor_approx(K, idx)
    vals = np.sort(np.linalg.eigvalsh(0.5 * (K + K.T)))[::-1]
    lam = float(max(vals[M], 0.0)) if M < n else 0.0
    eg = eps_g(K, idx, M)
    mean_bound, var_bound, a_mean, a_var = theorem1_bounds(K, K_hat, y, k_star, noise_variance)
    A, B = theorem2_penalties(K, K_hat, y, k_star, noise_variance, lam, eg)
    return NystromReport(
        n=n, m=M, selected_indices=[int(i) for i in idx],
        spectral_error=spectral_norm(K - K_hat),
        lambda_m_plus_1=lam, eps_g=eg,
        c_m=c_m_factor(K, K_hat, noise_variance),
        mean_bound=mean_bound, var_bound=var_bound,
        actual_mean_err=a_mean, actual_var_err=a_var,
        penalty_a=A, penalty_b=B,
    )
