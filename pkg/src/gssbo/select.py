"""Gradient embeddings from the GP log-likelihood and diversity-based subset selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .gp import GPModel

# Embedding columns with norm below this are treated as zero directions
# (cosine 0 with everything) so the diversity objective stays finite.
ZERO_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class GradientEmbedding:
    """Per-sample gradient embedding vectors: columns of -(K + noise*I)^{-1}."""

    matrix: np.ndarray  # (n, n); column i is g_i
    norms: np.ndarray   # Euclidean norms of the columns

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class SubsetSelection:
    indices: np.ndarray
    forced_index: int
    diversity_score: float
    cosine_sum: float


def compute_scalar_gradients(model: GPModel, dataset=None) -> np.ndarray:
    """Gradient of the log marginal likelihood w.r.t. each observation.

    Equals -(K + noise*I)^{-1} (y - mean), i.e. the negated solve vector the
    fitted model already carries.
    """
    return -model.alpha.copy()


def embedding_from_inverse(K_y_inv: np.ndarray) -> GradientEmbedding:
    """Wrap a precomputed inverse of the regularized Gram matrix."""
    G = -np.asarray(K_y_inv, dtype=float)
    G = 0.5 * (G + G.T)
    return GradientEmbedding(matrix=G, norms=np.linalg.norm(G, axis=0))


def compute_embeddings(model: GPModel) -> GradientEmbedding:
    """Per-sample embeddings g_i = -(K + noise*I)^{-1} e_i from the model's Cholesky factor."""
    n = model.n_active
    K_y_inv = cho_solve((model.chol, True), np.eye(n))
    return embedding_from_inverse(K_y_inv)


def _normalized_columns(embedding: GradientEmbedding) -> np.ndarray:
    norms = embedding.norms.copy()
    zero = norms < ZERO_NORM_FLOOR
    norms[zero] = 1.0
    U = embedding.matrix / norms
    U[:, zero] = 0.0
    return U


def diversity_score(embedding: GradientEmbedding, indices) -> float:
    """Variance of the normalized gradient directions over ``indices``.

    1 - (1/M^2) * sum of pairwise cosines, including the diagonal terms.
    """
    idx = np.asarray(indices, dtype=int)
    if idx.size == 0:
        raise ValueError("indices must be nonempty")
    U = _normalized_columns(embedding)[:, idx]
    cosines = U.T @ U
    # Self-cosines are exactly 1 for nonzero columns.
    np.fill_diagonal(cosines, np.where(embedding.norms[idx] < ZERO_NORM_FLOOR, 0.0, 1.0))
    total = float(np.sum(cosines))
    return 1.0 - total / idx.size**2


def cosine_sum(embedding: GradientEmbedding, indices) -> float:
    idx = np.asarray(indices, dtype=int)
    return float(idx.size**2 * (1.0 - diversity_score(embedding, idx)))


def select_subset(embedding: GradientEmbedding, M: int, forced_index: int) -> SubsetSelection:
    """Greedy forward selection of M indices minimizing pairwise redundancy.

    Starts from the forced index; each step adds the candidate with the
    smallest summed absolute cosine to the current set, ties broken by lowest
    index. Absolute values matter: embeddings of near-duplicate samples are
    antipodal (cosine near -1), and a signed sum would treat such redundant
    pairs as maximally diverse and fill the subset with clustered points.
    """
    n = embedding.n
    if not 1 <= M <= n:
        raise ValueError(f"M must be in [1, {n}], got {M}")
    if not 0 <= forced_index < n:
        raise ValueError(f"forced_index {forced_index} out of range [0, {n})")

    U = _normalized_columns(embedding)
    selected = [forced_index]
    in_set = np.zeros(n, dtype=bool)
    in_set[forced_index] = True
    # s[i] = summed |cosine| between candidate i and the current selection.
    s = np.abs(U.T @ U[:, forced_index])
    while len(selected) < M:
        masked = np.where(in_set, np.inf, s)
        best = float(np.min(masked))
        j = int(np.argmax(masked <= best + 1e-12))
        selected.append(j)
        in_set[j] = True
        s = s + np.abs(U.T @ U[:, j])

    idx = np.asarray(selected, dtype=int)
    score = diversity_score(embedding, idx)
    return SubsetSelection(
        indices=idx,
        forced_index=forced_index,
        diversity_score=score,
        cosine_sum=float(M**2 * (1.0 - score)),
    )


class EmbeddingTracker:
    """Incrementally maintained inverse of the regularized Gram matrix.

    Appending one sample costs O(n^2) via a bordered-inverse update; changing
    hyperparameters or the noise level triggers a full O(n^3) rebuild. Used by
    the optimization loop to keep per-iteration gradient selection cheap.
    """

    def __init__(self):
        self._inv = None
        self._stamp = None

    def embeddings(self, K_y: np.ndarray, stamp) -> GradientEmbedding:
        """Embeddings for the current regularized Gram matrix.

        ``stamp`` identifies the kernel configuration; ``K_y`` must extend the
        previously seen matrix by at most one trailing row/column when the
        stamp is unchanged.
        """
        n = K_y.shape[0]
        if self._stamp == stamp and self._inv is not None and n == self._inv.shape[0] + 1:
            A_inv = self._inv
            b = K_y[:-1, -1]
            c = K_y[-1, -1]
            u = A_inv @ b
            schur = c - b @ u
            if schur > 1e-12:
                inv = np.empty((n, n))
                inv[:-1, :-1] = A_inv + np.outer(u, u) / schur
                inv[:-1, -1] = -u / schur
                inv[-1, :-1] = inv[:-1, -1]
                inv[-1, -1] = 1.0 / schur
                self._inv = inv
                return embedding_from_inverse(inv)
        if self._stamp == stamp and self._inv is not None and n == self._inv.shape[0]:
            return embedding_from_inverse(self._inv)
        self._inv = np.linalg.inv(K_y)
        self._stamp = stamp
        return embedding_from_inverse(self._inv)
