"""Covariance functions and Gram matrix construction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

MATERN52 = "matern52"
SQUARED_EXPONENTIAL = "se"

_FAMILIES = (MATERN52, SQUARED_EXPONENTIAL)

_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class KernelHyperparams:
    """Lengthscale(s), signal variance and observation-noise variance.

    ``lengthscales`` may be a scalar (isotropic) or one positive value per
    input dimension.
    """

    lengthscales: np.ndarray
    signal_variance: float
    noise_variance: float = 0.0

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        object.__setattr__(self, "lengthscales", ls)
        if not np.all(np.isfinite(ls)) or np.any(ls <= 0):
            raise ValueError("lengthscales must be finite and > 0")
        if not np.isfinite(self.signal_variance) or self.signal_variance <= 0:
            raise ValueError("signal_variance must be finite and > 0")
        if not np.isfinite(self.noise_variance) or self.noise_variance < 0:
            raise ValueError("noise_variance must be finite and >= 0")


def _check_family(family: str) -> None:
    if family not in _FAMILIES:
        raise ValueError(f"unknown kernel family {family!r}; expected one of {_FAMILIES}")


def _scaled(points: np.ndarray, hp: KernelHyperparams) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ls = hp.lengthscales
    if ls.size not in (1, pts.shape[1]):
        raise ValueError(
            f"lengthscale count {ls.size} does not match input dimension {pts.shape[1]}"
        )
    return pts / ls


def _from_distance(r: np.ndarray, hp: KernelHyperparams, family: str) -> np.ndarray:
    if family == SQUARED_EXPONENTIAL:
        return hp.signal_variance * np.exp(-0.5 * r * r)
    s = _SQRT5 * r
    return hp.signal_variance * (1.0 + s + s * s / 3.0) * np.exp(-s)


def kernel_eval(x, x2, hp: KernelHyperparams, family: str = MATERN52) -> float:
    """Evaluate k(x, x2) for a single pair of points."""
    _check_family(family)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {x2.shape}")
    r = np.linalg.norm(_scaled(x[None, :], hp)[0] - _scaled(x2[None, :], hp)[0])
    return float(_from_distance(np.asarray(r), hp, family))


def build_gram(points, hp: KernelHyperparams, family: str = MATERN52) -> np.ndarray:
    """Pairwise kernel matrix over ``points``.

    Exactly symmetric (computed from condensed pairwise distances) with
    diagonal equal to the signal variance.
    """
    _check_family(family)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("points must be nonempty")
    scaled = _scaled(pts, hp)
    if pts.shape[0] == 1:
        return np.array([[hp.signal_variance]])
    r = squareform(pdist(scaled))
    K = _from_distance(r, hp, family)
    np.fill_diagonal(K, hp.signal_variance)
    return K


def cross_gram(points_a, points_b, hp: KernelHyperparams, family: str = MATERN52) -> np.ndarray:
    """Kernel matrix between two point sets, shape (len(a), len(b))."""
    _check_family(family)
    a = _scaled(points_a, hp)
    b = _scaled(points_b, hp)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    r = cdist(a, b)
    return _from_distance(r, hp, family)
