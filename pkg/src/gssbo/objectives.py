"""Synthetic benchmark objectives with known optima, in maximization form.

Standard minimization test functions are negated so the engine always
maximizes; canonical literature domains are used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Objective:
    id: str
    dim: int
    bounds: np.ndarray          # (d, 2)
    optimum_value: float        # max of the (negated) function
    optimizer: np.ndarray | None
    _fn: Callable[[np.ndarray], np.ndarray]

    def evaluate(self, x) -> float:
        """Noiseless value at a single in-bounds point."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape[0] != self.dim:
            raise ValueError(f"expected {self.dim}-dim input, got {x.shape[0]}")
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        if np.any(x < lo - 1e-9) or np.any(x > hi + 1e-9):
            raise ValueError(f"point out of bounds for {self.id}")
        return float(self._fn(x[None, :])[0])

    def evaluate_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        if np.any(X < lo - 1e-9) or np.any(X > hi + 1e-9):
            raise ValueError(f"point out of bounds for {self.id}")
        return self._fn(X)


def _eggholder(X):
    x1, x2 = X[:, 0], X[:, 1]
    a = -(x2 + 47.0) * np.sin(np.sqrt(np.abs(x2 + x1 / 2.0 + 47.0)))
    b = -x1 * np.sin(np.sqrt(np.abs(x1 - (x2 + 47.0))))
    return -(a + b)


_HART6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HART6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
_HART6_P = 1e-4 * np.array([
    [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
    [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
    [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
    [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
])
_HART6_XSTAR = np.array([0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573])


def _hartmann6(X):
    inner = np.sum(_HART6_A[None, :, :] * (X[:, None, :] - _HART6_P[None, :, :]) ** 2, axis=2)
    return np.sum(_HART6_ALPHA[None, :] * np.exp(-inner), axis=1)


def _levy(X):
    w = 1.0 + (X - 1.0) / 4.0
    term1 = np.sin(np.pi * w[:, 0]) ** 2
    term3 = (w[:, -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[:, -1]) ** 2)
    wi = w[:, :-1]
    middle = np.sum((wi - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * wi + 1.0) ** 2), axis=1)
    return -(term1 + middle + term3)


def _powell(X):
    d = X.shape[1]
    total = np.zeros(X.shape[0])
    for i in range(d // 4):
        x1, x2, x3, x4 = (X[:, 4 * i + j] for j in range(4))
        total += (
            (x1 + 10.0 * x2) ** 2
            + 5.0 * (x3 - x4) ** 2
            + (x2 - 2.0 * x3) ** 4
            + 10.0 * (x1 - x4) ** 4
        )
    return -total


def _rastrigin(X):
    return -(10.0 * X.shape[1] + np.sum(X**2 - 10.0 * np.cos(2.0 * np.pi * X), axis=1))


def _box(lo, hi, d):
    return np.array([[lo, hi]] * d, dtype=float)


def make_objective(objective_id: str) -> Objective:
    """Build an objective from an id like ``hartmann6``, ``levy_10`` or ``rastrigin_4``."""
    oid = objective_id.lower()
    if oid == "eggholder2":
        return Objective(
            id=oid, dim=2, bounds=_box(-512.0, 512.0, 2),
            optimum_value=959.6406627208507,
            optimizer=np.array([512.0, 404.2318051201336]),
            _fn=_eggholder,
        )
    if oid == "hartmann6":
        return Objective(
            id=oid, dim=6, bounds=_box(0.0, 1.0, 6),
            optimum_value=3.322368011391339,
            optimizer=_HART6_XSTAR.copy(),
            _fn=_hartmann6,
        )
    for family, fn, lo, hi in (
        ("levy", _levy, -10.0, 10.0),
        ("powell", _powell, -4.0, 5.0),
        ("rastrigin", _rastrigin, -5.12, 5.12),
    ):
        prefix = family + "_"
        if oid.startswith(prefix):
            d = int(oid[len(prefix):])
            if d < 1:
                raise ValueError(f"dimension must be >= 1 in {objective_id!r}")
            if family == "powell" and d % 4 != 0:
                raise ValueError("powell dimension must be divisible by 4")
            optimizer = {
                "levy": np.ones(d),
                "powell": np.zeros(d),
                "rastrigin": np.zeros(d),
            }[family]
            return Objective(
                id=oid, dim=d, bounds=_box(lo, hi, d),
                optimum_value=0.0, optimizer=optimizer, _fn=fn,
            )
    raise ValueError(f"unknown objective id {objective_id!r}")
