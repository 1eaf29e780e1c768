"""Comparison statistics: Zheng's kernel test, the projected-kernel test of
Lavergne and Patilea, and Stute's Cramer-von Mises test.

Each statistic is a quadratic form ``e' A e`` in the residuals. The ``*_matrix``
helpers build ``A`` once per design so that bootstrap replicates only pay for
a matrix-vector product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import rng
from .errors import DimensionError
from .projection import squared_distances

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BandwidthRule:
    """``fixed``: ``h = value``. ``power_rule``: ``h = value * n^(-1/(4+p))``."""

    kind: Literal["fixed", "power_rule"] = "power_rule"
    value: float = 1.5

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "power_rule"):
            raise ValueError(f"unknown bandwidth rule {self.kind!r}")
        if not self.value > 0:
            raise ValueError("bandwidth rule value must be positive")


def default_bandwidth(n: int, p: int, rule: BandwidthRule = BandwidthRule()) -> float:
    if n < 2 or p < 1:
        raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    if not isinstance(rule, BandwidthRule):
        raise TypeError("rule must be a BandwidthRule")
    if rule.kind == "fixed":
        return float(rule.value)
    return float(rule.value * n ** (-1.0 / (4 + p)))


def _as_2d(X: ArrayLike) -> NDArray[np.float64]:
    X = np.asarray(X, dtype=np.float64)
    return X[:, None] if X.ndim == 1 else X


def _resid(e: ArrayLike, n: int) -> NDArray[np.float64]:
    e = np.asarray(e, dtype=np.float64).ravel()
    if e.shape[0] != n:
        raise DimensionError(f"residual length {e.shape[0]} does not match {n} rows of X")
    return e


def zheng_matrix(X: ArrayLike, h: float) -> NDArray[np.float64]:
    """``h^-p K_p((x_i - x_j)/h) / (n (n-1))`` with a zero diagonal."""
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    X = _as_2d(X)
    n, p = X.shape
    K = np.exp(-0.5 * squared_distances(X) / h**2) / (_SQRT_2PI * h) ** p
    np.fill_diagonal(K, 0.0)
    return K / (n * (n - 1))


def zheng_statistic(e: ArrayLike, X: ArrayLike, h: float) -> float:
    A = zheng_matrix(X, h)
    e = _resid(e, A.shape[0])
    return float(e @ A @ e)


def sphere_directions(p: int, n_dirs: int, seed: int) -> NDArray[np.float64]:
    """``n_dirs`` unit vectors uniform on the sphere, one per row."""
    if n_dirs < 1:
        raise ValueError("n_dirs must be >= 1")
    Z = rng.stream(seed, rng.DIRECTIONS).standard_normal((n_dirs, p))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def lavergne_matrix(X: ArrayLike, h: float, n_dirs: int = 500, seed: int = 0) -> NDArray[np.float64]:
    """Direction-averaged univariate kernel matrix scaled by ``1/(n (n-1))``."""
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    X = _as_2d(X)
    n, p = X.shape
    P = X @ sphere_directions(p, n_dirs, seed).T
    K = np.zeros((n, n))
    step = max(1, (1 << 22) // (n * n))
    for start in range(0, n_dirs, step):
        block = P[:, start : start + step]
        U = (block[:, None, :] - block[None, :, :]) / h
        K += np.exp(-0.5 * U * U).sum(axis=2)
    K /= n_dirs * _SQRT_2PI * h
    np.fill_diagonal(K, 0.0)
    return K / (n * (n - 1))


def lavergne_statistic(
    e: ArrayLike, X: ArrayLike, h: float, n_dirs: int = 500, seed: int = 0
) -> float:
    A = lavergne_matrix(X, h, n_dirs, seed)
    e = _resid(e, A.shape[0])
    return float(e @ A @ e)


def stute_matrix(X: ArrayLike) -> NDArray[np.float64]:
    """``I I' / n^2`` where ``I[i, k] = 1{x_i <= x_k componentwise}``."""
    X = _as_2d(X)
    n = X.shape[0]
    ind = (X[:, None, :] <= X[None, :, :]).all(axis=2).astype(np.float64)
    return ind @ ind.T / n**2


def stute_cvm_statistic(e: ArrayLike, X: ArrayLike) -> float:
    """Cramer-von Mises functional ``(1/n) sum_k R(x_k)^2`` of the residual-marked process."""
    A = stute_matrix(X)
    e = _resid(e, A.shape[0])
    return float(e @ A @ e)
