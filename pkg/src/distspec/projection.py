"""Projection-averaged distance statistic.

Averaging a Gaussian-kernel smoother over Gaussian projection directions
``alpha ~ N(0, h^2 I)`` gives a pairwise weight that no longer depends on the
bandwidth::

    int (1/h) K(alpha'(x_i - x_j)/h) mu(alpha) d alpha = (1/(h sqrt(2 pi))) / sqrt(d_ij + 1)

with ``d_ij = ||x_i - x_j||^2``. The statistic keeps only ``1/sqrt(d_ij + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import pdist, squareform

from . import rng
from .errors import DataError, DimensionError

_CHUNK = 1 << 16


@dataclass(frozen=True)
class PairwiseWeights:
    """Symmetric weight matrix with a hard zero diagonal."""

    W: NDArray[np.float64]

    @property
    def n(self) -> int:
        return self.W.shape[0]


def squared_distances(X: ArrayLike) -> NDArray[np.float64]:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2:
        raise DataError("need at least two points")
    if not np.isfinite(X).all():
        raise DataError("X contains non-finite entries")
    return squareform(pdist(X, "sqeuclidean"))


def pairwise_weights(X: ArrayLike) -> PairwiseWeights:
    """``w_ij = (1 + ||x_i - x_j||^2)^(-1/2)`` off the diagonal, 0 on it."""
    W = 1.0 / np.sqrt(1.0 + squared_distances(X))
    np.fill_diagonal(W, 0.0)
    W.flags.writeable = False
    return PairwiseWeights(W)


def quadratic_forms(A: NDArray[np.float64], E: NDArray[np.float64]) -> NDArray[np.float64]:
    """``e_b' A e_b`` for every column ``e_b`` of ``E``."""
    return np.einsum("ib,ib->b", E, A @ E)


def tn_statistic(resid: ArrayLike, weights: PairwiseWeights) -> float:
    """Return ``T_n = n V_n`` where ``V_n = sum_{i != j} e_i e_j w_ij / (n (n - 1))``."""
    e = np.asarray(resid, dtype=np.float64).ravel()
    n = weights.n
    if e.shape[0] != n:
        raise DimensionError(f"residual length {e.shape[0]} does not match weights size {n}")
    return float(e @ (weights.W @ e)) / (n - 1)


def closed_form_kernel_integral(xi: ArrayLike, xj: ArrayLike, h: float, sigma: float | None = None) -> float:
    """Exact value of the direction-averaged kernel for ``alpha ~ N(0, sigma^2 I)``.

    ``sigma`` defaults to ``h``, which reduces to ``(1/(h sqrt(2 pi))) (d_ij + 1)^(-1/2)``.
    """
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    sigma = h if sigma is None else sigma
    diff = np.asarray(xi, dtype=np.float64) - np.asarray(xj, dtype=np.float64)
    d = float(diff @ diff)
    return 1.0 / math.sqrt(2.0 * math.pi * (sigma**2 * d + h**2))


class OracleEstimate(NamedTuple):
    estimate: float
    std_error: float


def kernel_integral_oracle(
    xi: ArrayLike,
    xj: ArrayLike,
    h: float,
    draws: int = 1_000_000,
    seed: int = 0,
    sigma: float | None = None,
) -> OracleEstimate:
    """Monte Carlo estimate of ``E_alpha[(1/h) K(alpha'(x_i - x_j)/h)]``, ``alpha ~ N(0, sigma^2 I)``.

    ``K`` is the standard normal density. Draws are processed in chunks so that
    memory stays bounded for large ``draws``.
    """
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    if draws < 2:
        raise ValueError("need at least two draws")
    sigma = h if sigma is None else sigma
    diff = np.asarray(xi, dtype=np.float64).ravel() - np.asarray(xj, dtype=np.float64).ravel()
    c = 1.0 / (h * math.sqrt(2.0 * math.pi))
    if not diff.any():
        return OracleEstimate(c, 0.0)

    gen = rng.stream(seed, rng.ORACLE)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < draws:
        m = min(_CHUNK, draws - done)
        alpha = gen.standard_normal((m, diff.shape[0])) * sigma
        u = alpha @ diff / h
        vals = c * np.exp(-0.5 * u * u)
        total += vals.sum()
        total_sq += (vals * vals).sum()
        done += m
    mean = total / draws
    var = max(total_sq / draws - mean * mean, 0.0) * draws / (draws - 1)
    return OracleEstimate(mean, math.sqrt(var / draws))


class KernelCase(NamedTuple):
    p: int
    h: float
    closed_form: float
    estimate: float
    std_error: float

    @property
    def z(self) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.estimate == self.closed_form else math.inf
        return abs(self.estimate - self.closed_form) / self.std_error


def validate_closed_form(
    cases: int = 50,
    draws: int = 1_000_000,
    seed: int = 0,
    dims: tuple[int, ...] = (1, 2, 4, 8),
    h_range: tuple[float, float] = (0.2, 2.0),
) -> list[KernelCase]:
    """Compare the closed form against the Monte Carlo oracle on random point pairs."""
    out = []
    for k in range(cases):
        gen = rng.stream(seed, k, rng.DATA)
        p = int(gen.choice(dims))
        h = float(gen.uniform(*h_range))
        xi, xj = gen.standard_normal(p), gen.standard_normal(p)
        est = kernel_integral_oracle(xi, xj, h, draws, seed=int(gen.integers(2**63)))
        out.append(KernelCase(p, h, closed_form_kernel_integral(xi, xj, h), est.estimate, est.std_error))
    return out
