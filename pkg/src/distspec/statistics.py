"""Named statistics prepared against a fixed design.

Every statistic in the toolkit is a quadratic form in the residuals, so a
prepared statistic is just its matrix. Bootstrap replicates reuse it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .competitors import (
    BandwidthRule,
    default_bandwidth,
    lavergne_matrix,
    stute_matrix,
    zheng_matrix,
)
from .errors import DimensionError
from .projection import pairwise_weights, quadratic_forms

STATISTICS = ("tn", "zheng", "stute", "lavergne")


@dataclass(frozen=True)
class Statistic:
    name: str
    matrix: NDArray[np.float64] = field(repr=False)
    params: dict = field(default_factory=dict)

    def __call__(self, resid: ArrayLike) -> float:
        e = np.asarray(resid, dtype=np.float64).ravel()
        if e.shape[0] != self.matrix.shape[0]:
            raise DimensionError("residual length does not match the prepared design")
        return float(e @ (self.matrix @ e))

    def batch(self, E: NDArray[np.float64]) -> NDArray[np.float64]:
        """Evaluate on every column of ``E``."""
        return quadratic_forms(self.matrix, E)


def prepare_statistic(
    name: str,
    X: ArrayLike,
    *,
    bandwidth: Optional[float] = None,
    rule: BandwidthRule = BandwidthRule(),
    n_dirs: int = 500,
    seed: int = 0,
) -> Statistic:
    """Build statistic ``name`` for design ``X``.

    ``bandwidth`` overrides ``rule`` for the kernel statistics; ``n_dirs`` and
    ``seed`` only affect ``lavergne``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if name == "tn":
        W = pairwise_weights(X).W
        return Statistic("tn", W / (n - 1))
    if name == "stute":
        return Statistic("stute", stute_matrix(X))
    if name in ("zheng", "lavergne"):
        # the projected kernel is univariate, so its bandwidth rule uses p = 1
        h = bandwidth if bandwidth is not None else default_bandwidth(n, p if name == "zheng" else 1, rule)
        if name == "zheng":
            return Statistic("zheng", zheng_matrix(X, h), {"h": h})
        return Statistic(
            "lavergne", lavergne_matrix(X, h, n_dirs, seed), {"h": h, "n_dirs": n_dirs, "seed": seed}
        )
    raise ValueError(f"unknown statistic {name!r}; expected one of {STATISTICS}")
