"""Wild-bootstrap calibration for any prepared statistic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from . import rng
from .errors import CalibrationError, DistSpecError
from .estimator import FitOptions, FittedModel, fit_least_squares, linear_basis
from .model import DataSet, ParametricModel
from .statistics import Statistic, prepare_statistic

WildWeightLaw = Literal["mammen", "rademacher"]
LAWS = ("mammen", "rademacher")

_SQ5 = math.sqrt(5.0)
MAMMEN_LOW = -(_SQ5 - 1.0) / 2.0
MAMMEN_HIGH = (_SQ5 + 1.0) / 2.0
MAMMEN_P_LOW = (_SQ5 + 1.0) / (2.0 * _SQ5)

MAX_FAILED_FRACTION = 0.02
# residual vectors this close to zero (relative to the response) are exact fits
_EXACT_FIT_RTOL = 64 * np.finfo(np.float64).eps


def draw_wild_weights(
    n: int, law: WildWeightLaw = "mammen", seed: Union[int, np.random.Generator] = 0
) -> NDArray[np.float64]:
    """I.i.d. mean-zero, unit-variance multipliers."""
    if n < 0:
        raise ValueError("n must be non-negative")
    gen = seed if isinstance(seed, np.random.Generator) else rng.stream(seed, rng.BOOT)
    if law == "mammen":
        return np.where(gen.random(n) < MAMMEN_P_LOW, MAMMEN_LOW, MAMMEN_HIGH)
    if law == "rademacher":
        return np.where(gen.random(n) < 0.5, -1.0, 1.0)
    raise ValueError(f"unknown wild weight law {law!r}; expected one of {LAWS}")


@dataclass(frozen=True)
class TestResult:
    statistic_name: str
    observed: float
    boot_values: NDArray[np.float64] = field(repr=False)
    p_value: float
    reject: bool
    level: float
    B: int
    seed: dict
    law: str = "mammen"
    failed: int = 0
    nonconverged: int = 0
    theta: Optional[NDArray[np.float64]] = field(default=None, repr=False)

    __test__ = False  # not a pytest class

    def summary(self) -> str:
        decision = "reject H0" if self.reject else "fail to reject H0"
        lines = [
            f"statistic      {self.statistic_name}",
            f"observed       {self.observed:.6g}",
            f"p-value        {self.p_value:.4f}",
            f"level          {self.level:g}",
            f"decision       {decision}",
            f"bootstrap      B={self.B} law={self.law} failed={self.failed} nonconverged={self.nonconverged}",
            f"seed           {self.seed['seed']}",
        ]
        if self.theta is not None:
            lines.append("theta_hat      " + " ".join(f"{t:.6g}" for t in self.theta))
        return "\n".join(lines)


def bootstrap_p_value(observed: float, boot_values: NDArray[np.float64]) -> float:
    """``(1 + #{b : T*_b >= T}) / (B + 1)``."""
    boot_values = np.asarray(boot_values)
    return (1.0 + np.count_nonzero(boot_values >= observed)) / (boot_values.shape[0] + 1.0)


def _snap(e: NDArray[np.float64], scale: float) -> NDArray[np.float64]:
    if np.abs(e).max(initial=0.0) <= _EXACT_FIT_RTOL * max(scale, 1.0):
        return np.zeros_like(e)
    return e


def _replicate_residuals(
    model: ParametricModel,
    data: DataSet,
    fit: FittedModel,
    V: NDArray[np.float64],
    opts: FitOptions,
) -> tuple[NDArray[np.float64], NDArray[np.bool_], int]:
    """Residuals of the refit for each column of multipliers ``V``.

    Returns the ``(n, B)`` residual matrix, a mask of replicates that refit
    successfully, and the count of refits that hit ``max_iter``.
    """
    R = V * fit.residuals[:, None]
    if model.is_linear:
        # refitting y* = Xb + v*e is the projection of v*e off the column space
        U, _, _ = linear_basis(data.X)
        E = R - U @ (U.T @ R)
        return E, np.ones(V.shape[1], dtype=bool), 0

    n, B = V.shape
    E = np.zeros((n, B))
    ok = np.zeros(B, dtype=bool)
    nonconv = 0
    refit_opts = FitOptions(opts.max_iter, opts.grad_tol, opts.step_tol, tuple(fit.theta))
    for b in range(B):
        try:
            f = fit_least_squares(model, data.with_response(fit.fitted + R[:, b]), refit_opts)
        except (DistSpecError, np.linalg.LinAlgError):
            continue
        E[:, b] = f.residuals
        ok[b] = True
        nonconv += not f.converged
    return E, ok, nonconv


def bootstrap_many(
    model: ParametricModel,
    data: DataSet,
    statistics: Sequence[Statistic],
    B: int = 300,
    law: WildWeightLaw = "mammen",
    level: float = 0.05,
    seed: int = 0,
    key: tuple[int, ...] = (),
    fit: Optional[FittedModel] = None,
    opts: FitOptions = FitOptions(),
) -> list[TestResult]:
    """Calibrate several statistics on one shared set of bootstrap refits.

    Replicate ``b`` draws its multipliers from the stream ``(seed, *key, BOOT, b)``.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if law not in LAWS:
        raise ValueError(f"unknown wild weight law {law!r}")
    if fit is None:
        fit = fit_least_squares(model, data, opts)

    e_hat = _snap(fit.residuals, np.abs(data.y).max())
    if e_hat is not fit.residuals:
        fit = FittedModel(fit.theta, e_hat, fit.fitted, fit.J, fit.gram, fit.converged, fit.iterations)

    V = np.column_stack(
        [draw_wild_weights(data.n, law, rng.stream(seed, *key, rng.BOOT, b)) for b in range(B)]
    )
    E, ok, nonconv = _replicate_residuals(model, data, fit, V, opts)
    failed = int(B - ok.sum())
    if failed > MAX_FAILED_FRACTION * B:
        raise CalibrationError(f"{failed} of {B} bootstrap refits failed")
    E = E[:, ok]
    scale = np.abs(data.y).max()
    for b in range(E.shape[1]):
        E[:, b] = _snap(E[:, b], scale)

    results = []
    for stat in statistics:
        observed = stat(e_hat)
        boot = stat.batch(E)
        pv = bootstrap_p_value(observed, boot)
        results.append(
            TestResult(
                statistic_name=stat.name,
                observed=observed,
                boot_values=boot,
                p_value=pv,
                reject=pv <= level,
                level=level,
                B=B,
                seed={"seed": seed, "key": tuple(key)},
                law=law,
                failed=failed,
                nonconverged=nonconv,
                theta=fit.theta,
            )
        )
    return results


def wild_bootstrap_test(
    model: ParametricModel,
    data: DataSet,
    statistic: Union[str, Statistic] = "tn",
    B: int = 300,
    law: WildWeightLaw = "mammen",
    level: float = 0.05,
    seed: int = 0,
    opts: FitOptions = FitOptions(init="auto"),
    **stat_kwargs,
) -> TestResult:
    """Fit the null model, compute ``statistic`` and calibrate it by wild bootstrap.

    ``statistic`` is a name from :data:`distspec.statistics.STATISTICS` (extra
    keyword arguments go to :func:`prepare_statistic`) or an already prepared
    :class:`Statistic`. Bootstrap samples are ``y*_i = g(x_i, theta_hat) + v_i e_i``
    and every replicate is refitted starting from ``theta_hat``.
    """
    if isinstance(statistic, str):
        statistic = prepare_statistic(statistic, data.X, **stat_kwargs)
    return bootstrap_many(model, data, [statistic], B, law, level, seed, opts=opts)[0]
