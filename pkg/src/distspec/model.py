"""Data containers and parametric regression mean functions.

Mean and gradient callbacks are vectorized over observations: they receive the
full ``(n, p)`` predictor matrix and a length-``d`` parameter vector and return
an ``(n,)`` vector or an ``(n, d)`` matrix respectively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DataError, DimensionError, EvaluationError

MeanFn = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]
GradFn = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]

FD_REL_STEP = 1e-6
GRADIENT_CHECK_TOL = 1e-5


def _frozen(a: ArrayLike, ndim: int) -> NDArray[np.float64]:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DataSet:
    """An ``n x p`` predictor matrix with its response vector."""

    X: NDArray[np.float64]
    y: NDArray[np.float64]
    names: Optional[tuple[str, ...]] = None
    response: Optional[str] = None

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        object.__setattr__(self, "X", _frozen(X, 2))
        object.__setattr__(self, "y", _frozen(np.ravel(self.y), 1))
        n, p = self.X.shape
        if n < 2:
            raise DataError(f"need at least 2 observations, got {n}")
        if p < 1:
            raise DataError("need at least one predictor column")
        if self.y.shape[0] != n:
            raise DimensionError(f"y has length {self.y.shape[0]} but X has {n} rows")
        if not (np.isfinite(self.X).all() and np.isfinite(self.y).all()):
            raise DataError("data contain non-finite entries")
        if self.names is not None:
            names = tuple(str(s) for s in self.names)
            if len(names) != p:
                raise DimensionError(f"{len(names)} column names for {p} columns")
            object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def with_response(self, y: ArrayLike) -> "DataSet":
        return DataSet(self.X, y, self.names, self.response)


@dataclass(frozen=True)
class ParametricModel:
    """Mean function ``g(x, theta)`` with an optional analytic gradient.

    ``p`` is the predictor dimension the model expects (``None`` accepts any).
    ``start`` is an optional default starting point for iterative fits.
    """

    param_dim: int
    mean: MeanFn
    gradient: Optional[GradFn] = None
    family: str = "custom"
    p: Optional[int] = None
    start: Optional[tuple[float, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.param_dim < 1:
            raise ValueError("param_dim must be positive")

    @property
    def is_linear(self) -> bool:
        return self.family == "linear"


def _check_inputs(model: ParametricModel, X: ArrayLike, theta: ArrayLike):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    theta = np.asarray(theta, dtype=np.float64).ravel()
    if theta.shape[0] != model.param_dim:
        raise DimensionError(
            f"theta has length {theta.shape[0]}, model expects {model.param_dim}"
        )
    if model.p is not None and X.shape[1] != model.p:
        raise DimensionError(f"X has {X.shape[1]} columns, model expects {model.p}")
    return X, theta


def eval_mean(model: ParametricModel, X: ArrayLike, theta: ArrayLike) -> NDArray[np.float64]:
    """Evaluate ``g(x_i, theta)`` for every row of ``X``."""
    X, theta = _check_inputs(model, X, theta)
    out = np.asarray(model.mean(X, theta), dtype=np.float64).reshape(X.shape[0])
    bad = ~np.isfinite(out)
    if bad.any():
        raise EvaluationError(f"mean is non-finite at row {int(np.flatnonzero(bad)[0])}")
    return out


def _fd_jacobian(model: ParametricModel, X: NDArray, theta: NDArray) -> NDArray[np.float64]:
    J = np.empty((X.shape[0], theta.shape[0]))
    for k in range(theta.shape[0]):
        step = max(FD_REL_STEP, FD_REL_STEP * abs(theta[k]))
        up, dn = theta.copy(), theta.copy()
        up[k] += step
        dn[k] -= step
        J[:, k] = (model.mean(X, up) - model.mean(X, dn)) / (up[k] - dn[k])
    return J


def gradient_check_error(model: ParametricModel, X: ArrayLike, theta: ArrayLike) -> float:
    """Largest column-scaled discrepancy between the analytic gradient and central differences."""
    X, theta = _check_inputs(model, X, theta)
    if model.gradient is None:
        return 0.0
    analytic = np.asarray(model.gradient(X, theta), dtype=np.float64)
    numeric = _fd_jacobian(model, X, theta)
    scale = np.maximum(np.abs(numeric).max(axis=0), 1.0)
    return float((np.abs(analytic - numeric).max(axis=0) / scale).max())


def eval_jacobian(
    model: ParametricModel, X: ArrayLike, theta: ArrayLike, check: bool = False
) -> NDArray[np.float64]:
    """Return the ``(n, d)`` matrix whose row ``i`` is the theta-gradient of ``g(x_i, theta)``.

    Falls back to central finite differences when the model has no analytic
    gradient. With ``check=True`` the analytic gradient is compared against
    finite differences and an :class:`EvaluationError` is raised on mismatch.
    """
    X, theta = _check_inputs(model, X, theta)
    if model.gradient is None:
        J = _fd_jacobian(model, X, theta)
    else:
        J = np.asarray(model.gradient(X, theta), dtype=np.float64).reshape(
            X.shape[0], model.param_dim
        )
        if check:
            err = gradient_check_error(model, X, theta)
            if err > GRADIENT_CHECK_TOL:
                raise EvaluationError(
                    f"analytic gradient disagrees with finite differences (rel. error {err:.2e})"
                )
    if not np.isfinite(J).all():
        raise EvaluationError("gradient has non-finite entries")
    return J


def _linear_mean(X, theta):
    return X @ theta


def _linear_grad(X, theta):
    return X.copy()


def _s4_mean(X, t):
    return (
        np.exp(t[0] * X[:, 0])
        + (t[1] * X[:, 1]) ** 3
        + t[2] * np.sin(np.pi * X[:, 2])
        + t[3] * np.abs(X[:, 3])
        + t[4] * X[:, 4] * X[:, 5]
    )


def _s4_grad(X, t):
    return np.column_stack(
        [
            X[:, 0] * np.exp(t[0] * X[:, 0]),
            3.0 * t[1] ** 2 * X[:, 1] ** 3,
            np.sin(np.pi * X[:, 2]),
            np.abs(X[:, 3]),
            X[:, 4] * X[:, 5],
        ]
    )


BUILTIN_FAMILIES = ("linear", "scenario4_null")


def make_builtin(tag: str, p: int) -> ParametricModel:
    """Construct one of the built-in model families.

    ``linear`` is ``theta' x`` with no intercept. ``scenario4_null`` is the
    five-parameter nonlinear mean on six predictors::

        exp(t1 x1) + (t2 x2)^3 + t3 sin(pi x3) + t4 |x4| + t5 x5 x6
    """
    if tag == "linear":
        if p < 1:
            raise DimensionError("linear model needs p >= 1")
        return ParametricModel(p, _linear_mean, _linear_grad, "linear", p)
    if tag == "scenario4_null":
        if p != 6:
            raise DimensionError(f"scenario4_null requires p = 6, got {p}")
        # theta_2 = 0 is a stationary ridge of (t2 x2)^3, so iterative fits start away from it
        return ParametricModel(5, _s4_mean, _s4_grad, "scenario4_null", 6, start=(0.5,) * 5)
    raise ValueError(f"unknown model family {tag!r}; expected one of {BUILTIN_FAMILIES}")


def custom_model(
    param_dim: int,
    mean: MeanFn,
    gradient: Optional[GradFn] = None,
    p: Optional[int] = None,
    start: Optional[Sequence[float]] = None,
) -> ParametricModel:
    return ParametricModel(
        param_dim, mean, gradient, "custom", p, None if start is None else tuple(start)
    )
