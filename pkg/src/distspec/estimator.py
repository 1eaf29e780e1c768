"""Least-squares estimation of the null-model parameter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionError, EvaluationError, SingularDesignError
from .model import DataSet, ParametricModel, eval_jacobian, eval_mean

SINGULAR_RTOL = 1e-10
_LAMBDA0 = 1e-3
_LAMBDA_MAX = 1e16
_ROUNDING_SLACK = 16 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class FitOptions:
    """``init`` is ``"zeros"``, ``"auto"`` (the model's ``start`` hint, else zeros) or a vector."""

    max_iter: int = 100
    grad_tol: float = 1e-8
    step_tol: float = 1e-10
    init: Union[str, Sequence[float]] = "zeros"

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.grad_tol <= 0 or self.step_tol <= 0:
            raise ValueError("tolerances must be positive")
        if isinstance(self.init, str) and self.init not in ("zeros", "auto"):
            raise ValueError(f"init must be 'zeros', 'auto' or a vector, got {self.init!r}")


@dataclass(frozen=True)
class FittedModel:
    theta: NDArray[np.float64]
    residuals: NDArray[np.float64]
    fitted: NDArray[np.float64]
    J: NDArray[np.float64]
    gram: NDArray[np.float64]
    converged: bool
    iterations: int

    @property
    def n(self) -> int:
        return self.residuals.shape[0]


class Diagnostics(NamedTuple):
    normal_eq_norm: float
    gram_condition: float


def linear_basis(X: NDArray[np.float64]) -> tuple[NDArray, NDArray, NDArray]:
    """Thin SVD of ``X`` with the singular-design check applied."""
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    if s[-1] < SINGULAR_RTOL * s[0]:
        raise SingularDesignError(
            f"design is rank deficient (singular value ratio {s[-1] / s[0]:.3e})"
        )
    return U, s, Vt


def _finish(model, data, theta, converged, iterations) -> FittedModel:
    fitted = eval_mean(model, data.X, theta)
    J = eval_jacobian(model, data.X, theta)
    gram = J.T @ J / data.n
    return FittedModel(
        theta=theta,
        residuals=data.y - fitted,
        fitted=fitted,
        J=J,
        gram=0.5 * (gram + gram.T),
        converged=converged,
        iterations=iterations,
    )


def _fit_linear(model: ParametricModel, data: DataSet) -> FittedModel:
    U, s, Vt = linear_basis(data.X)
    theta = Vt.T @ ((U.T @ data.y) / s)
    return _finish(model, data, theta, True, 1)


def _fit_lm(model: ParametricModel, data: DataSet, opts: FitOptions) -> FittedModel:
    n, d = data.n, model.param_dim
    if opts.init == "auto" and model.start is not None:
        theta = np.asarray(model.start, dtype=np.float64)
    elif isinstance(opts.init, str):
        theta = np.zeros(d)
    else:
        theta = np.asarray(opts.init, dtype=np.float64).ravel().copy()
        if theta.shape[0] != d:
            raise DimensionError(f"init has length {theta.shape[0]}, model expects {d}")

    r = data.y - eval_mean(model, data.X, theta)
    obj = float(r @ r) / n
    if not np.isfinite(obj):
        raise EvaluationError("objective is non-finite at the starting point")

    lam = _LAMBDA0
    converged = False
    it = 0
    while it < opts.max_iter:
        J = eval_jacobian(model, data.X, theta)
        g = J.T @ r / n
        if np.abs(g).max() <= opts.grad_tol:
            converged = True
            break
        A = J.T @ J / n
        D = np.maximum(np.diag(A), 1e-12 * max(np.diag(A).max(), 1e-300))
        it += 1
        while True:
            try:
                step = np.linalg.solve(A + lam * np.diag(D), g)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(A + lam * np.diag(D), g, rcond=None)[0]
            trial = theta + step
            with np.errstate(over="ignore", invalid="ignore"):
                r_trial = data.y - model.mean(data.X, trial)
                obj_trial = float(r_trial @ r_trial) / n
            # near the optimum the decrease is below rounding; accept ties at that scale
            if np.isfinite(obj_trial) and obj_trial <= obj * (1.0 + _ROUNDING_SLACK):
                lam = max(lam / 10.0, 1e-12)
                break
            lam *= 10.0
            if lam > _LAMBDA_MAX:
                if not np.isfinite(obj_trial):
                    raise EvaluationError("objective became non-finite and damping was exhausted")
                # no descent possible in floating point: we are at the minimum
                step = np.zeros(d)
                trial, r_trial, obj_trial = theta, r, obj
                break
        small = np.linalg.norm(step) <= opts.step_tol * (np.linalg.norm(theta) + opts.step_tol)
        theta, r, obj = trial, r_trial, obj_trial
        if small:
            J = eval_jacobian(model, data.X, theta)
            converged = bool(np.abs(J.T @ r / n).max() <= opts.grad_tol)
            break
    return _finish(model, data, theta, converged, it)


def fit_least_squares(
    model: ParametricModel, data: DataSet, opts: FitOptions = FitOptions()
) -> FittedModel:
    """Minimise ``(1/n) sum (y_i - g(x_i, theta))^2``.

    The linear family is solved directly through an SVD of the design. Other
    families use Levenberg-Marquardt damped Gauss-Newton steps. Exhausting
    ``max_iter`` returns ``converged=False`` rather than raising.
    """
    if model.p is not None and data.p != model.p:
        raise DimensionError(f"data have {data.p} predictors, model expects {model.p}")
    if data.n <= model.param_dim:
        raise DimensionError(f"need n > d, got n={data.n}, d={model.param_dim}")
    if model.is_linear:
        return _fit_linear(model, data)
    return _fit_lm(model, data, opts)


def residual_diagnostics(fit: FittedModel) -> Diagnostics:
    norm = float(np.abs(fit.J.T @ fit.residuals).max() / fit.n)
    ev = np.linalg.eigvalsh(fit.gram)
    cond = float(ev[-1] / ev[0]) if ev[0] > 0 else float("inf")
    return Diagnostics(norm, cond)
