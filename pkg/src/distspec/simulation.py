"""Simulation scenarios, the power-study harness and the drift oracle.

Scenario ``k`` generates ``Y = null_mean(X) + a * departure(X) + eps`` with
``X ~ N(0, Sigma)`` and ``eps ~ N(0, 1)``:

1. ``b'X + a cos(b'X)``, ``b = 1/sqrt(p)``
2. ``b1'X + a 0.3 (0.5 + b2'X)^3``, ``b1``/``b2`` on the first/second half of the coordinates
3. ``b'X + a exp(-(b'X)^2)``, optionally with AR(1) covariance
4. ``exp(c X1) + (c X2)^3 + c sin(pi X3) + c |X4| + c X5 X6 + a cos(X2 + X3)``, ``c = 1/sqrt(6)``

All randomness is keyed by ``(seed, cell, replicate, purpose)`` so a power
table does not depend on how the work is split across processes.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from . import rng
from .bootstrap import bootstrap_many
from .competitors import BandwidthRule
from .errors import DistSpecError
from .estimator import FitOptions, fit_least_squares
from .model import DataSet, ParametricModel, make_builtin
from .projection import OracleEstimate, pairwise_weights, tn_statistic
from .statistics import prepare_statistic

S4_COEF = 1.0 / math.sqrt(6.0)
INIT_JITTER = 0.01


def ar1_covariance(p: int, rho: float) -> NDArray[np.float64]:
    """``Sigma[i, j] = rho^|i - j|``."""
    if not abs(rho) < 1:
        raise ValueError(f"AR(1) coefficient must satisfy |rho| < 1, got {rho}")
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :]).astype(np.float64)


def parse_cov(cov: str) -> float:
    """Return the AR(1) coefficient encoded by ``cov`` (0 for ``identity``)."""
    if cov == "identity":
        return 0.0
    if cov.startswith("ar1:"):
        return float(cov[4:])
    raise ValueError(f"covariance must be 'identity' or 'ar1:<rho>', got {cov!r}")


@dataclass(frozen=True)
class ScenarioSpec:
    id: int
    n: int = 200
    p: int = 2
    a: float = 0.0
    cov: str = "identity"

    def __post_init__(self) -> None:
        if self.id not in (1, 2, 3, 4):
            raise ValueError(f"scenario id must be 1..4, got {self.id}")
        if self.id == 4 and self.p != 6:
            raise ValueError("scenario 4 requires p = 6")
        if self.id == 2 and self.p % 2:
            raise ValueError("scenario 2 requires an even p")
        if self.p < 1 or self.n < 2:
            raise ValueError("need p >= 1 and n >= 2")
        if self.a < 0:
            raise ValueError("amplitude a must be non-negative")
        rho = parse_cov(self.cov)
        if rho != 0.0 and self.id != 3:
            raise ValueError("AR(1) covariance is only defined for scenario 3")


@dataclass(frozen=True)
class Scenario:
    spec: ScenarioSpec
    beta: NDArray[np.float64]
    beta2: Optional[NDArray[np.float64]]
    sigma: NDArray[np.float64]
    chol: NDArray[np.float64]
    null_model: ParametricModel
    true_theta: NDArray[np.float64]

    def null_mean(self, X: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.null_model.mean(X, self.true_theta)

    def departure(self, X: NDArray[np.float64]) -> NDArray[np.float64]:
        sid = self.spec.id
        if sid in (1, 4):
            return np.cos(X @ self.beta)
        if sid == 2:
            return 0.3 * (0.5 + X @ self.beta2) ** 3
        return np.exp(-((X @ self.beta) ** 2))

    def draw_X(self, n: int, gen: np.random.Generator) -> NDArray[np.float64]:
        return gen.standard_normal((n, self.spec.p)) @ self.chol.T


def make_scenario(spec: ScenarioSpec) -> Scenario:
    p = spec.p
    beta2 = None
    if spec.id == 2:
        half = p // 2
        beta = np.r_[np.ones(half), np.zeros(half)] / math.sqrt(half)
        beta2 = np.r_[np.zeros(half), np.ones(half)] / math.sqrt(half)
    elif spec.id == 4:
        beta = np.array([0.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    else:
        beta = np.ones(p) / math.sqrt(p)

    if spec.id == 4:
        model = make_builtin("scenario4_null", 6)
        theta = np.full(5, S4_COEF)
    else:
        model = make_builtin("linear", p)
        theta = beta.copy()

    sigma = ar1_covariance(p, parse_cov(spec.cov))
    return Scenario(spec, beta, beta2, sigma, np.linalg.cholesky(sigma), model, theta)


class Sample(NamedTuple):
    data: DataSet
    true_theta: NDArray[np.float64]
    ell: NDArray[np.float64]


def sample_scenario(
    gen: Scenario, n: Optional[int] = None, seed: int = 0, key: Sequence[int] = ()
) -> Sample:
    """Draw one data set of size ``n`` (default ``gen.spec.n``) from stream ``(seed, *key, DATA)``."""
    n = gen.spec.n if n is None else n
    if n < 2:
        raise ValueError("n must be >= 2")
    g = rng.stream(seed, *key, rng.DATA)
    X = gen.draw_X(n, g)
    eps = g.standard_normal(n)
    ell = gen.departure(X)
    y = gen.null_mean(X) + gen.spec.a * ell + eps
    return Sample(DataSet(X, y), gen.true_theta, ell)


def harness_fit_options(gen: Scenario, seed: int, key: Sequence[int]) -> FitOptions:
    """Nonlinear fits in simulations start at the truth plus N(0, 0.01^2) jitter."""
    if gen.null_model.is_linear:
        return FitOptions()
    jitter = rng.stream(seed, *key, rng.INIT).normal(0.0, INIT_JITTER, gen.true_theta.shape[0])
    return FitOptions(init=tuple(gen.true_theta + jitter))


@dataclass
class PowerRow:
    scenario: int
    p: int
    a: float
    n: int
    stat: str
    reps: int
    rejections: int
    cov: str = "identity"
    failed: int = 0
    nonconverged: int = 0
    refits: int = 0
    elapsed: float = 0.0
    status: str = "ok"

    @property
    def rate(self) -> float:
        return self.rejections / self.reps if self.reps else float("nan")

    @property
    def mc_stderr(self) -> float:
        r = self.rate
        return math.sqrt(r * (1.0 - r) / self.reps) if self.reps else float("nan")


CSV_HEADER = ("scenario", "p", "a", "n", "stat", "reps", "rate", "mc_stderr")


@dataclass
class PowerTable:
    rows: list[PowerRow] = field(default_factory=list)

    def cell(self, scenario: int, p: int, a: float, stat: str) -> PowerRow:
        for r in self.rows:
            if (r.scenario, r.p, r.stat) == (scenario, p, stat) and math.isclose(r.a, a):
                return r
        raise KeyError((scenario, p, a, stat))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.scenario, r.p, repr(r.a), r.n, r.stat, r.reps, repr(r.rate), repr(r.mc_stderr)])
        return buf.getvalue()

    def to_text(self) -> str:
        head = ["scenario", "cov", "p", "a", "n", "stat", "reps", "rate", "mc_se", "failed", "status", "secs"]
        body = [
            [str(r.scenario), r.cov, str(r.p), f"{r.a:g}", str(r.n), r.stat, str(r.reps),
             f"{r.rate:.4f}", f"{r.mc_stderr:.4f}", str(r.failed), r.status, f"{r.elapsed:.1f}"]
            for r in self.rows
        ]
        widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(head)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths))]
        lines += ["  ".join(c.rjust(w) for c, w in zip(b, widths)) for b in body]
        return "\n".join(lines)


@dataclass(frozen=True)
class _Job:
    cell: int
    rep: int
    spec: ScenarioSpec
    stats: tuple[str, ...]
    B: int
    level: float
    seed: int
    law: str
    rule: BandwidthRule
    n_dirs: int


class _Outcome(NamedTuple):
    cell: int
    rep: int
    rejects: Optional[tuple[bool, ...]]
    nonconverged: int
    refits: int
    elapsed: float


def _run_job(job: _Job) -> _Outcome:
    t0 = time.perf_counter()
    key = (job.cell, job.rep)
    gen = make_scenario(job.spec)
    sample = sample_scenario(gen, seed=job.seed, key=key)
    dir_seed = int(rng.stream(job.seed, *key, rng.DIRECTIONS).integers(2**63))
    try:
        opts = harness_fit_options(gen, job.seed, key)
        fit = fit_least_squares(gen.null_model, sample.data, opts)
        stats = [
            prepare_statistic(s, sample.data.X, rule=job.rule, n_dirs=job.n_dirs, seed=dir_seed)
            for s in job.stats
        ]
        res = bootstrap_many(
            gen.null_model, sample.data, stats, job.B, job.law, job.level, job.seed, key, fit, opts
        )
    except DistSpecError:
        return _Outcome(job.cell, job.rep, None, 0, 0, time.perf_counter() - t0)
    refits = 0 if gen.null_model.is_linear else job.B - res[0].failed
    return _Outcome(
        job.cell, job.rep, tuple(r.reject for r in res), res[0].nonconverged, refits,
        time.perf_counter() - t0,
    )


def _run_chunk(jobs: list[_Job]) -> list[_Outcome]:
    return [_run_job(j) for j in jobs]


def resolve_workers(workers: Union[int, str, None]) -> int:
    if workers in (None, "auto"):
        return os.cpu_count() or 1
    w = int(workers)
    if w < 1:
        raise ValueError("workers must be >= 1")
    return w


def run_power_study(
    grid: Sequence[ScenarioSpec],
    stats: Sequence[str] = ("tn",),
    reps: int = 500,
    B: int = 300,
    level: float = 0.05,
    seed: int = 0,
    workers: Union[int, str, None] = 1,
    law: str = "mammen",
    rule: BandwidthRule = BandwidthRule(),
    n_dirs: int = 500,
    progress: Optional[Callable[[int, int], None]] = None,
) -> PowerTable:
    """Empirical rejection rates for every ``(cell, statistic)``.

    Replicate ``r`` of cell ``c`` uses streams keyed by ``(seed, c, r, ...)``.
    A replicate whose calibration fails is dropped from its cell; a cell with
    more than 2% dropped replicates is marked ``failed``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    stats = tuple(stats)
    jobs = [
        _Job(c, r, spec, stats, B, level, seed, law, rule, n_dirs)
        for c, spec in enumerate(grid)
        for r in range(reps)
    ]
    n_workers = min(resolve_workers(workers), len(jobs))
    outcomes: list[_Outcome] = []
    if n_workers == 1:
        for i, job in enumerate(jobs):
            outcomes.append(_run_job(job))
            if progress:
                progress(i + 1, len(jobs))
    else:
        size = max(1, len(jobs) // (4 * n_workers))
        chunks = [jobs[i : i + size] for i in range(0, len(jobs), size)]
        with ProcessPoolExecutor(n_workers) as pool:
            for res in pool.map(_run_chunk, chunks):
                outcomes.extend(res)
                if progress:
                    progress(len(outcomes), len(jobs))
    outcomes.sort(key=lambda o: (o.cell, o.rep))

    table = PowerTable()
    for c, spec in enumerate(grid):
        cell = [o for o in outcomes if o.cell == c]
        good = [o for o in cell if o.rejects is not None]
        failed = len(cell) - len(good)
        elapsed = sum(o.elapsed for o in cell)
        status = "failed" if failed > 0.02 * len(cell) else "ok"
        for k, s in enumerate(stats):
            table.rows.append(
                PowerRow(
                    scenario=spec.id, p=spec.p, a=spec.a, n=spec.n, stat=s, reps=len(good),
                    rejections=sum(o.rejects[k] for o in good), cov=spec.cov, failed=failed,
                    nonconverged=sum(o.nonconverged for o in good),
                    refits=sum(o.refits for o in good), elapsed=elapsed, status=status,
                )
            )
    return table


def global_drift_oracle(
    spec: ScenarioSpec,
    mc_pairs: int = 1_000_000,
    seed: int = 0,
    departure: Optional[Callable[[NDArray[np.float64]], NDArray[np.float64]]] = None,
) -> OracleEstimate:
    """Monte Carlo estimate of ``mu_1 = a^2 E[l(X) l(X') w(X, X')]`` over independent ``X, X'``.

    ``departure`` replaces the scenario's departure function (used in tests).
    """
    if spec.a <= 0:
        raise ValueError("the drift is identically zero under the null (a = 0)")
    if mc_pairs < 10_000:
        raise ValueError("mc_pairs must be >= 10^4")
    gen = make_scenario(spec)
    ell = departure or gen.departure
    g = rng.stream(seed, rng.ORACLE)
    total = total_sq = 0.0
    done = 0
    while done < mc_pairs:
        m = min(1 << 16, mc_pairs - done)
        X1, X2 = gen.draw_X(m, g), gen.draw_X(m, g)
        diff = X1 - X2
        w = 1.0 / np.sqrt(1.0 + np.einsum("ij,ij->i", diff, diff))
        vals = spec.a**2 * ell(X1) * ell(X2) * w
        total += vals.sum()
        total_sq += (vals * vals).sum()
        done += m
    mean = total / mc_pairs
    var = max(total_sq / mc_pairs - mean * mean, 0.0) * mc_pairs / (mc_pairs - 1)
    return OracleEstimate(mean, math.sqrt(var / mc_pairs))


def drift_replicates(spec: ScenarioSpec, reps: int = 200, seed: int = 0) -> NDArray[np.float64]:
    """``T_n / n`` for ``reps`` independent data sets from ``spec``."""
    gen = make_scenario(spec)
    out = np.empty(reps)
    for r in range(reps):
        sample = sample_scenario(gen, seed=seed, key=(0, r))
        fit = fit_least_squares(gen.null_model, sample.data, harness_fit_options(gen, seed, (0, r)))
        out[r] = tn_statistic(fit.residuals, pairwise_weights(sample.data.X)) / spec.n
    return out


def theta_rmse(spec: ScenarioSpec, reps: int = 200, seed: int = 0) -> tuple[float, float]:
    """RMSE of the least-squares estimate over ``reps`` data sets, and the fraction that converged."""
    gen = make_scenario(spec)
    sq = np.empty(reps)
    conv = 0
    for r in range(reps):
        sample = sample_scenario(gen, seed=seed, key=(0, r))
        fit = fit_least_squares(gen.null_model, sample.data, harness_fit_options(gen, seed, (0, r)))
        sq[r] = np.sum((fit.theta - gen.true_theta) ** 2)
        conv += fit.converged
    return float(np.sqrt(sq.mean())), conv / reps


def grid_from_lists(
    scenario: int, ps: Iterable[int], amps: Iterable[float], n: int, cov: str = "identity"
) -> list[ScenarioSpec]:
    return [ScenarioSpec(scenario, n, p, a, cov) for p in ps for a in amps]
