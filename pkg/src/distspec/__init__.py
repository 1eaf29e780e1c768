"""Distance-based specification tests for parametric regression models."""

__version__ = "0.1.0"

from .bootstrap import TestResult, draw_wild_weights, wild_bootstrap_test
from .competitors import (
    BandwidthRule,
    default_bandwidth,
    lavergne_statistic,
    stute_cvm_statistic,
    zheng_statistic,
)
from .estimator import FitOptions, FittedModel, fit_least_squares, residual_diagnostics
from .model import DataSet, ParametricModel, custom_model, eval_jacobian, eval_mean, make_builtin
from .projection import (
    PairwiseWeights,
    kernel_integral_oracle,
    pairwise_weights,
    tn_statistic,
)
from .simulation import (
    PowerTable,
    ScenarioSpec,
    ar1_covariance,
    global_drift_oracle,
    make_scenario,
    run_power_study,
    sample_scenario,
)
from .statistics import prepare_statistic

__all__ = [
    "BandwidthRule", "DataSet", "FitOptions", "FittedModel", "PairwiseWeights",
    "ParametricModel", "PowerTable", "ScenarioSpec", "TestResult", "ar1_covariance",
    "custom_model", "default_bandwidth", "draw_wild_weights", "eval_jacobian", "eval_mean",
    "fit_least_squares", "global_drift_oracle", "kernel_integral_oracle", "lavergne_statistic",
    "make_builtin", "make_scenario", "pairwise_weights", "prepare_statistic",
    "residual_diagnostics", "run_power_study", "sample_scenario", "stute_cvm_statistic",
    "tn_statistic", "wild_bootstrap_test", "zheng_statistic",
]
