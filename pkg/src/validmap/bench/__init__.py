"""Benchmark functions, scoring, the built-in ridge model, and conformal
baselines."""

from .conformal import (
    conformal_rank,
    fit_residual_predictor,
    mad_conformal,
    mad_conformal_valid,
    mad_halfwidth,
    split_conformal,
    split_conformal_valid,
)
from .functions import (
    BenchmarkCase,
    case_ids,
    eval_benchmark,
    exp_sine,
    get_case,
    ground_truth_labels,
    michalewicz,
    mod_rastrigin,
    rosenbrock,
    series_system,
    styblinski_tang,
)
from .metrics import ConfusionCounts, confusion, metrics
from .ridge import PolynomialRidge, ridge_fit

__all__ = [
    "BenchmarkCase",
    "ConfusionCounts",
    "PolynomialRidge",
    "case_ids",
    "confusion",
    "conformal_rank",
    "eval_benchmark",
    "exp_sine",
    "fit_residual_predictor",
    "get_case",
    "ground_truth_labels",
    "mad_conformal",
    "mad_conformal_valid",
    "mad_halfwidth",
    "metrics",
    "michalewicz",
    "mod_rastrigin",
    "ridge_fit",
    "rosenbrock",
    "series_system",
    "split_conformal",
    "split_conformal_valid",
    "styblinski_tang",
]
