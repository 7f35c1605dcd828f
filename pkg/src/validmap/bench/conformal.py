"""Split-conformal baselines for valid-set prediction.

Both methods calibrate on residual scores of the model under validation and
declare a point valid when the resulting prediction-interval half-width at
that point is within the tolerance. Plain split conformal uses the absolute
residual score and yields a constant half-width (so the whole domain is
classified the same way); the normalized variant divides scores by a learned
residual predictor ``u`` and so discriminates across the domain.
"""

from __future__ import annotations

from math import ceil

import numpy as np

from ..domain import Dataset
from ..exceptions import CoverageInfeasibleError, ParameterError
from ..gp import fit, predict


def conformal_rank(n: int, alpha: float) -> int:
    """1-based order statistic ``ceil((n + 1)(1 - alpha))`` of the
    calibration scores; infeasible when it exceeds ``n``."""
    if not (0.0 < alpha < 1.0):
        raise ParameterError("alpha must lie in (0, 1)")
    k = ceil((n + 1) * (1.0 - alpha))
    if k > n:
        raise CoverageInfeasibleError(
            f"coverage 1-alpha={1 - alpha} needs more than {n} calibration scores"
        )
    return k


def split_conformal(scores, alpha: float) -> float:
    """Constant interval half-width from absolute-residual scores."""
    scores = np.sort(np.asarray(scores, dtype=float).reshape(-1))
    k = conformal_rank(scores.size, alpha)
    return float(scores[k - 1])


def split_conformal_valid(scores, alpha: float, xi: float) -> bool:
    """Valid-set decision (identical for every point): half-width <= xi."""
    return split_conformal(scores, alpha) <= xi


def mad_conformal(abs_residuals, u_cal, alpha: float) -> float:
    """Normalizing quantile ``q`` from scores ``|y - f_M(x)| / u(x)``.

    The per-point half-width is ``q * u(x)`` (see :func:`mad_halfwidth`);
    rescaling ``u`` rescales ``q`` inversely and leaves it unchanged.
    """
    abs_residuals = np.asarray(abs_residuals, dtype=float).reshape(-1)
    u_cal = np.asarray(u_cal, dtype=float).reshape(-1)
    if abs_residuals.size != u_cal.size:
        raise ParameterError("residuals and u values must align")
    if (u_cal <= 0).any():
        raise ParameterError("residual predictor must be positive (floor it)")
    return split_conformal(abs_residuals / u_cal, alpha)


def mad_halfwidth(q: float, u_values) -> np.ndarray:
    """Per-point half-width ``q * u(x)``."""
    return q * np.asarray(u_values, dtype=float)


def mad_conformal_valid(q: float, u_values, xi: float) -> np.ndarray:
    """Valid-set labels for the normalized method: ``q u(x) <= xi``."""
    return mad_halfwidth(q, u_values) <= xi


def fit_residual_predictor(X, abs_residuals, rng=None, kernel="matern52"):
    """Learn a positive residual-magnitude predictor ``u`` with a GP.

    Returns a callable over unit-cube points; predictions are floored at a
    small fraction of the largest calibration residual so downstream ratios
    stay finite.
    """
    abs_residuals = np.asarray(abs_residuals, dtype=float).reshape(-1)
    model = fit(Dataset(X, abs_residuals), kernel=kernel, rng=rng)
    floor = max(1e-6 * float(abs_residuals.max()), 1e-12)

    def u(points):
        mean, _ = predict(model, np.atleast_2d(points))
        return np.maximum(mean, floor)

    return u
