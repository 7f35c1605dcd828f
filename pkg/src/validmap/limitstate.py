"""Folded-Gaussian belief over the limit-state value ``g(x) = xi - |f(x)|``.

When the residual belief at a point is ``N(mu, sigma^2)``, the limit-state
value ``xi - |Y|`` follows a flipped, shifted folded Gaussian with

    mean      mu_g  = xi - (sigma sqrt(2/pi) zeta + erf(mu / sqrt(2 sigma^2)) mu)
    variance  var_g = mu^2 + sigma^2 - (xi - mu_g)^2
    cdf       P(G <= w) = 2 - Phi((xi - w + mu)/sigma) - Phi((xi - w - mu)/sigma)

with ``zeta = exp(-mu^2 / (2 sigma^2))``. Quantiles are found by bisection;
no closed inverse exists.

All functions broadcast over arrays of ``(mu, sigma)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf, ndtr

from .exceptions import ParameterError
from .gp import GpModel, predict

# Relative floor on sigma to avoid 0/0 in degenerate posteriors.
SIGMA_FLOOR_REL = 1e-9

_QUANTILE_TOL = 1e-9
_QUANTILE_MAX_ITER = 200


def _floored_sigma(sigma, xi):
    return np.maximum(np.asarray(sigma, dtype=float), SIGMA_FLOOR_REL * xi)


def folded_mean_var(mu, sigma, xi: float):
    """Mean and variance of ``xi - |N(mu, sigma^2)|`` (arrays broadcast)."""
    mu = np.asarray(mu, dtype=float)
    sigma = _floored_sigma(sigma, xi)
    zeta = np.exp(-(mu * mu) / (2.0 * sigma * sigma))
    abs_mean = sigma * np.sqrt(2.0 / np.pi) * zeta + erf(
        mu / (np.sqrt(2.0) * sigma)
    ) * mu
    mean_g = xi - abs_mean
    var_g = mu * mu + sigma * sigma - abs_mean * abs_mean
    return mean_g, np.maximum(var_g, 0.0)


def folded_cdf_value(mu, sigma, xi: float, threshold):
    """``P(G <= threshold)`` for ``G = xi - |N(mu, sigma^2)|``, clamped to [0, 1]."""
    mu = np.asarray(mu, dtype=float)
    sigma = _floored_sigma(sigma, xi)
    z = xi - np.asarray(threshold, dtype=float)
    p = 2.0 - ndtr((z + mu) / sigma) - ndtr((z - mu) / sigma)
    return np.clip(p, 0.0, 1.0)


def folded_quantile_value(mu, sigma, xi: float, alpha: float):
    """Quantile ``q`` with ``P(G <= q) = alpha``, by bracketed bisection.

    The root is bracketed on ``[xi - (|mu| + 10 sigma), xi]`` and refined
    until ``|cdf(q) - alpha| <= 1e-9``.
    """
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    sigma = np.atleast_1d(_floored_sigma(sigma, xi))
    mu, sigma = np.broadcast_arrays(mu, sigma)
    lo = xi - (np.abs(mu) + 10.0 * sigma)
    hi = np.full_like(lo, float(xi))
    # Widen the lower bracket until the CDF there is below alpha.
    for _ in range(60):
        mask = folded_cdf_value(mu, sigma, xi, lo) > alpha
        if not mask.any():
            break
        lo = np.where(mask, lo - (hi - lo), lo)
    for _ in range(_QUANTILE_MAX_ITER):
        mid = 0.5 * (lo + hi)
        p = folded_cdf_value(mu, sigma, xi, mid)
        done = np.abs(p - alpha) <= _QUANTILE_TOL
        below = p < alpha
        lo = np.where(done | below, mid, lo)
        hi = np.where(done | ~below, mid, hi)
        if done.all():
            break
    q = 0.5 * (lo + hi)
    return q if q.size > 1 else float(q[0])


@dataclass(frozen=True)
class LimitStatePosterior:
    """Pointwise folded-Gaussian belief of ``g(x) = xi - |f(x)|``."""

    mu_star: float
    sigma_star: float
    xi: float

    def __post_init__(self):
        if not (self.xi > 0):
            raise ParameterError("xi must be positive")
        if not (self.sigma_star >= 0):
            raise ParameterError("sigma_star must be nonnegative")

    def moments(self):
        """(mean, variance) of the limit-state belief."""
        m, v = folded_mean_var(self.mu_star, self.sigma_star, self.xi)
        return float(m), float(v)

    def cdf(self, threshold: float) -> float:
        return float(
            folded_cdf_value(self.mu_star, self.sigma_star, self.xi, threshold)
        )

    def quantile(self, alpha: float) -> float:
        return float(
            folded_quantile_value(self.mu_star, self.sigma_star, self.xi, alpha)
        )


def folded_moments(p: LimitStatePosterior):
    return p.moments()


def folded_cdf(p: LimitStatePosterior, threshold: float) -> float:
    return p.cdf(threshold)


def folded_quantile(p: LimitStatePosterior, alpha: float) -> float:
    return p.quantile(alpha)


def valid_from_mean(mu, xi: float):
    """Mean-based valid-set rule: valid iff ``xi - |mu| >= 0``."""
    return xi - np.abs(np.asarray(mu, dtype=float)) >= 0.0


def valid_from_quantile(mu, sigma, xi: float, alpha: float):
    """Confidence rule: valid iff ``q_alpha >= 0``.

    For continuous posteriors this is exactly ``P(G <= 0) <= alpha``, which
    is what is evaluated (no root finding needed).
    """
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    return folded_cdf_value(mu, sigma, xi, 0.0) <= alpha


def predict_valid(model: GpModel, xi: float, points) -> np.ndarray:
    """Boolean valid labels from the GP posterior mean."""
    mean, _ = predict(model, np.atleast_2d(points))
    return valid_from_mean(mean, xi)


def predict_valid_conf(model: GpModel, xi: float, alpha: float, points) -> np.ndarray:
    """Boolean valid labels at confidence ``1 - alpha``."""
    mean, var = predict(model, np.atleast_2d(points))
    return valid_from_quantile(mean, np.sqrt(var), xi, alpha)
