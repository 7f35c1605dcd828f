"""Uniform error bounds for the GP posterior mean.

With probability at least ``1 - alpha`` the residual satisfies
``|delta(x) - mu(x)| <= eta(x)`` simultaneously on the unit cube, where

    beta  = 2 log(M(tau) / alpha)
    gamma = (L_mu + L_delta) tau + sqrt(beta L_sigma2 tau)
    eta(x) = sqrt(beta) sigma(x) + gamma

``M(tau)`` is the tau-covering number of the cube, ``L_delta`` the Lipschitz
constant of the residual, and ``L_mu`` / ``L_sigma2`` those of the posterior
mean and variance. The latter two admit the computable bounds

    L_mu     <= L_k sqrt(n) ||(K + noise I)^-1 y||
    L_sigma2 <= 2 L_k (1 + n ||(K + noise I)^-1|| k_max)

which are typically much more pessimistic than the exact constants.

Bound arithmetic runs in standardized label space and is rescaled to label
units, since the zero-mean prior assumption holds there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .exceptions import DomainError, ParameterError
from .gp import GpModel, predict
from .limitstate import folded_cdf_value

_POWER_ITERATIONS = 50
_POWER_TOL = 1e-8


def covering_number(tau: float, d: int) -> float:
    """Upper bound ``(sqrt(d) / (2 tau))^d`` on the tau-covering number of
    the unit cube, floored at 1."""
    if tau <= 0 or d < 1:
        raise ParameterError("covering_number needs tau > 0 and d >= 1")
    return max((np.sqrt(d) / (2.0 * tau)) ** d, 1.0)


def _inverse_opnorm(cho) -> float:
    """Spectral norm of the inverse of an SPD matrix via power iteration."""
    n = cho[0].shape[0]
    v = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    for _ in range(_POWER_ITERATIONS):
        w = cho_solve(cho, v)
        lam_new = float(np.linalg.norm(w))
        if lam_new == 0.0:
            return 0.0
        v = w / lam_new
        if abs(lam_new - lam) <= _POWER_TOL * max(lam_new, 1.0):
            return lam_new
        lam = lam_new
    return lam


def lipschitz_from_factors(K_n, y, L_k: float, k_max: float):
    """Lipschitz bounds from raw regression factors.

    Returns ``(L_mu, L_sigma2)`` with ``L_mu = L_k sqrt(n) ||K_n^-1 y||`` and
    ``L_sigma2 = 2 L_k (1 + n ||K_n^-1|| k_max)``.
    """
    K_n = np.atleast_2d(np.asarray(K_n, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = y.size
    cho = cho_factor(K_n, lower=True)
    w = cho_solve(cho, y)
    L_mu = L_k * np.sqrt(n) * float(np.linalg.norm(w))
    L_sig2 = 2.0 * L_k * (1.0 + n * _inverse_opnorm(cho) * k_max)
    return L_mu, L_sig2


def lipschitz_estimates(model: GpModel, L_k: float):
    """Computable Lipschitz bounds for a fitted model, in label units.

    ``L_k`` is the Lipschitz constant of the model's (standardized-space)
    kernel, e.g. from :func:`validmap.kernels.kernel_lipschitz`.
    """
    n = model.n
    k_max = model.hyper.kernel.total_outputscale
    L_mu_std = L_k * np.sqrt(n) * float(np.linalg.norm(model.weights))
    L_sig2_std = 2.0 * L_k * (
        1.0 + n * _inverse_opnorm((model.chol, True)) * k_max
    )
    s = model.standardization[1]
    return s * L_mu_std, s * s * L_sig2_std


@dataclass(frozen=True)
class BoundInputs:
    """Constants for the uniform bound.

    With ``use_estimated_constants`` the mean/variance Lipschitz constants
    are derived from ``L_k`` through :func:`lipschitz_estimates`; otherwise
    exact label-unit values must be supplied in ``L_mu`` / ``L_sigma2``.
    """

    L_k: float
    L_delta: float
    tau: float
    alpha: float
    use_estimated_constants: bool = True
    L_mu: float | None = None
    L_sigma2: float | None = None

    def __post_init__(self):
        if not (self.L_k > 0 and self.L_delta > 0 and self.tau > 0):
            raise ParameterError("L_k, L_delta, and tau must be positive")
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError("alpha must lie in (0, 1)")
        if not self.use_estimated_constants and (
            self.L_mu is None or self.L_sigma2 is None
        ):
            raise ParameterError(
                "exact constants requested but L_mu / L_sigma2 not supplied"
            )


def eta_bound(model: GpModel, inputs: BoundInputs, X) -> np.ndarray:
    """Pointwise uniform error bound ``eta`` at unit-cube points."""
    d = model.dim
    M = covering_number(inputs.tau, d)
    if M / inputs.alpha <= 1.0:
        tau_max = 0.5 * np.sqrt(d) * inputs.alpha ** (-1.0 / d)
        raise ParameterError(
            f"covering number too small for alpha={inputs.alpha}; "
            f"choose tau < {tau_max:.6g}"
        )
    beta = 2.0 * np.log(M / inputs.alpha)
    if inputs.use_estimated_constants:
        L_mu, L_sig2 = lipschitz_estimates(model, inputs.L_k)
    else:
        L_mu, L_sig2 = inputs.L_mu, inputs.L_sigma2
    gamma = (L_mu + inputs.L_delta) * inputs.tau + np.sqrt(
        beta * L_sig2 * inputs.tau
    )
    _, var = predict(model, np.atleast_2d(X))
    return np.sqrt(beta) * np.sqrt(var) + gamma


def sigma_opt(mu: float, xi: float) -> float:
    """Standard deviation maximizing the zero-slack misclassification
    probability for a fixed invalid mean (``|mu| > xi``)."""
    a = abs(mu)
    if not (xi > 0):
        raise ParameterError("xi must be positive")
    if a <= xi:
        raise DomainError("sigma_opt requires |mu| > xi")
    return float(np.sqrt(-2.0 * xi * a / np.log((a - xi) / (a + xi))))


def psi_mis_sigma_profile(mu: float, xi: float, sigmas) -> np.ndarray:
    """Zero-slack misclassification probability as a function of sigma for a
    fixed invalid mean; used to study where it peaks."""
    sigmas = np.asarray(sigmas, dtype=float)
    return 1.0 - folded_cdf_value(mu, sigmas, xi, 0.0)


def max_abs_slope(xs, values) -> float:
    """Largest absolute difference quotient along a sorted 1-d grid; a lower
    bound on (and for fine grids of smooth functions, an estimate of) the
    Lipschitz constant."""
    xs = np.asarray(xs, dtype=float).reshape(-1)
    values = np.asarray(values, dtype=float).reshape(-1)
    order = np.argsort(xs)
    xs, values = xs[order], values[order]
    dx = np.diff(xs)
    if (dx <= 0).any():
        raise ParameterError("grid points must be distinct")
    return float(np.max(np.abs(np.diff(values)) / dx))


def posterior_lipschitz(model: GpModel, grid) -> tuple:
    """Empirical (grid-based) Lipschitz constants of the posterior mean and
    variance in label units; only meaningful for 1-d models."""
    grid = np.atleast_2d(grid)
    if grid.shape[1] != 1:
        raise ParameterError("posterior_lipschitz expects a 1-d grid")
    mean, var = predict(model, grid)
    xs = grid[:, 0]
    return max_abs_slope(xs, mean), max_abs_slope(xs, var)
