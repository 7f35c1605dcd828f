"""Exact Gaussian-process regression over the residual surface.

The model is a zero-mean GP (after internal label standardization) with a sum
kernel from :mod:`validmap.kernels` and homoscedastic Gaussian noise.
Hyperparameters are learned by maximizing the log marginal likelihood plus
log prior (half-Cauchy on lengthscales, flat elsewhere) over log-parameters
with L-BFGS-B from several random initializations.

Predictions use the standard conditional-Gaussian equations

    mu(x*)    = mu_0 + k*^T (K + noise I)^-1 (y - mu_0)
    sigma2(x*) = k(x*, x*) - k*^T (K + noise I)^-1 k*

computed through a cached Cholesky factor of ``K + noise I``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.optimize import minimize

from .domain import Dataset
from .exceptions import IllConditionedError, ParameterError
from .kernels import (
    KernelSpec,
    KernelTerm,
    default_kernel,
    kernel_matrix,
    matern52_kernel,
)

# Box constraints on the (natural-space) hyperparameters; optimization runs
# over their logs.
LENGTHSCALE_BOUNDS = (1e-3, 1e3)
OUTPUTSCALE_BOUNDS = (1e-3, 1e3)
RQ_ALPHA_BOUNDS = (1e-2, 1e2)
NOISE_BOUNDS = (1e-6, 1.0)

# Jitter escalation ladder used when a covariance factorization fails; the
# first attempt is always jitter-free so that well-posed problems match dense
# oracles exactly.
_JITTERS = (0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)

_SERIAL_FORMAT = "validmap-gp"
_SERIAL_VERSION = 1


@dataclass(frozen=True)
class PriorSpec:
    """Hyperparameter priors: half-Cauchy on lengthscales, flat elsewhere."""

    lengthscale_scale: float = 2.0

    def __post_init__(self):
        if not (self.lengthscale_scale > 0):
            raise ParameterError("prior scale must be positive")


@dataclass(frozen=True, eq=False)
class GpHyperparams:
    """Kernel spec, noise variance, and constant prior mean."""

    kernel: KernelSpec
    noise_var: float
    mean_const: float = 0.0

    def __post_init__(self):
        if not (self.noise_var >= 0 and np.isfinite(self.noise_var)):
            raise ParameterError("noise_var must be nonnegative")


@dataclass(frozen=True, eq=False)
class GpModel:
    """A conditioned GP: data, hyperparameters, and cached factorization.

    ``standardization`` holds the (mean, sd) applied to labels internally;
    hyperparameters live in standardized label units, predictions are
    de-standardized. Instances are immutable and safe to share read-only.
    """

    data: Dataset
    hyper: GpHyperparams
    standardization: tuple
    chol: np.ndarray
    weights: np.ndarray
    jitter: float = 0.0

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def dim(self) -> int:
        return self.data.dim


def _chol_with_jitter(K_n: np.ndarray):
    scale = max(float(np.mean(np.diag(K_n))), 1.0) if K_n.size else 1.0
    for jit in _JITTERS:
        try:
            L = np.linalg.cholesky(
                K_n if jit == 0.0 else K_n + jit * scale * np.eye(K_n.shape[0])
            )
            return L, jit * scale
        except np.linalg.LinAlgError:
            continue
    raise IllConditionedError(
        "covariance factorization failed even with maximal jitter"
    )


def condition(
    data: Dataset, hyper: GpHyperparams, standardization=(0.0, 1.0)
) -> GpModel:
    """Build a conditioned model from explicit hyperparameters.

    Labels are mapped through the supplied standardization before
    conditioning; ``(0, 1)`` conditions on raw labels.
    """
    m, s = float(standardization[0]), float(standardization[1])
    if s <= 0:
        raise ParameterError("standardization sd must be positive")
    if data.n == 0:
        d = data.dim
        return GpModel(data, hyper, (m, s), np.empty((0, 0)), np.empty(0))
    K = kernel_matrix(hyper.kernel, data.inputs)
    K_n = K + hyper.noise_var * np.eye(data.n)
    L, jit = _chol_with_jitter(K_n)
    y_std = (data.labels - m) / s - hyper.mean_const
    weights = cho_solve((L, True), y_std)
    return GpModel(data, hyper, (m, s), L, weights, jit)


def predict(model: GpModel, X, chunk: int = 8192):
    """Predictive mean and variance in label units.

    Parameters
    ----------
    X : array-like
        Single point ``(d,)`` or matrix ``(m, d)`` of unit-cube points.

    Returns
    -------
    (mean, variance)
        Scalars for a single point, ``(m,)`` arrays otherwise. Variances are
        clamped at zero.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    pts = np.atleast_2d(X)
    m, s = model.standardization
    diag = model.hyper.kernel.total_outputscale
    if model.n == 0:
        mean = np.full(pts.shape[0], m + s * model.hyper.mean_const)
        var = np.full(pts.shape[0], s * s * diag)
    else:
        mean = np.empty(pts.shape[0])
        var = np.empty(pts.shape[0])
        for lo in range(0, pts.shape[0], chunk):
            hi = min(lo + chunk, pts.shape[0])
            Ks = kernel_matrix(model.hyper.kernel, pts[lo:hi], model.data.inputs)
            mean[lo:hi] = model.hyper.mean_const + Ks @ model.weights
            V = solve_triangular(model.chol, Ks.T, lower=True)
            var[lo:hi] = diag - np.einsum("ij,ij->j", V, V)
        np.maximum(var, 0.0, out=var)
        mean = m + s * mean
        var = s * s * var
    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def update(model: GpModel, new) -> GpModel:
    """Condition on one more (point, label) pair with unchanged
    hyperparameters and standardization constants."""
    x, y = new
    return condition(
        model.data.append(x, y), model.hyper, model.standardization
    )


# ---------------------------------------------------------------------------
# Hyperparameter learning
# ---------------------------------------------------------------------------


class _Layout:
    """Flat log-parameter vector layout for a kernel template."""

    def __init__(self, template: KernelSpec):
        self.families = [t.family for t in template.terms]
        self.d = template.dim
        self.term_slots = []
        pos = 0
        for fam in self.families:
            ls_sl = slice(pos, pos + self.d)
            pos += self.d
            sc = pos
            pos += 1
            al = None
            if fam == "rational-quadratic":
                al = pos
                pos += 1
            self.term_slots.append((ls_sl, sc, al))
        self.noise_idx = pos
        self.size = pos + 1

    def bounds(self):
        lo = np.empty(self.size)
        hi = np.empty(self.size)
        for ls_sl, sc, al in self.term_slots:
            lo[ls_sl], hi[ls_sl] = np.log(LENGTHSCALE_BOUNDS[0]), np.log(
                LENGTHSCALE_BOUNDS[1]
            )
            lo[sc], hi[sc] = np.log(OUTPUTSCALE_BOUNDS[0]), np.log(
                OUTPUTSCALE_BOUNDS[1]
            )
            if al is not None:
                lo[al], hi[al] = np.log(RQ_ALPHA_BOUNDS[0]), np.log(
                    RQ_ALPHA_BOUNDS[1]
                )
        lo[self.noise_idx], hi[self.noise_idx] = np.log(NOISE_BOUNDS[0]), np.log(
            NOISE_BOUNDS[1]
        )
        return lo, hi

    def pack(self, hyper: GpHyperparams) -> np.ndarray:
        theta = np.empty(self.size)
        for (ls_sl, sc, al), term in zip(self.term_slots, hyper.kernel.terms):
            theta[ls_sl] = np.log(term.lengthscales)
            theta[sc] = np.log(max(term.outputscale, OUTPUTSCALE_BOUNDS[0]))
            if al is not None:
                theta[al] = np.log(term.alpha)
        theta[self.noise_idx] = np.log(max(hyper.noise_var, NOISE_BOUNDS[0]))
        return theta

    def unpack(self, theta: np.ndarray) -> GpHyperparams:
        terms = []
        for (ls_sl, sc, al), fam in zip(self.term_slots, self.families):
            terms.append(
                KernelTerm(
                    fam,
                    np.exp(theta[ls_sl]),
                    float(np.exp(theta[sc])),
                    float(np.exp(theta[al])) if al is not None else None,
                )
            )
        return GpHyperparams(
            KernelSpec(tuple(terms)), float(np.exp(theta[self.noise_idx]))
        )


def _pairwise_sqdiffs(X: np.ndarray) -> np.ndarray:
    """Per-dimension squared differences, shape (d, n, n)."""
    diff = X[:, None, :] - X[None, :, :]
    return np.ascontiguousarray(np.square(diff).transpose(2, 0, 1))


def _term_value_factor(fam, r2, alpha):
    """Covariance profile V and gradient factor F with
    dK/dlog(l_d) = outputscale * F * w_d, w_d = D2[d] / l_d^2."""
    if fam == "squared-exponential":
        V = np.exp(-0.5 * r2)
        return V, V, None
    if fam == "matern-1/2":
        r = np.sqrt(r2)
        V = np.exp(-r)
        with np.errstate(divide="ignore", invalid="ignore"):
            F = np.where(r > 0, V / np.where(r > 0, r, 1.0), 0.0)
        return V, F, None
    if fam == "matern-3/2":
        t = np.sqrt(3.0 * r2)
        e = np.exp(-t)
        return (1.0 + t) * e, 3.0 * e, None
    if fam == "matern-5/2":
        t = np.sqrt(5.0 * r2)
        e = np.exp(-t)
        return (1.0 + t + t * t / 3.0) * e, (5.0 / 3.0) * (1.0 + t) * e, None
    # rational quadratic
    B = 1.0 + r2 / (2.0 * alpha)
    V = B ** (-alpha)
    F = B ** (-alpha - 1.0)
    dlog_alpha = alpha * V * (-np.log(B) + (B - 1.0) / B)
    return V, F, dlog_alpha


def _halfcauchy_logpdf(ls: np.ndarray, scale: float) -> float:
    return float(
        np.sum(np.log(2.0 / np.pi) - np.log(scale) - np.log1p((ls / scale) ** 2))
    )


def _neg_map_objective(theta, layout, D2, y, prior_scale):
    """Negative (log marginal likelihood + log prior) and its gradient."""
    n = y.size
    K = np.zeros((n, n))
    cache = []
    for (ls_sl, sc, al), fam in zip(layout.term_slots, layout.families):
        ls = np.exp(theta[ls_sl])
        scale = np.exp(theta[sc])
        alpha = np.exp(theta[al]) if al is not None else None
        inv2 = 1.0 / (ls * ls)
        r2 = np.tensordot(inv2, D2, axes=(0, 0))
        V, F, dVdloga = _term_value_factor(fam, r2, alpha)
        K += scale * V
        cache.append((ls, scale, inv2, V, F, dVdloga))
    noise = np.exp(theta[layout.noise_idx])
    K[np.diag_indices_from(K)] += noise
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        return 1e25, np.zeros_like(theta)
    w = cho_solve((L, True), y)
    lml = (
        -0.5 * float(y @ w)
        - float(np.log(np.diag(L)).sum())
        - 0.5 * n * np.log(2.0 * np.pi)
    )
    K_inv = cho_solve((L, True), np.eye(n))
    W = np.outer(w, w) - K_inv

    grad = np.zeros_like(theta)
    logprior = 0.0
    for (ls_sl, sc, al), (ls, scale, inv2, V, F, dVdloga) in zip(
        layout.term_slots, cache
    ):
        G = W * F
        grad[ls_sl] = 0.5 * scale * inv2 * np.tensordot(
            D2, G, axes=([1, 2], [0, 1])
        )
        grad[sc] = 0.5 * scale * float(np.vdot(W, V))
        if al is not None:
            grad[al] = 0.5 * scale * float(np.vdot(W, dVdloga))
        if prior_scale is not None:
            logprior += _halfcauchy_logpdf(ls, prior_scale)
            grad[ls_sl] += -2.0 * ls * ls / (prior_scale**2 + ls * ls)
    grad[layout.noise_idx] = 0.5 * noise * float(np.trace(W))
    return -(lml + logprior), -grad


def log_map_objective(
    data: Dataset, hyper: GpHyperparams, priors: PriorSpec | None = None
) -> float:
    """Log marginal likelihood plus log prior at the given hyperparameters.

    Evaluates on the dataset's labels as-is (no standardization) so it can be
    checked against direct dense linear algebra. ``priors=None`` means flat
    priors on everything.
    """
    n = data.n
    K = kernel_matrix(hyper.kernel, data.inputs)
    K_n = K + hyper.noise_var * np.eye(n)
    try:
        L = np.linalg.cholesky(K_n)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError("K + noise_var I is not positive definite") from exc
    y = data.labels - hyper.mean_const
    w = cho_solve((L, True), y)
    lml = (
        -0.5 * float(y @ w)
        - float(np.log(np.diag(L)).sum())
        - 0.5 * n * np.log(2.0 * np.pi)
    )
    if priors is not None:
        for term in hyper.kernel.terms:
            lml += _halfcauchy_logpdf(term.lengthscales, priors.lengthscale_scale)
    return lml


def fit(
    data: Dataset,
    priors: PriorSpec | None = PriorSpec(),
    restarts: int = 5,
    rng: np.random.Generator | int | None = None,
    kernel: KernelSpec | str | None = None,
    warm_start: GpHyperparams | None = None,
    max_iter: int = 100,
) -> GpModel:
    """Learn hyperparameters by MAP and return the conditioned model.

    Labels are standardized to zero mean / unit sd internally; the MAP search
    runs over log-parameters inside the module box constraints, starting from
    ``restarts`` log-uniform initializations (plus ``warm_start`` when given).
    The returned objective dominates every initialization tried.

    Parameters
    ----------
    kernel : KernelSpec, "full", "matern52", or None
        Kernel template; ``None``/"full" is the five-family sum,
        "matern52" the single-term fast configuration.
    warm_start : GpHyperparams, optional
        Extra initialization, e.g. the previous iteration's optimum.
    """
    if data.n < 2:
        raise ParameterError("fit requires at least two observations")
    if restarts < 1:
        raise ParameterError("restarts must be a positive integer")
    m = float(np.mean(data.labels))
    s = float(np.std(data.labels))
    if s == 0.0:
        raise ParameterError("labels are all identical; nothing to standardize")
    if kernel is None or kernel == "full":
        template = default_kernel(data.dim)
    elif kernel == "matern52":
        template = matern52_kernel(data.dim)
    elif isinstance(kernel, KernelSpec):
        template = kernel
    else:
        raise ParameterError(f"unknown kernel configuration {kernel!r}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    layout = _Layout(template)
    lo, hi = layout.bounds()
    y_std = (data.labels - m) / s
    D2 = _pairwise_sqdiffs(data.inputs)
    prior_scale = priors.lengthscale_scale if priors is not None else None

    inits = [rng.uniform(lo, hi) for _ in range(restarts)]
    if warm_start is not None:
        inits.insert(0, np.clip(layout.pack(warm_start), lo, hi))

    best_theta, best_val = None, np.inf
    bounds = list(zip(lo, hi))
    for theta0 in inits:
        res = minimize(
            _neg_map_objective,
            theta0,
            args=(layout, D2, y_std, prior_scale),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": max_iter},
        )
        val = res.fun if np.isfinite(res.fun) else np.inf
        if val < best_val:
            best_val, best_theta = val, res.x
    if best_theta is None:
        raise IllConditionedError("hyperparameter search failed for every start")
    return condition(data, layout.unpack(best_theta), (m, s))


# ---------------------------------------------------------------------------
# Serialization (versioned JSON, for campaign resume)
# ---------------------------------------------------------------------------


def model_to_json(model: GpModel) -> str:
    """Serialize hyperparameters + data to a versioned JSON document."""
    doc = {
        "format": _SERIAL_FORMAT,
        "version": _SERIAL_VERSION,
        "kernel": [
            {
                "family": t.family,
                "lengthscales": t.lengthscales.tolist(),
                "outputscale": t.outputscale,
                "alpha": t.alpha,
            }
            for t in model.hyper.kernel.terms
        ],
        "noise_var": model.hyper.noise_var,
        "mean_const": model.hyper.mean_const,
        "standardization": list(model.standardization),
        "inputs": model.data.inputs.tolist(),
        "labels": model.data.labels.tolist(),
    }
    return json.dumps(doc)


def model_from_json(text: str) -> GpModel:
    """Rebuild a conditioned model from :func:`model_to_json` output."""
    doc = json.loads(text)
    if doc.get("format") != _SERIAL_FORMAT or doc.get("version") != _SERIAL_VERSION:
        raise ParameterError("unrecognized GP serialization format/version")
    terms = tuple(
        KernelTerm(
            t["family"],
            np.asarray(t["lengthscales"], dtype=float),
            float(t["outputscale"]),
            None if t["alpha"] is None else float(t["alpha"]),
        )
        for t in doc["kernel"]
    )
    hyper = GpHyperparams(
        KernelSpec(terms), float(doc["noise_var"]), float(doc["mean_const"])
    )
    d = len(doc["kernel"][0]["lengthscales"])
    inputs = np.asarray(doc["inputs"], dtype=float).reshape(-1, d)
    data = Dataset(inputs, np.asarray(doc["labels"], dtype=float))
    return condition(data, hyper, tuple(doc["standardization"]))
