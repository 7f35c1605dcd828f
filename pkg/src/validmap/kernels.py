"""Stationary covariance functions with ARD lengthscales.

A kernel is a sum of terms drawn from five families: squared exponential,
Matern 1/2, 3/2, 5/2, and rational quadratic. Each term carries its own
per-dimension lengthscales and output scale; rational-quadratic terms add a
shape parameter ``alpha``.

For a term with unit output scale the covariance is a function of the scaled
distance ``r^2 = sum_d (x_d - z_d)^2 / l_d^2``:

- squared exponential:  ``exp(-r^2 / 2)``
- matern-1/2:           ``exp(-r)``
- matern-3/2:           ``(1 + t) exp(-t)``,            ``t = sqrt(3) r``
- matern-5/2:           ``(1 + t + t^2/3) exp(-t)``,    ``t = sqrt(5) r``
- rational quadratic:   ``(1 + r^2 / (2 alpha))^(-alpha)``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError

FAMILIES = (
    "squared-exponential",
    "matern-1/2",
    "matern-3/2",
    "matern-5/2",
    "rational-quadratic",
)

# Maximum of |d kappa / d r| for the unit-lengthscale, unit-scale profile of
# each family; used for kernel Lipschitz bounds.
_SLOPE_SUP = {
    "squared-exponential": np.exp(-0.5),
    "matern-1/2": 1.0,
    "matern-3/2": np.sqrt(3.0) / np.e,
}


@dataclass(frozen=True, eq=False)
class KernelTerm:
    """One additive covariance term."""

    family: str
    lengthscales: np.ndarray
    outputscale: float
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown kernel family {self.family!r}")
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        if (ls <= 0).any() or not np.isfinite(ls).all():
            raise ParameterError("lengthscales must be strictly positive")
        if not (self.outputscale >= 0 and np.isfinite(self.outputscale)):
            raise ParameterError("outputscale must be nonnegative")
        if self.family == "rational-quadratic":
            if self.alpha is None or self.alpha <= 0:
                raise ParameterError("rational-quadratic needs alpha > 0")
        elif self.alpha is not None:
            raise ParameterError(f"alpha is not a {self.family} parameter")
        object.__setattr__(self, "lengthscales", ls)

    @property
    def dim(self) -> int:
        return self.lengthscales.size


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A sum of :class:`KernelTerm` entries over a common input dimension."""

    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ParameterError("kernel needs at least one term")
        dims = {t.dim for t in terms}
        if len(dims) != 1:
            raise ParameterError("kernel terms disagree on input dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    @property
    def total_outputscale(self) -> float:
        return float(sum(t.outputscale for t in self.terms))


def default_kernel(d: int) -> KernelSpec:
    """Sum of all five families with per-term ARD lengthscales."""
    ones = np.ones(d)
    terms = []
    for family in FAMILIES:
        alpha = 1.0 if family == "rational-quadratic" else None
        terms.append(KernelTerm(family, ones, 1.0 / len(FAMILIES), alpha))
    return KernelSpec(tuple(terms))


def matern52_kernel(d: int) -> KernelSpec:
    """Single Matern-5/2 term; a cheap configuration for fast runs."""
    return KernelSpec((KernelTerm("matern-5/2", np.ones(d), 1.0),))


def _profile(family: str, r2: np.ndarray, alpha: float | None) -> np.ndarray:
    """Unit-scale covariance profile as a function of scaled squared distance."""
    if family == "squared-exponential":
        return np.exp(-0.5 * r2)
    if family == "matern-1/2":
        return np.exp(-np.sqrt(r2))
    if family == "matern-3/2":
        t = np.sqrt(3.0 * r2)
        return (1.0 + t) * np.exp(-t)
    if family == "matern-5/2":
        t = np.sqrt(5.0 * r2)
        return (1.0 + t + t * t / 3.0) * np.exp(-t)
    # rational quadratic
    return (1.0 + r2 / (2.0 * alpha)) ** (-alpha)


def _scaled_sqdist(X: np.ndarray, Z: np.ndarray, ls: np.ndarray) -> np.ndarray:
    A = X / ls
    B = Z / ls
    r2 = (
        (A * A).sum(axis=1)[:, None]
        + (B * B).sum(axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    np.maximum(r2, 0.0, out=r2)
    return r2


def kernel_matrix(spec: KernelSpec, X, Z=None) -> np.ndarray:
    """Covariance matrix ``k(X, Z)``; ``Z=None`` means ``Z=X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Z = X if Z is None else np.atleast_2d(np.asarray(Z, dtype=float))
    if X.shape[1] != spec.dim or Z.shape[1] != spec.dim:
        raise ParameterError(
            f"points have dimension {X.shape[1]}/{Z.shape[1]}, kernel expects {spec.dim}"
        )
    K = np.zeros((X.shape[0], Z.shape[0]))
    for t in spec.terms:
        r2 = _scaled_sqdist(X, Z, t.lengthscales)
        K += t.outputscale * _profile(t.family, r2, t.alpha)
    return K


def kernel_diag(spec: KernelSpec, n: int) -> np.ndarray:
    """``k(x, x)`` for n points: the summed output scales (stationarity)."""
    return np.full(n, spec.total_outputscale)


def kernel_eval(spec: KernelSpec, x, z) -> float:
    """Scalar covariance between two points."""
    return float(kernel_matrix(spec, np.atleast_2d(x), np.atleast_2d(z))[0, 0])


def _rq_slope_sup(alpha: float) -> float:
    # argmax of r (1 + r^2/(2a))^{-a-1} is at r^2 = 2a/(2a+1)
    r = np.sqrt(2.0 * alpha / (2.0 * alpha + 1.0))
    return r * ((2.0 * alpha + 2.0) / (2.0 * alpha + 1.0)) ** (-(alpha + 1.0))


def _m52_slope_sup() -> float:
    # argmax of (5r/3)(1 + sqrt(5) r) exp(-sqrt(5) r) solves 5r^2 - sqrt(5)r - 1 = 0
    r = (np.sqrt(5.0) + 5.0) / 10.0
    s5 = np.sqrt(5.0)
    return (5.0 * r / 3.0) * (1.0 + s5 * r) * np.exp(-s5 * r)


def kernel_lipschitz(spec: KernelSpec) -> float:
    """Upper bound on the Lipschitz constant of ``x -> k(x, z)``.

    For each term, ``|grad_x k| <= outputscale * sup|kappa'| / min(l)``; the
    bound for the sum kernel adds the per-term bounds.
    """
    total = 0.0
    for t in spec.terms:
        if t.family == "matern-5/2":
            sup = _m52_slope_sup()
        elif t.family == "rational-quadratic":
            sup = _rq_slope_sup(t.alpha)
        else:
            sup = _SLOPE_SUP[t.family]
        total += t.outputscale * sup / float(t.lengthscales.min())
    return total
