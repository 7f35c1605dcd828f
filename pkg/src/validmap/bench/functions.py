"""Analytic benchmark error surfaces and the case registry.

Each case bundles a function, its domain, and default tolerance / noise
settings. For the plain analytic cases the function itself plays the role of
the error surface; the ``ridge-*`` cases instead train a polynomial ridge
regressor on noisy function samples and validate it, so their error surface
is (trained model - function).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..design import lhs, substream
from ..domain import Domain
from ..exceptions import DomainError, ParameterError
from .ridge import PolynomialRidge


def styblinski_tang(X) -> np.ndarray:
    """``0.5 sum_i (x_i^4 - 16 x_i^2 + 5 x_i)`` on ``[-5, 5]^d``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return 0.5 * np.sum(X**4 - 16.0 * X**2 + 5.0 * X, axis=1)


def michalewicz(X) -> np.ndarray:
    """``-sum_i sin(x_i) sin^20(i x_i^2 / pi)`` on ``[0, pi]^d``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    i = np.arange(1, X.shape[1] + 1)
    return -np.sum(np.sin(X) * np.sin(i * X**2 / np.pi) ** 20, axis=1)


def mod_rastrigin(X) -> np.ndarray:
    """``10 + sum_{i=1}^2 (x_i^2 - 5 cos(2 pi x_i))`` on ``[-5, 5]^2``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != 2:
        raise ParameterError("mod-rastrigin is a 2-d function")
    return 10.0 + np.sum(X**2 - 5.0 * np.cos(2.0 * np.pi * X), axis=1)


def series_system(X) -> np.ndarray:
    """Minimum of four branch functions on ``[-8, 8]^2``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != 2:
        raise ParameterError("series-system is a 2-d function")
    x1, x2 = X[:, 0], X[:, 1]
    s = (x1 + x2) / np.sqrt(2.0)
    quad = 3.0 + 0.1 * (x1 - x2) ** 2
    b1 = quad - s
    b2 = quad + s
    b3 = (x1 - x2) + 7.0 / np.sqrt(2.0)
    b4 = (x2 - x1) + 7.0 / np.sqrt(2.0)
    return np.min(np.stack([b1, b2, b3, b4]), axis=0)


def rosenbrock(X) -> np.ndarray:
    """``sum_{i<d} 100 (x_{i+1} - x_i)^2 + (x_i - 1)^2`` on ``[-2, 2]^d``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] < 2:
        raise ParameterError("rosenbrock needs at least 2 dimensions")
    return np.sum(
        100.0 * (X[:, 1:] - X[:, :-1]) ** 2 + (X[:, :-1] - 1.0) ** 2, axis=1
    )


def exp_sine(X) -> np.ndarray:
    """``0.5 exp(x) sin(8 x - 2)`` on ``[0, 1]``; its absolute value crosses
    1 near 0.786 and 0.920."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != 1:
        raise ParameterError("this benchmark is one-dimensional")
    x = X[:, 0]
    return 0.5 * np.exp(x) * np.sin(8.0 * x - 2.0)


_FUNCTIONS = {
    "styblinski-tang": styblinski_tang,
    "michalewicz": michalewicz,
    "mod-rastrigin": mod_rastrigin,
    "series-system": series_system,
    "rosenbrock": rosenbrock,
    "appendix-1d": exp_sine,
}


@dataclass(frozen=True, eq=False)
class BenchmarkCase:
    """A registered validation problem with default settings."""

    case_id: str
    function: str
    dim: int
    domain: Domain
    xi: float
    sigma_e: float
    error_fn: Callable
    model_fn: Callable | None = None
    truth_fn: Callable | None = None

    @property
    def fn(self) -> Callable:
        return _FUNCTIONS[self.function]


def eval_benchmark(case: BenchmarkCase, x) -> np.ndarray:
    """Evaluate the case's analytic function at original-coordinate points,
    rejecting out-of-domain inputs."""
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x)
    case.domain.normalize(pts)  # raises DomainError when out of bounds
    vals = case.fn(pts)
    return vals if x.ndim == 2 else float(vals[0])


def ground_truth_labels(case: BenchmarkCase, points) -> np.ndarray:
    """Noiseless validity labels: ``xi - |delta(x)| >= 0`` at
    original-coordinate points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return case.xi - np.abs(case.error_fn(pts)) >= 0.0


# Tolerance / noise defaults for the analytic error surfaces.
_ANALYTIC_SETTINGS = {
    "styblinski-tang": (30.0, 5.0),
    "michalewicz": (0.07, 0.01),
    "mod-rastrigin": (20.0, 0.1),
    "series-system": (3.0, 0.5),
}

# Validate-a-trained-model settings per (function, dim):
# (xi, sigma_e, n_train for the ridge model).
_RIDGE_SETTINGS = {
    ("rosenbrock", 2): (250.0, 5.0, 100),
    ("rosenbrock", 4): (500.0, 5.0, 200),
    ("rosenbrock", 8): (1000.0, 5.0, 200),
    ("michalewicz", 2): (0.3, 0.03, 200),
    ("michalewicz", 4): (0.6, 0.03, 200),
    ("michalewicz", 8): (0.9, 0.03, 200),
}

_DOMAINS = {
    "styblinski-tang": (-5.0, 5.0),
    "michalewicz": (0.0, np.pi),
    "mod-rastrigin": (-5.0, 5.0),
    "series-system": (-8.0, 8.0),
    "rosenbrock": (-2.0, 2.0),
    "appendix-1d": (0.0, 1.0),
}

RIDGE_DEGREE = 3
RIDGE_L2 = 0.3
_RIDGE_TRAIN_SEED = 0  # shared model across repetitions


def _box(function: str, d: int) -> Domain:
    lo, hi = _DOMAINS[function]
    return Domain(np.full(d, lo), np.full(d, hi))


def case_ids() -> list:
    """All registered case ids."""
    ids = ["appendix-1d", "mod-rastrigin-2d", "series-system-2d"]
    ids += [f"styblinski-tang-{d}d" for d in range(2, 9)]
    ids += [f"michalewicz-{d}d" for d in range(2, 9)]
    ids += [f"rosenbrock-{d}d" for d in (2, 4, 8)]
    ids += [f"ridge-{fn}-{d}d" for fn, d in _RIDGE_SETTINGS]
    return sorted(ids)


def _parse_id(case_id: str):
    stem = case_id
    ridge = stem.startswith("ridge-")
    if ridge:
        stem = stem[len("ridge-"):]
    if stem == "appendix-1d":
        return ridge, "appendix-1d", 1
    name, _, tail = stem.rpartition("-")
    if not tail.endswith("d") or not tail[:-1].isdigit():
        raise ParameterError(f"unknown benchmark case {case_id!r}")
    return ridge, name, int(tail[:-1])


def get_case(case_id: str, train_seed: int = _RIDGE_TRAIN_SEED) -> BenchmarkCase:
    """Resolve a case id to a fully built :class:`BenchmarkCase`.

    ``ridge-*`` cases train their polynomial ridge model here; ``train_seed``
    controls the (by default fixed) training sample so the validated model is
    identical across campaign repetitions.
    """
    ridge, name, d = _parse_id(case_id)
    if name not in _FUNCTIONS:
        raise ParameterError(f"unknown benchmark case {case_id!r}")
    fn = _FUNCTIONS[name]
    domain = _box(name, d)
    if name in ("mod-rastrigin", "series-system") and d != 2:
        raise ParameterError(f"{name} is only defined for d=2")
    if name == "appendix-1d" and (d != 1 or ridge):
        raise ParameterError("appendix-1d is 1-d and has no ridge variant")

    if ridge:
        if (name, d) not in _RIDGE_SETTINGS:
            raise ParameterError(f"no trained-model settings for {case_id!r}")
        xi, sigma_e, n_train = _RIDGE_SETTINGS[(name, d)]
        rng = substream(train_seed, "train")
        X_train = domain.denormalize(lhs(n_train, d, rng))
        y_train = fn(X_train) + rng.normal(0.0, sigma_e, size=n_train)
        model = PolynomialRidge(degree=RIDGE_DEGREE, l2=RIDGE_L2).fit(
            X_train, y_train
        )
        return BenchmarkCase(
            case_id=case_id,
            function=name,
            dim=d,
            domain=domain,
            xi=xi,
            sigma_e=sigma_e,
            error_fn=lambda X: model.predict(X) - fn(X),
            model_fn=model.predict,
            truth_fn=fn,
        )

    if name == "appendix-1d":
        xi, sigma_e = 1.0, 0.05
    elif name == "rosenbrock":
        if (name, d) not in _RIDGE_SETTINGS:
            raise ParameterError(f"no default settings for {case_id!r}")
        xi, sigma_e, _ = _RIDGE_SETTINGS[(name, d)]
    else:
        xi, sigma_e = _ANALYTIC_SETTINGS[name]
    return BenchmarkCase(
        case_id=case_id,
        function=name,
        dim=d,
        domain=domain,
        xi=xi,
        sigma_e=sigma_e,
        error_fn=fn,
    )
