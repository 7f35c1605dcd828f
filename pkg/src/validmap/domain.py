"""Core value types: validation domain, datasets, tolerances, and the noisy
residual oracle.

All modelling happens in unit-cube coordinates. A :class:`Domain` maps between
original coordinates and ``[0, 1]^d``; a :class:`ResidualOracle` answers
queries at unit-cube points with noisy residual labels
``y = f_M(x) - f_E(x) - eps``, ``eps ~ N(0, noise_sd^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import DomainError, EvaluationError, ParameterError


@dataclass(frozen=True, eq=False)
class Domain:
    """Axis-aligned box in original coordinates.

    Parameters
    ----------
    lower, upper : array-like, shape (d,)
        Per-dimension bounds with ``lower[i] < upper[i]``.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or upper.ndim != 1 or lower.shape != upper.shape:
            raise ParameterError("domain bounds must be equal-length vectors")
        if lower.size < 1:
            raise ParameterError("domain must have at least one dimension")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ParameterError("domain bounds must be finite")
        bad = np.where(lower >= upper)[0]
        if bad.size:
            raise ParameterError(
                f"degenerate domain: lower >= upper in dimension {bad[0]}"
            )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def normalize(self, x) -> np.ndarray:
        """Map original-coordinate points into the unit cube.

        Accepts a single point of shape ``(d,)`` or a matrix ``(n, d)``.
        Raises :class:`DomainError` naming the first offending dimension if a
        coordinate lies outside the bounds.
        """
        x = np.asarray(x, dtype=float)
        pts = np.atleast_2d(x)
        if pts.shape[1] != self.dim:
            raise ParameterError(
                f"point dimension {pts.shape[1]} != domain dimension {self.dim}"
            )
        below = pts < self.lower
        above = pts > self.upper
        if below.any() or above.any():
            i, j = np.argwhere(below | above)[0]
            raise DomainError(
                f"coordinate {pts[i, j]!r} outside "
                f"[{self.lower[j]}, {self.upper[j]}] in dimension {j}"
            )
        out = (pts - self.lower) / self.width
        return out if x.ndim == 2 else out[0]

    def denormalize(self, u) -> np.ndarray:
        """Inverse of :meth:`normalize`: map unit-cube points back."""
        u = np.asarray(u, dtype=float)
        pts = np.atleast_2d(u)
        if pts.shape[1] != self.dim:
            raise ParameterError(
                f"point dimension {pts.shape[1]} != domain dimension {self.dim}"
            )
        out = self.lower + pts * self.width
        return out if u.ndim == 2 else out[0]


def unit_domain(d: int) -> Domain:
    """The identity domain ``[0, 1]^d``."""
    return Domain(np.zeros(d), np.ones(d))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Observed pairs of unit-cube inputs and noisy residual labels.

    Labels are stored in original (unstandardized) units; standardization is
    an internal concern of the GP fit.
    """

    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        labels = np.atleast_1d(np.asarray(self.labels, dtype=float))
        if inputs.ndim != 2 or labels.ndim != 1:
            raise ParameterError("inputs must be (n, d), labels (n,)")
        if inputs.shape[0] != labels.shape[0]:
            raise ParameterError(
                f"{inputs.shape[0]} inputs but {labels.shape[0]} labels"
            )
        if inputs.size and (inputs.min() < 0.0 or inputs.max() > 1.0):
            raise ParameterError("dataset inputs must lie in the unit cube")
        if not np.isfinite(labels).all():
            raise ParameterError("dataset labels must be finite")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    def append(self, x, y: float) -> "Dataset":
        """Return a new dataset with one more (input, label) pair."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return Dataset(
            np.vstack([self.inputs, x]) if self.n else x,
            np.append(self.labels, float(y)),
        )


def empty_dataset(d: int) -> Dataset:
    return Dataset(np.empty((0, d)), np.empty(0))


@dataclass(frozen=True)
class ToleranceSpec:
    """Tolerance level and exploration slack for the limit-state problem."""

    xi: float
    omega: float = 0.0

    def __post_init__(self):
        if not (self.xi > 0 and np.isfinite(self.xi)):
            raise ParameterError(f"xi must be positive, got {self.xi}")
        if not (0.0 <= self.omega < self.xi):
            raise ParameterError(
                f"omega must satisfy 0 <= omega < xi, got omega={self.omega}"
            )


@dataclass(eq=False)
class ResidualOracle:
    """Noisy observation channel for the model error.

    Queries are made at unit-cube points; the oracle denormalizes, evaluates
    the residual surface ``delta = f_M - f_E`` (or a directly supplied error
    surface), and corrupts it with fresh Gaussian noise:
    ``y = delta(x) - eps`` with ``eps ~ N(0, noise_sd^2)``.

    Two oracles built with the same seed produce identical label streams for
    identical query sequences. The oracle owns its generator state and must
    not be shared across threads.

    Parameters
    ----------
    domain : Domain
        Validation domain in original coordinates.
    model_fn, truth_fn : callable, optional
        Vectorized maps from an ``(n, d)`` matrix of original-coordinate
        points to ``(n,)`` values. Supply both, or ``error_fn`` instead.
    error_fn : callable, optional
        Direct residual surface ``delta(x)`` in original coordinates.
    noise_sd : float
        Homoscedastic label-noise standard deviation (``>= 0``).
    rng : numpy.random.Generator or int
        Noise stream; an int is treated as a seed.
    """

    domain: Domain
    noise_sd: float = 0.0
    model_fn: Callable | None = None
    truth_fn: Callable | None = None
    error_fn: Callable | None = None
    rng: np.random.Generator | int | None = None
    n_queries: int = field(default=0, init=False)

    def __post_init__(self):
        if self.error_fn is None and (self.model_fn is None or self.truth_fn is None):
            raise ParameterError(
                "supply error_fn, or both model_fn and truth_fn"
            )
        if self.noise_sd < 0:
            raise ParameterError("noise_sd must be nonnegative")
        if not isinstance(self.rng, np.random.Generator):
            self.rng = np.random.default_rng(self.rng)

    def true_error(self, u) -> np.ndarray:
        """Noiseless residual ``delta`` at unit-cube points (for ground truth)."""
        x = self.domain.denormalize(np.atleast_2d(np.asarray(u, dtype=float)))
        if self.error_fn is not None:
            vals = np.asarray(self.error_fn(x), dtype=float)
        else:
            vals = np.asarray(self.model_fn(x), dtype=float) - np.asarray(
                self.truth_fn(x), dtype=float
            )
        return vals.reshape(-1)

    def observe_batch(self, U) -> np.ndarray:
        """Observe noisy labels at an ``(n, d)`` matrix of unit-cube points."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.size and (U.min() < -1e-12 or U.max() > 1 + 1e-12):
            raise DomainError("query points must lie in the unit cube")
        delta = self.true_error(U)
        if not np.isfinite(delta).all():
            bad = int(np.argwhere(~np.isfinite(delta))[0])
            raise EvaluationError(
                f"non-finite model output at query index {bad}"
            )
        if self.noise_sd > 0:
            delta = delta - self.rng.normal(0.0, self.noise_sd, size=delta.size)
        self.n_queries += delta.size
        return delta

    def observe(self, u) -> float:
        """Observe a single noisy label at a unit-cube point."""
        return float(self.observe_batch(np.atleast_2d(u))[0])
