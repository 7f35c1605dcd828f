"""Polynomial-feature ridge regression, the built-in model under validation.

Inputs and outputs are standardized internally; the weight vector minimizes
the sum-of-squares objective ``||Phi w - y||^2 + l2 ||w||^2`` with an
unpenalized intercept (so duplicating the dataset while doubling ``l2``
leaves the fit unchanged).
"""

from __future__ import annotations

from itertools import combinations_with_replacement

import numpy as np

from ..exceptions import ParameterError


def _poly_powers(d: int, degree: int):
    powers = []
    for total in range(1, degree + 1):
        for combo in combinations_with_replacement(range(d), total):
            p = np.zeros(d, dtype=int)
            for j in combo:
                p[j] += 1
            powers.append(p)
    return np.asarray(powers)


class PolynomialRidge:
    """Ridge regression on all monomials up to a total degree."""

    def __init__(self, degree: int = 3, l2: float = 0.3):
        if degree < 1:
            raise ParameterError("polynomial degree must be at least 1")
        if l2 < 0:
            raise ParameterError("l2 strength must be nonnegative")
        self.degree = degree
        self.l2 = l2
        self._fitted = False

    def _features(self, X: np.ndarray) -> np.ndarray:
        Z = (X - self._x_mean) / self._x_scale
        return np.prod(Z[:, None, :] ** self._powers[None, :, :], axis=2)

    def fit(self, X, y) -> "PolynomialRidge":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).reshape(-1)
        if X.shape[0] != y.size:
            raise ParameterError("X and y lengths differ")
        self._x_mean = X.mean(axis=0)
        self._x_scale = np.where(X.std(axis=0) > 0, X.std(axis=0), 1.0)
        self._y_mean = float(y.mean())
        self._y_scale = float(y.std()) or 1.0
        self._powers = _poly_powers(X.shape[1], self.degree)

        Phi = self._features(X)
        phi_mean = Phi.mean(axis=0)
        Phi_c = Phi - phi_mean
        y_c = (y - self._y_mean) / self._y_scale
        A = Phi_c.T @ Phi_c + self.l2 * np.eye(Phi.shape[1])
        self._w = np.linalg.solve(A, Phi_c.T @ y_c)
        self._phi_mean = phi_mean
        self._fitted = True
        return self

    def predict(self, X) -> np.ndarray:
        if not self._fitted:
            raise ParameterError("model is not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Phi = self._features(X) - self._phi_mean
        return self._y_mean + self._y_scale * (Phi @ self._w)


def ridge_fit(X, y, degree: int = 3, l2: float = 0.3) -> PolynomialRidge:
    """Fit a :class:`PolynomialRidge` and return it."""
    return PolynomialRidge(degree=degree, l2=l2).fit(X, y)
