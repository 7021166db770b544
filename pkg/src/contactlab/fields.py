"""Scalar fields and one-forms on ambient coordinate space.

Every field carries an optional analytic gradient. When it is missing the
gradient falls back to central differences with a per-coordinate step of
``cbrt(eps) * max(1, |x_i|)``.
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .config import FD_STEP


def fd_steps(x):
    return FD_STEP * np.maximum(1.0, np.abs(x))


def fd_gradient(func, x):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    h = fd_steps(x)
    g = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h[i]
        xm[i] -= h[i]
        g[i] = (func(xp) - func(xm)) / (xp[i] - xm[i])
    return g


def fd_jacobian(func, x):
    """Central-difference Jacobian ``J[i, j] = d func_i / d x_j``."""
    x = np.asarray(x, dtype=float)
    h = fd_steps(x)
    cols = []
    for j in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h[j]
        xm[j] -= h[j]
        cols.append((np.asarray(func(xp)) - np.asarray(func(xm))) / (xp[j] - xm[j]))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class ScalarField:
    name: str
    value: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x):
        return float(self.value(np.asarray(x, dtype=float)))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if self.gradient is None:
            return fd_gradient(self.value, x)
        return np.asarray(self.gradient(x), dtype=float)

    def fd_grad(self, x):
        return fd_gradient(self.value, np.asarray(x, dtype=float))

    def hess(self, x):
        x = np.asarray(x, dtype=float)
        if self.hessian is not None:
            return np.asarray(self.hessian(x), dtype=float)
        H = fd_jacobian(self.grad, x)
        return 0.5 * (H + H.T)

    @property
    def has_analytic_gradient(self):
        return self.gradient is not None

    def shifted(self, c, name=None):
        """The field ``self - c``; same gradient."""
        return ScalarField(
            name or f"{self.name}-{c:g}",
            lambda x: self.value(x) - c,
            self.gradient,
            self.hessian,
        )


def constant(c=1.0, name=None):
    def grad(x):
        return np.zeros_like(x)

    def hess(x):
        return np.zeros((x.size, x.size))

    return ScalarField(name or f"{c:g}", lambda x: float(c), grad, hess)


def coordinate(i, name=None):
    def grad(x):
        g = np.zeros_like(x)
        g[i] = 1.0
        return g

    def hess(x):
        return np.zeros((x.size, x.size))

    return ScalarField(name or f"x{i}", lambda x: float(x[i]), grad, hess)


def linear_combination(terms: Sequence, name, offset=0.0):
    """``offset + sum(c * field)`` for ``(c, field)`` pairs, keeping analytic parts."""
    terms = list(terms)

    def value(x):
        return offset + sum(c * f.value(x) for c, f in terms)

    grad = None
    if all(f.gradient is not None for _, f in terms):
        def grad(x):
            return sum(c * f.grad(x) for c, f in terms)

    hess = None
    if all(f.hessian is not None for _, f in terms):
        def hess(x):
            return sum(c * f.hess(x) for c, f in terms)

    return ScalarField(name, value, grad, hess)


@dataclass(frozen=True)
class OneForm:
    """A one-form ``sum a_i(x) dx_i`` with exterior derivative as a matrix.

    ``d(x)[i, j]`` is the coefficient such that ``dα(u, v) = u @ d(x) @ v``,
    i.e. ``∂_i a_j - ∂_j a_i``.
    """

    name: str
    coefficients: Callable[[np.ndarray], np.ndarray]
    exterior_derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x):
        return np.asarray(self.coefficients(np.asarray(x, dtype=float)), dtype=float)

    def d(self, x):
        x = np.asarray(x, dtype=float)
        if self.exterior_derivative is not None:
            return np.asarray(self.exterior_derivative(x), dtype=float)
        return self.fd_d(x)

    def fd_d(self, x):
        # J[i, j] = d a_i / d x_j; antisymmetrized explicitly to kill symmetric noise
        J = fd_jacobian(self.coefficients, np.asarray(x, dtype=float))
        return J.T - J
