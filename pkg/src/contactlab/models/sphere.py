"""Weighted contact spheres ``(S^{2n+1}, ¼ Σ a_j (x_j dy_j - y_j dx_j))``."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import OffManifold
from ..fields import OneForm, ScalarField, constant
from ..geometry import EmbeddedContactManifold
from .complexcoords import from_complex, to_complex


@dataclass(frozen=True)
class WeightedSphereModel:
    weights: Tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(a) for a in self.weights)
        if len(w) < 2:
            raise ValueError("need at least two weights (n >= 1)")
        if any(not np.isfinite(a) or a <= 0 for a in w):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return len(self.weights) - 1

    @property
    def ambient_dim(self):
        return 2 * len(self.weights)

    @property
    def frequencies(self):
        return np.array([4.0 / a for a in self.weights])

    def norm_squared(self):
        return ScalarField(
            "F",
            lambda x: float(x @ x),
            lambda x: 2.0 * x,
            lambda x: 2.0 * np.eye(x.size),
        )

    def sphere_constraint(self):
        return self.norm_squared().shifted(1.0, name="F-1")

    def contact_form(self):
        a = np.repeat(np.asarray(self.weights), 2)
        D = self.ambient_dim
        W = np.zeros((D, D))
        for j, aj in enumerate(self.weights):
            W[2 * j, 2 * j + 1] = 0.5 * aj
            W[2 * j + 1, 2 * j] = -0.5 * aj

        def coefficients(x):
            c = np.empty_like(x)
            c[0::2] = -0.25 * a[0::2] * x[1::2]
            c[1::2] = 0.25 * a[1::2] * x[0::2]
            return c

        return OneForm("alpha", coefficients, lambda x: W)

    def manifold(self, tolerances=None):
        kwargs = {} if tolerances is None else {"tolerances": tolerances}
        return EmbeddedContactManifold(
            self.ambient_dim,
            [self.sphere_constraint()],
            self.contact_form(),
            name=f"S(a={self.weights})",
            **kwargs,
        )

    def fields(self):
        out = {"one": constant(1.0, "one"), "F": self.norm_squared()}
        for f in sphere_integrals(self):
            out[f.name] = f
        return out

    def sample(self, rng, count, min_modulus=0.0):
        """Uniform points on the unit sphere, optionally with all |z_j| >= min_modulus."""
        pts = []
        while len(pts) < count:
            x = rng.standard_normal(self.ambient_dim)
            x /= np.linalg.norm(x)
            if np.min(np.abs(to_complex(x))) >= min_modulus:
                pts.append(x)
        return np.array(pts)


def _modulus_field(j):
    def value(x):
        return float(x[2 * j] ** 2 + x[2 * j + 1] ** 2)

    def grad(x):
        g = np.zeros_like(x)
        g[2 * j] = 2.0 * x[2 * j]
        g[2 * j + 1] = 2.0 * x[2 * j + 1]
        return g

    def hess(x):
        H = np.zeros((x.size, x.size))
        H[2 * j, 2 * j] = H[2 * j + 1, 2 * j + 1] = 2.0
        return H

    return ScalarField(f"f{j}", value, grad, hess)


def sphere_integrals(model):
    """``f_j = |z_j|^2`` for ``j = 0..n``."""
    return [_modulus_field(j) for j in range(len(model.weights))]


def sphere_reeb_closed_form(model, x, tol=1e-8):
    x = np.asarray(x, dtype=float)
    if abs(x @ x - 1.0) >= tol:
        raise OffManifold("point is not on the unit sphere")
    z = to_complex(x)
    return from_complex(4j * z / np.asarray(model.weights))
