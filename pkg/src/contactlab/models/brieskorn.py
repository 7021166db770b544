"""Brieskorn manifolds ``B = {|z|^2 = 1, Σ z_j^{a_j} = 0}`` and Ustilovsky's family."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import NoConvergence, OffManifold
from ..fields import ScalarField, linear_combination
from ..geometry import project_to_manifold
from ..reduction import ConstraintSet
from .complexcoords import from_complex, gradient_from_dzbar, to_complex
from .sphere import WeightedSphereModel, sphere_integrals


def _zpow(z, a):
    return np.power(z, np.asarray(a))


@dataclass(frozen=True)
class BrieskornModel:
    exponents: Tuple[int, ...]

    def __post_init__(self):
        ex = tuple(self.exponents)
        if len(ex) < 2:
            raise ValueError("need at least two exponents")
        for a in ex:
            if int(a) != a or a < 1:
                raise ValueError("exponents ≥ 1 (integers)")
        object.__setattr__(self, "exponents", tuple(int(a) for a in ex))

    @property
    def sphere(self):
        return WeightedSphereModel(self.exponents)

    @property
    def ambient_dim(self):
        return self.sphere.ambient_dim

    def _G_field(self, part):
        a = np.asarray(self.exponents)

        def value(x):
            s = np.sum(_zpow(to_complex(x), a))
            return float(s.real if part == 1 else s.imag)

        def grad(x):
            zb = np.conj(to_complex(x))
            dz = a * _zpow(zb, a - 1)
            # Re: ∂/∂z̄ = a z̄^{a-1}/2 ; Im: ∂/∂z̄ = i a z̄^{a-1}/2
            return gradient_from_dzbar(0.5 * dz if part == 1 else 0.5j * dz)

        return ScalarField(f"G{part}", value, grad)

    def constraint_fields(self):
        return self._G_field(1), self._G_field(2)

    def constraint_set(self):
        return ConstraintSet(self.constraint_fields())

    def manifold(self, tolerances=None):
        """The ambient weighted sphere the Dirac reduction starts from."""
        return self.sphere.manifold(tolerances)

    def reduced_manifold(self, tolerances=None):
        """B itself as an embedded contact manifold (three constraints)."""
        M = self.manifold(tolerances)
        return M.with_constraints(self.constraint_fields(), name=f"B(a={self.exponents})")

    def fields(self):
        out = dict(self.sphere.fields())
        G1, G2 = self.constraint_fields()
        out["G1"], out["G2"] = G1, G2
        m = len(self.exponents)
        for j in range(m):
            for k in range(m):
                if j != k:
                    out[f"f{j}_{k}"] = fjk_field(self, j, k)
        return out

    def sample(self, rng, count, min_modulus=0.05, max_tries=10000):
        """Random points of B: Gaussian direction, normalize, project, reject near axes."""
        B = self.reduced_manifold()
        pts = []
        tries = 0
        while len(pts) < count:
            tries += 1
            if tries > max_tries:
                raise NoConvergence("could not sample enough Brieskorn points")
            y = rng.standard_normal(self.ambient_dim)
            y /= np.linalg.norm(y)
            try:
                x = project_to_manifold(B, y)
            except NoConvergence:
                continue
            if np.min(np.abs(to_complex(x))) < min_modulus:
                continue
            pts.append(x)
        return np.array(pts)


def _on_B(model, x, tol=1e-8):
    x = np.asarray(x, dtype=float)
    z = to_complex(x)
    if abs(x @ x - 1.0) >= tol or abs(np.sum(_zpow(z, model.exponents))) >= tol:
        raise OffManifold("point is not on the Brieskorn manifold")
    return z


def brieskorn_V_fields(model, x):
    """``V_1 = 2i Σ(z̄^{a-1} ∂_z - z^{a-1} ∂_z̄)``, ``V_2 = -2 Σ(z̄^{a-1} ∂_z + z^{a-1} ∂_z̄)``."""
    a = np.asarray(model.exponents)
    zb1 = np.conj(_zpow(to_complex(x), a - 1))
    return from_complex(2j * zb1), from_complex(-2.0 * zb1)


def brieskorn_mu(model, x):
    z = _on_B(model, x)
    a = np.asarray(model.exponents)
    return float(2.0 * np.sum(a * np.abs(z) ** (2 * (a - 1))))


def brieskorn_bracket_closed_form(model, x, j, k):
    """``[f_j, f_k]_B = (8i/μ)(z̄_j^{a_j} z_k^{a_k} - z_j^{a_j} z̄_k^{a_k})``."""
    mu = brieskorn_mu(model, x)
    u = _zpow(to_complex(x), model.exponents)
    return float(-16.0 / mu * np.imag(np.conj(u[j]) * u[k]))


def brieskorn_fjk(model, x, j, k):
    u = _zpow(to_complex(x), model.exponents)
    return float(-2.0 * np.imag(np.conj(u[j]) * u[k]))


def fjk_field(model, j, k, name=None):
    """``f_{j,k} = i(z̄_j^{a_j} z_k^{a_k} - z_j^{a_j} z̄_k^{a_k})`` as a field."""
    a = np.asarray(model.exponents)
    aj, ak = a[j], a[k]

    def value(x):
        return brieskorn_fjk(model, x, j, k)

    def grad(x):
        z = to_complex(x)
        dzbar = np.zeros(z.size, dtype=complex)
        if j != k:
            zb = np.conj(z)
            dzbar[j] = 1j * aj * zb[j] ** (aj - 1) * z[k] ** ak
            dzbar[k] = -1j * ak * z[j] ** aj * zb[k] ** (ak - 1)
        return gradient_from_dzbar(dzbar)

    return ScalarField(name or f"f{j}_{k}", value, grad)


@dataclass(frozen=True)
class UstilovskyModel:
    p: int
    m: int
    epsilons: Tuple[float, ...]

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1 or self.p % 8 not in (1, 7):
            raise ValueError("p must be a positive integer with p ≡ ±1 (mod 8)")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        eps = tuple(float(e) for e in self.epsilons)
        if len(eps) != self.m:
            raise ValueError(f"need exactly m={self.m} epsilons")
        if any(not 0.0 < e < 1.0 for e in eps):
            raise ValueError("epsilons must lie in (0, 1)")
        object.__setattr__(self, "epsilons", eps)

    @property
    def n(self):
        return 2 * self.m + 1

    @property
    def exponents(self):
        return (int(self.p),) + (2,) * self.n

    @property
    def brieskorn(self):
        return BrieskornModel(self.exponents)

    @property
    def ambient_dim(self):
        return 2 * (self.n + 1)

    def fields(self):
        out = dict(self.brieskorn.fields())
        out.update(ustilovsky_fields(self))
        return out


def _g_field(j):
    # g_j = 2(y_{2j} x_{2j+1} - y_{2j+1} x_{2j})
    a, b = 2 * j, 2 * j + 1
    xa, ya, xb, yb = 2 * a, 2 * a + 1, 2 * b, 2 * b + 1

    def value(x):
        return float(2.0 * (x[ya] * x[xb] - x[yb] * x[xa]))

    def grad(x):
        g = np.zeros_like(x)
        g[ya] = 2.0 * x[xb]
        g[xb] = 2.0 * x[ya]
        g[yb] = -2.0 * x[xa]
        g[xa] = -2.0 * x[yb]
        return g

    return ScalarField(f"g{j}", value, grad)


def ustilovsky_fields(model):
    """``H, g_j, h_j, q_j`` for ``j = 1..m``."""
    f = sphere_integrals(model.brieskorn.sphere)
    F = model.brieskorn.sphere.norm_squared()
    B = model.brieskorn
    out = {}
    gs = []
    for j in range(1, model.m + 1):
        g = _g_field(j)
        gs.append(g)
        out[g.name] = g
        out[f"h{j}"] = linear_combination(
            [(1.0, f[2 * j]), (1.0, f[2 * j + 1])], f"h{j}"
        )
        out[f"q{j}"] = linear_combination(
            [(1.0, fjk_field(B, 1, 2 * j)), (1.0, fjk_field(B, 1, 2 * j + 1))],
            f"q{j}",
        )
    out["H"] = linear_combination(
        [(1.0, F)] + [(e, g) for e, g in zip(model.epsilons, gs)], "H"
    )
    return out
