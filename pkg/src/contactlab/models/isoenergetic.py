"""Energy hypersurfaces of contact type in flat ``(R^{2n+2}(q, p), dp∧dq)``.

Coordinates are block-ordered, ``x = (q_0..q_n, p_0..p_n)``. The default
contact form is ``α_0 = ½ Σ (p_i dq_i - q_i dp_i)`` whose Liouville field is
``E = ½ x``.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ..errors import DenominatorVanishes, NotContactType
from ..fields import OneForm, ScalarField, linear_combination
from ..geometry import (
    EmbeddedContactManifold,
    hamiltonian_vector_field,
    project_to_manifold,
)


def standard_one_form(dim):
    n = dim // 2
    W = np.zeros((dim, dim))
    W[:n, n:] = -np.eye(n)
    W[n:, :n] = np.eye(n)

    def coefficients(x):
        q, p = x[:n], x[n:]
        return 0.5 * np.concatenate([p, -q])

    return OneForm("alpha0", coefficients, lambda x: W)


@dataclass(frozen=True)
class IsoenergeticModel:
    name: str
    ambient_dim: int
    hamiltonian: ScalarField
    energy: float
    integrals: List[ScalarField]
    one_form: Optional[OneForm] = None
    liouville: Callable[[np.ndarray], np.ndarray] = field(default=lambda x: 0.5 * x)
    liouville_jacobian: Callable[[np.ndarray], np.ndarray] = field(
        default=lambda x: 0.5 * np.eye(x.size)
    )
    degree: Optional[float] = None  # homogeneity degree of H, used for sampling

    def __post_init__(self):
        if self.ambient_dim % 2:
            raise ValueError("symplectic ambient dimension must be even")
        if self.one_form is None:
            object.__setattr__(self, "one_form", standard_one_form(self.ambient_dim))

    def manifold(self, tolerances=None):
        kwargs = {} if tolerances is None else {"tolerances": tolerances}
        return EmbeddedContactManifold(
            self.ambient_dim,
            [self.hamiltonian.shifted(self.energy, name="H-h")],
            self.one_form,
            name=f"{self.name}(h={self.energy:g})",
            **kwargs,
        )

    def liouville_derivative(self):
        """``E(H)`` as a scalar field; gradient uses the Hessian of H."""
        H, E, JE = self.hamiltonian, self.liouville, self.liouville_jacobian

        def value(x):
            return float(E(x) @ H.grad(x))

        def grad(x):
            return JE(x).T @ H.grad(x) + H.hess(x) @ E(x)

        return ScalarField("E(H)", value, grad)

    def fields(self):
        out = {"H": self.hamiltonian}
        for f in self.integrals:
            out.setdefault(f.name, f)
        return out

    def sample(self, rng, count):
        M = self.manifold()
        pts = []
        while len(pts) < count:
            u = rng.standard_normal(self.ambient_dim)
            Hu = self.hamiltonian(u)
            if Hu <= 0:
                continue
            if self.degree:
                u = u * (self.energy / Hu) ** (1.0 / self.degree)
            pts.append(project_to_manifold(M, u))
        return np.array(pts)


def _half_square_sum_derivatives(mask):
    # H_k equals ½ (Σ_{i≤k} (q_i² + p_i²))²; gradient and Hessian use that form
    def S(x):
        return float(np.sum(mask * x * x))

    def grad(x):
        return 2.0 * S(x) * mask * x

    def hess(x):
        v = 2.0 * mask * x
        return np.outer(v, v) + 2.0 * S(x) * np.diag(mask)

    return grad, hess


def oscillator_model(weights, h):
    """``H_0 = Σ (q_i² + p_i²)/(2 a_i)`` on ``H_0 = h``, integrals ``F_i = q_i² + p_i²``."""
    a = np.asarray(weights, dtype=float)
    if a.ndim != 1 or a.size < 2 or np.any(a <= 0):
        raise ValueError("weights must be positive, at least two")
    if not h > 0:
        raise ValueError("energy h must be positive")
    n1 = a.size
    D = 2 * n1
    c = np.concatenate([1.0 / a, 1.0 / a])

    H = ScalarField(
        "H",
        lambda x: float(0.5 * np.sum(c * x * x)),
        lambda x: c * x,
        lambda x: np.diag(c),
    )
    integrals = [H]
    for i in range(n1):
        mask = np.zeros(D)
        mask[i] = mask[n1 + i] = 1.0
        integrals.append(
            ScalarField(
                f"F{i}",
                lambda x, m=mask: float(np.sum(m * x * x)),
                lambda x, m=mask: 2.0 * m * x,
                lambda x, m=mask: 2.0 * np.diag(m),
            )
        )
    return IsoenergeticModel("oscillator", D, H, float(h), integrals, degree=2.0)


def gelfand_cetlin_integrals(n):
    """``H_k = ½ Σ_{i≤k} (q_i²+p_i²)² + Σ_{i<j≤k} (q_i q_j + p_i p_j)² + (q_j p_i - p_j q_i)²``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    n1 = n + 1
    D = 2 * n1
    out = []
    for k in range(n1):
        mask = np.zeros(D)
        mask[: k + 1] = 1.0
        mask[n1 : n1 + k + 1] = 1.0

        def value(x, k=k):
            q, p = x[:n1], x[n1:]
            r = q * q + p * p
            total = 0.5 * np.sum(r[: k + 1] ** 2)
            for i in range(k + 1):
                for j in range(i + 1, k + 1):
                    total += (q[i] * q[j] + p[i] * p[j]) ** 2
                    total += (q[j] * p[i] - p[j] * q[i]) ** 2
            return float(total)

        grad, hess = _half_square_sum_derivatives(mask)
        out.append(ScalarField(f"H{k}", value, grad, hess))
    return out


def gelfand_cetlin_model(n, h, lambdas=None):
    Hk = gelfand_cetlin_integrals(n)
    if lambdas is None:
        lambdas = np.ones(n + 1)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape != (n + 1,):
        raise ValueError(f"need n+1={n + 1} coefficients")
    if not h > 0:
        raise ValueError("energy h must be positive")
    H = linear_combination(list(zip(lambdas, Hk)), "H")
    return IsoenergeticModel(
        "gelfand_cetlin", 2 * (n + 1), H, float(h), [H] + Hk, degree=4.0
    )


def alpha_of_hamiltonian_field(model, x):
    XH = hamiltonian_vector_field(x, model.hamiltonian)
    return float(model.one_form(x) @ XH), XH


def hypersurface_reeb(model, x, rank_tol=1e-10):
    """``Z = X_H / α(X_H)`` on the energy level."""
    a, XH = alpha_of_hamiltonian_field(model, x)
    if abs(a) < rank_tol:
        raise NotContactType(f"α(X_H) = {a:.3e}")
    return XH / a


def maupertuis_fields(model, tol=1e-12):
    """``(H - h)/E(H)`` and ``E(H)/(4h - 4H + 2E(H))``."""
    H, h = model.hamiltonian, model.energy
    EH = model.liouville_derivative()

    def checked(v, what):
        if abs(v) < tol:
            raise DenominatorVanishes(f"{what} = {v:.3e}")
        return v

    def h0_value(x):
        return (H(x) - h) / checked(EH(x), "E(H)")

    def h0_grad(x):
        e = checked(EH(x), "E(H)")
        return H.grad(x) / e - (H(x) - h) * EH.grad(x) / e**2

    def mj_den(x):
        return checked(4 * h - 4 * H(x) + 2 * EH(x), "4h - 4H + 2E(H)")

    def mj_value(x):
        return EH(x) / mj_den(x)

    def mj_grad(x):
        d = mj_den(x)
        dd = -4 * H.grad(x) + 2 * EH.grad(x)
        return EH.grad(x) / d - EH(x) * dd / d**2

    return {
        "H0_transform": ScalarField("H0_transform", h0_value, h0_grad),
        "H_MJ": ScalarField("H_MJ", mj_value, mj_grad),
    }


def isoenergetic_Yk(model, x, k, rank_tol=1e-10):
    """Contact field of the k-th integral restricted to the level (1-based, F_1 = H).

    ``Y_1 = Z``; for ``k ≥ 2``
    ``Y_k = (F_k - α(X_{F_k}))/α(X_H) X_H + X_{F_k}``.
    """
    if k < 1 or k > len(model.integrals):
        raise IndexError(f"k must be in 1..{len(model.integrals)}")
    a, XH = alpha_of_hamiltonian_field(model, x)
    if abs(a) < rank_tol:
        raise NotContactType(f"α(X_H) = {a:.3e}")
    if k == 1:
        return XH / a
    F = model.integrals[k - 1]
    XF = hamiltonian_vector_field(x, F)
    return (F(x) - model.one_form(x) @ XF) / a * XH + XF


def sphere_to_oscillator(weights, x):
    """``p_i = √(a_i/2) x_i``, ``q_i = √(a_i/2) y_i``: maps S^{2n+1} to ``E_{1/4}``.

    Returns the oscillator point and the (constant) Jacobian of the map.
    """
    a = np.asarray(weights, dtype=float)
    n1 = a.size
    s = np.sqrt(a / 2.0)
    L = np.zeros((2 * n1, 2 * n1))
    for i in range(n1):
        L[i, 2 * i + 1] = s[i]  # q_i from y_i
        L[n1 + i, 2 * i] = s[i]  # p_i from x_i
    return L @ np.asarray(x, dtype=float), L
