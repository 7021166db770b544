"""Point-wise differential geometry on embedded contact manifolds.

A manifold is the common zero set of a list of constraint fields in R^D,
carrying the restriction of an ambient one-form α. Everything is computed
from gradients at a single point: the tangent space is the null space of the
constraint Jacobian, the Reeb vector solves ``α(Z) = 1, dα(Z, ·) = 0`` on that
tangent space, and contact Hamiltonian fields are ``Y_f = f Z + α♯(df)``.

Vectors are plain 1-d arrays of length D. Bases are 2-d arrays whose rows
are the basis vectors.
"""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    DegenerateContact,
    DimensionMismatch,
    NoConvergence,
    NotTangent,
    OffManifold,
    RankDeficient,
)
from .fields import OneForm, ScalarField


@dataclass(frozen=True)
class EmbeddedContactManifold:
    ambient_dim: int
    constraints: Sequence[ScalarField]
    contact_form: OneForm
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES)
    name: str = "M"

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        if len(self.constraints) >= self.ambient_dim:
            raise ValueError("too many constraints for the ambient dimension")

    @property
    def dim(self):
        return self.ambient_dim - len(self.constraints)

    def with_constraints(self, extra, name=None):
        """Submanifold cut out by additional constraints, same contact form."""
        return EmbeddedContactManifold(
            self.ambient_dim,
            tuple(self.constraints) + tuple(extra),
            self.contact_form,
            self.tolerances,
            name or f"{self.name}|sub",
        )

    def with_tolerances(self, tolerances):
        return EmbeddedContactManifold(
            self.ambient_dim, self.constraints, self.contact_form, tolerances, self.name
        )

    def constraint_values(self, x):
        return np.array([c(x) for c in self.constraints], dtype=float)

    def constraint_jacobian(self, x):
        if not self.constraints:
            return np.zeros((0, self.ambient_dim))
        return np.array([c.grad(x) for c in self.constraints], dtype=float)

    def contains(self, x, tol=None):
        tol = self.tolerances.on_manifold_tol if tol is None else tol
        vals = self.constraint_values(x)
        return bool(np.all(np.abs(vals) < tol))


@dataclass(frozen=True)
class PointFrame:
    base: np.ndarray
    tangent_basis: np.ndarray
    reeb: np.ndarray
    horizontal_basis: np.ndarray
    omega_h: np.ndarray
    alpha: np.ndarray
    dalpha: np.ndarray
    reeb_residual: float = 0.0

    def alpha_of(self, v):
        return float(self.alpha @ v)

    def dalpha_of(self, u, v):
        return float(u @ self.dalpha @ v)


def _as_point(M, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (M.ambient_dim,):
        raise DimensionMismatch(
            f"point has shape {x.shape}, expected ({M.ambient_dim},)"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite coordinates")
    return x


def _require_on_manifold(M, x):
    vals = M.constraint_values(x)
    if vals.size and np.max(np.abs(vals)) >= M.tolerances.on_manifold_tol:
        raise OffManifold(
            f"max constraint violation {np.max(np.abs(vals)):.3e} on {M.name}"
        )


def _null_space_basis(J, D):
    """Deterministic orthonormal basis (rows) of ``ker J``.

    The orthogonal projector onto ``ker J`` is factored by column-pivoted QR,
    so coordinate directions are taken greedily by residual norm with ties
    broken by coordinate index.
    """
    c = J.shape[0]
    if c == 0:
        return np.eye(D)
    P = np.eye(D) - J.T @ np.linalg.solve(J @ J.T, J)
    Q, _, _ = scipy.linalg.qr(P, pivoting=True)
    basis = Q[:, : D - c]
    # one re-projection sweep removes roundoff leakage into the normal space
    basis = basis - J.T @ np.linalg.solve(J @ J.T, J @ basis)
    basis, _ = np.linalg.qr(basis)
    return basis.T


def tangent_basis(M, x, check=True):
    """Orthonormal basis of the tangent space of ``M`` at ``x`` (rows)."""
    x = _as_point(M, x)
    if check:
        _require_on_manifold(M, x)
    J = M.constraint_jacobian(x)
    if J.shape[0]:
        s = np.linalg.svd(J, compute_uv=False)
        if s[-1] <= M.tolerances.rank_tol:
            raise RankDeficient(f"constraint Jacobian singular value {s[-1]:.3e}")
    return _null_space_basis(J, M.ambient_dim)


def point_frame(M, x, check=True):
    x = _as_point(M, x)
    tol = M.tolerances
    T = tangent_basis(M, x, check=check).T  # D x dim
    a = M.contact_form(x)
    W = M.contact_form.d(x)

    # α(v) = 1 and dα(v, b_i) = 0 for every tangent basis vector, v = T c
    A = np.vstack([a @ T, -(T.T @ W @ T)])
    rhs = np.zeros(A.shape[0])
    rhs[0] = 1.0
    c, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    residual = float(np.linalg.norm(A @ c - rhs))
    if residual >= tol.residual_tol:
        raise DegenerateContact(f"Reeb residual {residual:.3e}")
    reeb = T @ c

    row = (a @ T)[None, :]
    if np.linalg.norm(row) <= tol.rank_tol:
        raise DegenerateContact("contact form vanishes on the tangent space")
    Hc = _null_space_basis(row, T.shape[1])  # rows in tangent coordinates
    H = (T @ Hc.T).T
    omega_h = H @ W @ H.T
    omega_h = 0.5 * (omega_h - omega_h.T)
    if omega_h.shape[0] and abs(np.linalg.det(omega_h)) <= tol.rank_tol:
        raise DegenerateContact("dα is degenerate on the horizontal space")
    return PointFrame(x, T.T, reeb, H, omega_h, a, W, residual)


def reeb_vector(M, x, check=True):
    """Reeb vector via one bordered least-squares solve.

    Unknowns are the vector ``v`` and multipliers ``m``:
    ``Wᵀv = Jᵀm`` (dα(v, ·) vanishes on ker J), ``Jv = 0``, ``α(v) = 1``.
    Cheaper than :func:`point_frame`; used on hot integration paths.
    """
    x = _as_point(M, x)
    if check:
        _require_on_manifold(M, x)
    D = M.ambient_dim
    J = M.constraint_jacobian(x)
    c = J.shape[0]
    a = M.contact_form(x)
    W = M.contact_form.d(x)
    A = np.zeros((D + c + 1, D + c))
    A[:D, :D] = W.T
    A[:D, D:] = -J.T
    A[D : D + c, :D] = J
    A[D + c, :D] = a
    rhs = np.zeros(D + c + 1)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    residual = float(np.linalg.norm(A @ sol - rhs))
    if residual >= M.tolerances.residual_tol:
        raise DegenerateContact(f"Reeb residual {residual:.3e}")
    return sol[:D]


def decompose(frame, X, tol=DEFAULT_TOLERANCES.residual_tol):
    """Split a tangent vector into ``(α(X), X - α(X) Z)``."""
    X = np.asarray(X, dtype=float)
    T = frame.tangent_basis
    leak = X - T.T @ (T @ X)
    if np.linalg.norm(leak) >= tol * max(1.0, np.linalg.norm(X)):
        raise NotTangent(f"normal component {np.linalg.norm(leak):.3e}")
    vertical = frame.alpha_of(X)
    return vertical, X - vertical * frame.reeb


def alpha_sharp(frame, eta):
    """Horizontal ``v`` with ``dα(v, h) = -η̂(h)`` for all horizontal ``h``."""
    eta = np.asarray(eta, dtype=float)
    eta_hat = eta - float(eta @ frame.reeb) * frame.alpha
    H = frame.horizontal_basis
    if H.shape[0] == 0:
        return np.zeros_like(eta)
    # dα(Hᵀc, h_k) = (Ω c)_k with Ω antisymmetric; Ωᵀc = -H η̂  <=>  Ω c = H η̂
    try:
        c = np.linalg.solve(frame.omega_h, H @ eta_hat)
    except np.linalg.LinAlgError as exc:
        raise DegenerateContact("omega_h is singular") from exc
    return H.T @ c


def contact_hamiltonian_field(M, x, f, frame=None, check=True):
    if frame is None:
        frame = point_frame(M, x, check=check)
    return f(frame.base) * frame.reeb + alpha_sharp(frame, f.grad(frame.base))


def jacobi_bracket(M, x, f, g, frame=None, check=True):
    """``[f, g] = Y_f(g) - g Z(f)``."""
    if frame is None:
        frame = point_frame(M, x, check=check)
    x = frame.base
    Yf = contact_hamiltonian_field(M, x, f, frame=frame)
    return float(g.grad(x) @ Yf - g(x) * (f.grad(x) @ frame.reeb))


def jacobi_bracket_dalpha(M, x, f, g, frame=None, check=True):
    """``[f, g] = dα(Y_f, Y_g) + f Z(g) - g Z(f)``."""
    if frame is None:
        frame = point_frame(M, x, check=check)
    x = frame.base
    Yf = contact_hamiltonian_field(M, x, f, frame=frame)
    Yg = contact_hamiltonian_field(M, x, g, frame=frame)
    Z = frame.reeb
    return float(
        frame.dalpha_of(Yf, Yg) + f(x) * (g.grad(x) @ Z) - g(x) * (f.grad(x) @ Z)
    )


def _split_qp(x, v):
    D = np.asarray(x).size
    if D % 2:
        raise DimensionMismatch(f"symplectic ambient needs even dimension, got {D}")
    n = D // 2
    return v[:n], v[n:]


def canonical_poisson(x, F, G):
    """``{F, G} = Σ ∂F/∂q ∂G/∂p - ∂F/∂p ∂G/∂q`` with ``x = (q, p)``."""
    x = np.asarray(x, dtype=float)
    Fq, Fp = _split_qp(x, F.grad(x))
    Gq, Gp = _split_qp(x, G.grad(x))
    return float(Fq @ Gp - Fp @ Gq)


def hamiltonian_vector_field(x, H):
    """``X_H`` for ``ω = dp∧dq``: ``q̇ = ∂H/∂p``, ``ṗ = -∂H/∂q``."""
    x = np.asarray(x, dtype=float)
    Hq, Hp = _split_qp(x, H.grad(x))
    return np.concatenate([Hp, -Hq])


def project_to_manifold(M, y, tol=None, max_iter=None):
    """Gauss-Newton (minimum-norm step) projection onto the constraint set."""
    x = _as_point(M, y).copy()
    tol = M.tolerances.projection_tol if tol is None else tol
    max_iter = M.tolerances.max_iter if max_iter is None else max_iter
    if not M.constraints:
        return x
    for _ in range(max_iter + 1):
        r = M.constraint_values(x)
        if np.max(np.abs(r)) < tol:
            return x
        J = M.constraint_jacobian(x)
        try:
            step = J.T @ np.linalg.solve(J @ J.T, r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular constraint Jacobian") from exc
        x = x - step
        if not np.all(np.isfinite(x)):
            break
    raise NoConvergence(
        f"projection onto {M.name} did not reach {tol:g} in {max_iter} iterations"
    )
