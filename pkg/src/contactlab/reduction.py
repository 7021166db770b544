"""Contact Dirac reduction to constraint submanifolds.

Given an even number of constraints ``G_1..G_2k`` on a contact manifold M,
``N = {G = 0}`` inherits a contact structure when the Gram matrix
``C[i, j] = [G_i, G_j]`` of Jacobi brackets is invertible on N. The
contact Hamiltonian field of ``f|N`` is ``Y_f - Σ λ_i Y_{G_i}``, with
multipliers fixed by ``Σ_i λ_i [G_i, G_j] = [f, G_j]``.

The restricted bracket is available two ways: the Dirac formula evaluated on
M (:func:`restricted_bracket`, :func:`general_restricted_bracket`) and the
plain Jacobi bracket of N treated as a manifold in its own right
(:func:`intrinsic_restricted_bracket`). They are independent computations.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import GramSingular, NotTangentReeb, OffManifold
from .fields import ScalarField
from .geometry import (
    PointFrame,
    contact_hamiltonian_field,
    jacobi_bracket,
    point_frame,
)


@dataclass(frozen=True)
class ConstraintSet:
    constraints: Tuple[ScalarField, ...]

    def __init__(self, constraints: Sequence[ScalarField]):
        constraints = tuple(constraints)
        if not constraints or len(constraints) % 2:
            raise ValueError(
                f"constraint sets need an even, nonzero count; got {len(constraints)}"
            )
        object.__setattr__(self, "constraints", constraints)

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __getitem__(self, i):
        return self.constraints[i]


@dataclass(frozen=True)
class DiracData:
    base: np.ndarray
    gram: np.ndarray
    gram_inverse: np.ndarray
    tangency_defects: np.ndarray
    tangent_reeb: bool
    frame: PointFrame
    constraint_fields: np.ndarray  # rows are Y_{G_i}


def submanifold(M, G):
    """N as an embedded contact manifold: constraints of M followed by G."""
    return M.with_constraints(G.constraints, name=f"{M.name}|N")


def check_admissible(M, G, x, check=True):
    x = np.asarray(x, dtype=float)
    tol = M.tolerances
    if check:
        gvals = np.array([g(x) for g in G])
        if np.max(np.abs(gvals)) >= tol.on_manifold_tol:
            raise OffManifold(f"constraint set violated by {np.max(np.abs(gvals)):.3e}")
    frame = point_frame(M, x, check=check)
    YG = np.array([contact_hamiltonian_field(M, x, g, frame=frame) for g in G])
    grads = np.array([g.grad(x) for g in G])
    values = np.array([g(x) for g in G])
    ZG = grads @ frame.reeb
    # C[i, j] = [G_i, G_j] = dG_j(Y_{G_i}) - G_j Z(G_i)
    C = YG @ grads.T - np.outer(ZG, values)
    det = np.linalg.det(C)
    if abs(det) <= tol.rank_tol:
        raise GramSingular(f"det of constraint Gram matrix is {det:.3e}")
    A = np.linalg.inv(C)
    defects = ZG  # [1, G_j] = Z(G_j)
    tangent = bool(np.max(np.abs(defects)) < tol.residual_tol)
    return DiracData(x, C, A, defects, tangent, frame, YG)


def _bracket_with_constraints(M, G, data, f):
    """``b_j = [f, G_j]`` for every constraint."""
    x = data.base
    Yf = contact_hamiltonian_field(M, x, f, frame=data.frame)
    Zf = f.grad(x) @ data.frame.reeb
    return np.array([g.grad(x) @ Yf - g(x) * Zf for g in G])


def dirac_multipliers(M, G, x, f, data=None):
    if data is None:
        data = check_admissible(M, G, x)
    b = _bracket_with_constraints(M, G, data, f)
    lam = np.linalg.solve(data.gram.T, b)
    return lam


def constrained_field(M, G, x, f, data=None, strict=True):
    """``Y*_f = Y_f - Σ λ_i(f) Y_{G_i}``, the contact field of ``f|N``.

    ``strict=False`` skips the Reeb tangency test; the integrator uses it at
    stage points slightly off N, where the test is meaningless.
    """
    if data is None:
        data = check_admissible(M, G, x)
    if strict and not data.tangent_reeb:
        raise NotTangentReeb(
            "Reeb field is not tangent to N; use general_restricted_bracket"
        )
    lam = dirac_multipliers(M, G, x, f, data=data)
    Yf = contact_hamiltonian_field(M, data.base, f, frame=data.frame)
    return Yf - lam @ data.constraint_fields


def dirac_correction(M, G, data, f, g):
    """``Σ_ij [G_i, g] A_ij [G_j, f]`` with ``A`` the inverse of ``([G_j, G_i])_ij``."""
    b_f = _bracket_with_constraints(M, G, data, f)  # [f, G_j]
    b_g = _bracket_with_constraints(M, G, data, g)  # [g, G_i]
    A = data.gram_inverse.T
    return float((-b_g) @ A @ (-b_f))


def restricted_bracket(M, G, x, f, g, data=None):
    """Jacobi bracket of ``f|N`` and ``g|N`` when the Reeb field is tangent to N."""
    if data is None:
        data = check_admissible(M, G, x)
    if not data.tangent_reeb:
        raise NotTangentReeb(
            "Reeb field is not tangent to N; use general_restricted_bracket"
        )
    base = jacobi_bracket(M, data.base, f, g, frame=data.frame)
    return base + dirac_correction(M, G, data, f, g)


def general_restricted_bracket(M, G, x, f, g, data=None, N=None, displayed=False):
    """Restricted bracket without assuming the Reeb field of M is tangent to N.

    ``W_f = Y_f - Σ λ_i Y_{G_i}`` is tangent to N with ``α(W_f) = f`` there,
    and its horizontal part inside TN is ``W_f - f Z*``. So ``Y*_f = W_f`` and

        ``[f,g]_N = [f,g] + g Z(f) - g Z*(f) - Σ λ_i(f) Y_{G_i}(g)``

    with ``Z*`` the Reeb field of N. ``displayed=True`` instead evaluates
    ``[f,g] + g Z(f) - f Z(g) + f Z*(g) - g Z*(f) - Σ λ_i(f) Y_{G_i}(g)``,
    which takes the horizontal part along Z rather than Z*. The two differ by
    ``f (Z* - Z)(g)`` and agree whenever Z is tangent to N.
    """
    if data is None:
        data = check_admissible(M, G, x)
    if N is None:
        N = submanifold(M, G)
    x = data.base
    z_star = point_frame(N, x, check=False).reeb
    Z = data.frame.reeb
    df, dg = f.grad(x), g.grad(x)
    fx, gx = f(x), g(x)
    lam = dirac_multipliers(M, G, x, f, data=data)
    bracket = jacobi_bracket(M, x, f, g, frame=data.frame)
    value = bracket + gx * (df @ Z) - gx * (df @ z_star) - lam @ (data.constraint_fields @ dg)
    if displayed:
        value += fx * (dg @ z_star) - fx * (dg @ Z)
    return float(value)


def intrinsic_restricted_bracket(M, G, x, f, g, N=None):
    """Jacobi bracket computed directly on N as an embedded contact manifold."""
    if N is None:
        N = submanifold(M, G)
    return jacobi_bracket(N, x, f, g)
