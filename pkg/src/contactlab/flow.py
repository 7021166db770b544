"""Trajectories and diagnostics.

Integration is classical fixed-step RK4 followed by a Gauss-Newton
projection back onto the constraint set after every step. Vector fields are
evaluated at off-manifold stage points through the level-set extension
(the tangent space of the constraint level through the stage point), so the
on-manifold precondition is only enforced at the initial point.
"""
import csv
import io
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import ChartDegenerate, DimensionMismatch, OffManifold
from .fields import ScalarField
from .geometry import (
    canonical_poisson,
    contact_hamiltonian_field,
    hamiltonian_vector_field,
    jacobi_bracket,
    point_frame,
    project_to_manifold,
    reeb_vector,
    tangent_basis,
)
from .models.complexcoords import to_complex
from .reduction import (
    ConstraintSet,
    check_admissible,
    constrained_field,
    restricted_bracket,
    submanifold,
)

FIELD_KINDS = ("reeb", "contact_hamiltonian", "constrained", "symplectic_hamiltonian")
BRACKET_KINDS = ("jacobi", "restricted", "canonical_poisson")


@dataclass(frozen=True)
class FlowSpec:
    kind: str
    dt: float
    t_end: float
    function: Optional[ScalarField] = None
    constraints: Optional[ConstraintSet] = None
    monitors: Sequence[ScalarField] = ()
    projection_every_step: bool = True

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}; expected one of {FIELD_KINDS}")
        if not (self.dt > 0 and self.t_end > 0):
            raise ValueError("dt and t_end must be positive")
        if self.dt > self.t_end:
            raise ValueError(f"dt={self.dt} exceeds t_end={self.t_end}")
        if self.kind != "reeb" and self.function is None:
            raise ValueError(f"{self.kind} flow needs a function")
        if self.kind == "constrained" and self.constraints is None:
            raise ValueError("constrained flow needs a constraint set")
        object.__setattr__(self, "monitors", tuple(self.monitors))


@dataclass
class Trajectory:
    times: np.ndarray
    points: np.ndarray
    monitor_values: Dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self):
        return len(self.times)


def _vector_field(M, spec):
    f = spec.function
    if spec.kind == "reeb":
        return lambda x: reeb_vector(M, x, check=False)
    if spec.kind == "contact_hamiltonian":
        return lambda x: contact_hamiltonian_field(M, x, f, check=False)
    if spec.kind == "constrained":
        G = spec.constraints

        def field_(x):
            data = check_admissible(M, G, x, check=False)
            return constrained_field(M, G, x, f, data=data, strict=False)

        return field_
    return lambda x: hamiltonian_vector_field(x, f)


def _target_manifold(M, spec):
    if M is None:
        return None
    if spec.kind == "constrained":
        return submanifold(M, spec.constraints)
    return M


def rk4_step(field_, x, h):
    k1 = field_(x)
    k2 = field_(x + 0.5 * h * k1)
    k3 = field_(x + 0.5 * h * k2)
    k4 = field_(x + h * k3)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(M, spec, x0):
    """Integrate the selected field from ``x0``.

    ``M`` may be ``None`` only for symplectic Hamiltonian flows in flat space.
    """
    x = np.asarray(x0, dtype=float).copy()
    if M is None and spec.kind != "symplectic_hamiltonian":
        raise ValueError(f"{spec.kind} flow needs a contact manifold")
    target = _target_manifold(M, spec)
    if target is not None:
        if x.shape != (target.ambient_dim,):
            raise DimensionMismatch("initial point has the wrong dimension")
        if not target.contains(x):
            raise OffManifold(f"initial point is not on {target.name}")
    if spec.kind == "constrained":
        point_frame(M, x)
        data = check_admissible(M, spec.constraints, x)
        constrained_field(M, spec.constraints, x, spec.function, data=data)
    project = target is not None and bool(target.constraints) and spec.projection_every_step

    field_ = _vector_field(M, spec)
    n_full = int(np.floor(spec.t_end / spec.dt + 1e-9))
    steps = [spec.dt] * n_full
    rest = spec.t_end - n_full * spec.dt
    if rest > 1e-12 * spec.t_end:
        steps.append(rest)

    times = np.empty(len(steps) + 1)
    points = np.empty((len(steps) + 1, x.size))
    times[0], points[0] = 0.0, x
    t = 0.0
    for i, h in enumerate(steps, start=1):
        x = rk4_step(field_, x, h)
        if project:
            x = project_to_manifold(target, x)
        t += h
        times[i], points[i] = t, x
    times[-1] = spec.t_end
    monitors = {m.name: np.array([m(p) for p in points]) for m in spec.monitors}
    return Trajectory(times, points, monitors)


def conservation_drift(traj, fields):
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    out = {}
    for f in fields:
        vals = np.array([f(p) for p in traj.points])
        out[f.name] = float(np.max(np.abs(vals - vals[0])))
    return out


def constraint_violation(traj, M):
    return float(max(np.max(np.abs(M.constraint_values(p))) for p in traj.points))


def bracket_residual_matrix(
    M, points, fields, bracket_kind="jacobi", constraints=None, restricted=restricted_bracket
):
    """``R[i, j] = max over points of |bracket(f_i, f_j)|``; diagonal is zero.

    ``restricted`` computes the constrained bracket and can be swapped for testing.
    """
    if bracket_kind not in BRACKET_KINDS:
        raise ValueError(f"unknown bracket kind {bracket_kind!r}")
    fields = list(fields)
    k = len(fields)
    R = np.zeros((k, k))
    for x in np.atleast_2d(points):
        if bracket_kind == "jacobi":
            frame = point_frame(M, x)

            def br(f, g):
                return jacobi_bracket(M, x, f, g, frame=frame)

        elif bracket_kind == "restricted":
            data = check_admissible(M, constraints, x)

            def br(f, g):
                return restricted(M, constraints, x, f, g, data=data)

        else:

            def br(f, g):
                return canonical_poisson(x, f, g)

        for i in range(k):
            for j in range(k):
                if i != j:
                    R[i, j] = max(R[i, j], abs(br(fields[i], fields[j])))
    return np.maximum(R, R.T)


def independence_rank(M, x, fields, restrict=True, rank_tol=None):
    """Numerical rank of the differentials, optionally restricted to ``T_x M``.

    Threshold is ``rank_tol * σ_max * row_count``.
    """
    x = np.asarray(x, dtype=float)
    rows = np.array([f.grad(x) for f in fields])
    if M is not None:
        rank_tol = M.tolerances.rank_tol if rank_tol is None else rank_tol
        if not M.contains(x):
            raise OffManifold(f"point is not on {M.name}")
        if restrict:
            rows = rows @ tangent_basis(M, x).T
    elif rank_tol is None:
        rank_tol = 1e-10
    s = np.linalg.svd(rows, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, s
    threshold = rank_tol * s[0] * rows.shape[0]
    return int(np.sum(s > threshold)), s


@dataclass(frozen=True)
class FrequencyEstimate:
    omega: float
    residual: float
    phase0: float


def polar_angle(j):
    return lambda x: float(np.arctan2(x[2 * j + 1], x[2 * j]))


def unwrap_angles(raw, guard=np.pi / 2):
    """Nearest-branch continuation; refuses steps of size ``guard`` or more."""
    raw = np.asarray(raw, dtype=float)
    d = np.diff(raw)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    if d.size and np.max(np.abs(d)) >= guard:
        raise ChartDegenerate(
            f"angle step {np.max(np.abs(d)):.3f} rad exceeds the unwrap guard; reduce dt"
        )
    return np.concatenate([[raw[0]], raw[0] + np.cumsum(d)])


def frequency_estimate(traj, angle_extractors=None, chart_floor=0.05):
    """Least-squares slope of each unwrapped angle against time.

    By default the angles are the polar angles of every complex coordinate.
    ``residual`` is the RMS deviation of the linear fit.
    """
    P = traj.points
    if angle_extractors is None:
        moduli = np.abs(np.array([to_complex(p) for p in P]))
        if np.min(moduli) < chart_floor:
            raise ChartDegenerate(
                f"min |z_j| = {np.min(moduli):.3e} below chart floor {chart_floor}"
            )
        angle_extractors = [polar_angle(j) for j in range(P.shape[1] // 2)]
    t = np.asarray(traj.times, dtype=float)
    A = np.column_stack([np.ones_like(t), t])
    out = []
    for extract in angle_extractors:
        phi = unwrap_angles([extract(p) for p in P])
        coef, *_ = np.linalg.lstsq(A, phi, rcond=None)
        resid = phi - A @ coef
        out.append(
            FrequencyEstimate(
                float(coef[1]), float(np.sqrt(np.mean(resid**2))), float(coef[0])
            )
        )
    return out


def max_unwrap_dt(frequencies):
    """Largest step keeping per-step angle increments below π/4."""
    return float(np.pi / (4.0 * np.max(np.abs(frequencies))))


@dataclass
class DiagnosticsReport:
    function_names: List[str] = field(default_factory=list)
    bracket_residuals: Optional[np.ndarray] = None
    independence_rank: Optional[int] = None
    singular_values: Optional[np.ndarray] = None
    conservation_drift: Dict[str, float] = field(default_factory=dict)
    frequencies: List[FrequencyEstimate] = field(default_factory=list)

    def __post_init__(self):
        if self.bracket_residuals is not None:
            k = len(self.function_names)
            if np.shape(self.bracket_residuals) != (k, k):
                raise ValueError("bracket matrix does not match the function list")

    def to_dict(self):
        out = {"functions": list(self.function_names)}
        if self.bracket_residuals is not None:
            out["bracket_residuals"] = np.asarray(self.bracket_residuals).tolist()
        if self.independence_rank is not None:
            out["independence_rank"] = int(self.independence_rank)
            out["singular_values"] = np.asarray(self.singular_values).tolist()
        if self.conservation_drift:
            out["conservation_drift"] = dict(self.conservation_drift)
        if self.frequencies:
            out["frequencies"] = [
                {"omega": e.omega, "fit_residual": e.residual} for e in self.frequencies
            ]
        return out


def atomic_write_text(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv(traj):
    """CSV text: ``t, x0..x{D-1}``, then monitors in declaration order.

    Floats use Python's shortest round-trip ``repr``.
    """
    D = traj.points.shape[1]
    names = list(traj.monitor_values)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i}" for i in range(D)] + names)
    for i, t in enumerate(traj.times):
        row = [repr(float(t))] + [repr(float(v)) for v in traj.points[i]]
        row += [repr(float(traj.monitor_values[n][i])) for n in names]
        w.writerow(row)
    return buf.getvalue()


def write_trajectory_csv(traj, path):
    atomic_write_text(path, trajectory_csv(traj))


def read_trajectory_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    D = sum(1 for h in header if h.startswith("x") and h[1:].isdigit())
    monitors = {name: body[:, 1 + D + i] for i, name in enumerate(header[1 + D :])}
    return Trajectory(body[:, 0], body[:, 1 : 1 + D], monitors)
