"""Closed-form identity checks bundled as a reproducible verification suite.

Each check takes a numpy ``Generator`` and returns a :class:`CheckResult`.
Checks that exercise the constrained bracket accept a ``restricted``
callable with the signature of :func:`reduction.restricted_bracket` so a
deliberately broken implementation can be swapped in.
"""
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .fields import coordinate
from .flow import (
    FlowSpec,
    conservation_drift,
    constraint_violation,
    frequency_estimate,
    independence_rank,
    integrate,
)
from .geometry import (
    canonical_poisson,
    contact_hamiltonian_field,
    hamiltonian_vector_field,
    jacobi_bracket,
    point_frame,
)
from .models.brieskorn import (
    BrieskornModel,
    UstilovskyModel,
    brieskorn_bracket_closed_form,
    brieskorn_mu,
)
from .models.complexcoords import from_complex, to_complex
from .models.hess_appelrot import P_PHI, HessAppelrotModel
from .models.isoenergetic import (
    gelfand_cetlin_model,
    hypersurface_reeb,
    isoenergetic_Yk,
    maupertuis_fields,
    oscillator_model,
)
from .models.sphere import WeightedSphereModel, sphere_integrals, sphere_reeb_closed_form
from .reduction import (
    check_admissible,
    constrained_field,
    dirac_multipliers,
    intrinsic_restricted_bracket,
    restricted_bracket,
    submanifold,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    anchor: str
    metrics: dict = field(default_factory=dict)

    def line(self):
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {shown}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


BRIESKORN_CASES = ((2, 2, 2), (3, 2, 2, 2))
OMEGA = np.exp(2j * np.pi / 3)


def pinned_brieskorn_point():
    """``z = (1, ω, ω²)/√3`` on the a=(2,2,2) Brieskorn manifold."""
    return from_complex(np.array([1.0, OMEGA, OMEGA**2]) / np.sqrt(3.0))


def fd5_gradient(f, x, h=1e-3):
    """Fourth-order central differences; independent of any analytic gradient."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h)
    return g


def fd_poisson(x, F, G, h=1e-3):
    n = x.size // 2
    dF, dG = fd5_gradient(F, x, h), fd5_gradient(G, x, h)
    return float(dF[:n] @ dG[n:] - dF[n:] @ dG[:n])


def check_reeb_closed_form(rng, points=100):
    worst = 0.0
    for weights in ((1.0, 1.0), (1.0, 2.0), (2.0, 3.0, 5.0)):
        model = WeightedSphereModel(weights)
        M = model.manifold()
        for x in model.sample(rng, points):
            numeric = point_frame(M, x).reeb
            worst = max(worst, np.max(np.abs(numeric - sphere_reeb_closed_form(model, x))))
    return CheckResult(
        "reeb_closed_form",
        worst < 1e-9,
        "Reeb field of the weighted sphere, Z = 4i Σ (1/a_j)(z_j ∂/∂z_j − z̄_j ∂/∂z̄_j)",
        {"max_error": worst, "tolerance": 1e-9},
    )


def check_sphere_commutation(rng, points=100):
    worst = 0.0
    for weights in ((1.0, 1.0, 1.0), (1.0, 2.0), (2.0, 3.0, 5.0)):
        model = WeightedSphereModel(weights)
        M = model.manifold()
        fs = model.fields()
        funcs = [fs["one"]] + sphere_integrals(model)
        for x in model.sample(rng, points):
            frame = point_frame(M, x)
            for f, g in combinations(funcs, 2):
                worst = max(worst, abs(jacobi_bracket(M, x, f, g, frame=frame)))
    return CheckResult(
        "sphere_commutation",
        worst < 1e-9,
        "weighted sphere is completely contact integrable: [1, f_j] = [f_j, f_k] = 0",
        {"max_bracket": worst, "tolerance": 1e-9},
    )


def check_brieskorn_dirac(rng, points=50, restricted=restricted_bracket):
    worst_rel = 0.0
    for exps in BRIESKORN_CASES:
        model = BrieskornModel(exps)
        M, G = model.manifold(), model.constraint_set()
        fs = sphere_integrals(model.sphere)
        for x in model.sample(rng, points):
            data = check_admissible(M, G, x)
            for j, k in combinations(range(len(exps)), 2):
                num = restricted(M, G, x, fs[j], fs[k], data=data)
                ref = brieskorn_bracket_closed_form(model, x, j, k)
                worst_rel = max(worst_rel, abs(num - ref) / max(abs(ref), 1e-12))
    model = BrieskornModel((2, 2, 2))
    x = pinned_brieskorn_point()
    fs = sphere_integrals(model.sphere)
    spot = restricted(model.manifold(), model.constraint_set(), x, fs[0], fs[1])
    spot_err = abs(spot - 2 * np.sqrt(3) / 9)
    return CheckResult(
        "brieskorn_dirac_pipeline",
        worst_rel < 1e-8 and spot_err < 1e-10,
        "restricted bracket on (B, α): [f_j, f_k]_B = (8i/μ)(z̄_j^{a_j} z_k^{a_k} − z_j^{a_j} z̄_k^{a_k})",
        {"max_rel_error": worst_rel, "spot_value": spot, "spot_error": spot_err},
    )


def check_gram_mu(rng, points=50):
    worst = 0.0
    for exps in BRIESKORN_CASES:
        model = BrieskornModel(exps)
        M, G = model.manifold(), model.constraint_set()
        for x in model.sample(rng, points):
            C = check_admissible(M, G, x).gram
            worst = max(worst, abs(C[0, 1] - brieskorn_mu(model, x)))
    return CheckResult(
        "gram_mu_identity",
        worst < 1e-8,
        "[G_1, G_2] = dG_2(V_1) = μ = 2 Σ a_j |z_j|^{2(a_j−1)} ≠ 0 on B",
        {"max_error": worst, "tolerance": 1e-8},
    )


def check_multiplier_law(rng, points=50):
    worst_lam = worst_tan = 0.0
    for exps in BRIESKORN_CASES:
        model = BrieskornModel(exps)
        M, G = model.manifold(), model.constraint_set()
        G1, G2 = G
        funcs = sphere_integrals(model.sphere) + [coordinate(0), coordinate(3)]
        for x in model.sample(rng, points):
            data = check_admissible(M, G, x)
            mu = brieskorn_mu(model, x)
            for f in funcs:
                lam = dirac_multipliers(M, G, x, f, data=data)
                Yf = contact_hamiltonian_field(M, x, f, frame=data.frame)
                ref = np.array([G2.grad(x) @ Yf / mu, -(G1.grad(x) @ Yf) / mu])
                worst_lam = max(worst_lam, np.max(np.abs(lam - ref)))
                W = constrained_field(M, G, x, f, data=data)
                worst_tan = max(worst_tan, abs(G1.grad(x) @ W), abs(G2.grad(x) @ W))
    return CheckResult(
        "multiplier_law",
        worst_lam < 1e-9 and worst_tan < 1e-9,
        "λ_1 = dG_2(Y_f)/μ, λ_2 = −dG_1(Y_f)/μ and dG_j(Y*_f) = 0",
        {"max_multiplier_error": worst_lam, "max_tangency_defect": worst_tan},
    )


def check_frequencies(rng, t_end=50.0, dt=1e-3):
    worst = 0.0
    estimates = {}
    for weights in ((1.0, 2.0), (1.0, 1.0, 1.0)):
        model = WeightedSphereModel(weights)
        M = model.manifold()
        x0 = model.sample(rng, 1, min_modulus=0.2)[0]
        traj = integrate(M, FlowSpec("reeb", dt, t_end), x0)
        omega = np.array([e.omega for e in frequency_estimate(traj)])
        estimates[str(weights)] = omega.round(8).tolist()
        worst = max(worst, np.max(np.abs(omega - model.frequencies)))
    return CheckResult(
        "torus_frequencies",
        worst < 1e-4,
        "quasi-periodic winding on invariant tori with ω_j = 4/a_j",
        {"max_error": worst, **{f"omega{k}": v for k, v in estimates.items()}},
    )


def ustilovsky_flow_run(rng, t_end=10.0, dt=1e-2, p=7, epsilons=(0.3,)):
    um = UstilovskyModel(p, len(epsilons), tuple(epsilons))
    B = um.brieskorn
    M, G = B.manifold(), B.constraint_set()
    fs = um.fields()
    x0 = B.sample(rng, 1)[0]
    monitors = [fs["g1"], fs["h1"], fs["f0"], fs["f1"]]
    spec = FlowSpec("constrained", dt, t_end, function=fs["H"], constraints=G, monitors=monitors)
    traj = integrate(M, spec, x0)
    return traj, monitors, submanifold(M, G)


def check_conservation(rng):
    model = WeightedSphereModel((1.0, 2.0, 3.0))
    M = model.manifold()
    x0 = model.sample(rng, 1, min_modulus=0.1)[0]
    traj = integrate(M, FlowSpec("reeb", 1e-3, 20.0), x0)
    sphere_drift = max(conservation_drift(traj, sphere_integrals(model)).values())
    traj_u, monitors, N = ustilovsky_flow_run(rng)
    u_drift = max(conservation_drift(traj_u, monitors).values())
    violation = constraint_violation(traj_u, N)
    return CheckResult(
        "conservation",
        sphere_drift < 1e-7 and u_drift < 1e-6 and violation < 1e-10,
        "f_j are Reeb integrals on the sphere; g_j, h_j, f_0, f_1 are integrals of Y*_H on B_p",
        {"sphere_drift": sphere_drift, "ustilovsky_drift": u_drift, "constraint_violation": violation},
    )


def check_ustilovsky(rng, points=50, restricted=restricted_bracket):
    um = UstilovskyModel(7, 1, (0.3,))
    B = um.brieskorn
    M, G = B.manifold(), B.constraint_set()
    fs = um.fields()
    pairs = [("g1", "g1"), ("f0", "g1"), ("f1", "g1"), ("h1", "g1")]
    worst = 0.0
    ranks = []
    maple = [fs[k] for k in ("G1", "G2", "F", "g1", "h1", "q1")]
    for x in B.sample(rng, points):
        data = check_admissible(M, G, x)
        for a, b in pairs:
            worst = max(worst, abs(restricted(M, G, x, fs[a], fs[b], data=data)))
        ranks.append(independence_rank(None, x, maple)[0])
    return CheckResult(
        "ustilovsky_commutation_rank",
        worst < 1e-8 and min(ranks) == 6 == max(ranks),
        "[g_i, g_j]_B = [f_0, g_j]_B = [f_1, g_j]_B = [h_i, g_j]_B = 0 and dG_1∧dG_2∧dF∧dg∧dh∧dq ≠ 0",
        {"max_bracket": worst, "min_rank": min(ranks), "max_rank": max(ranks)},
    )


def check_isoenergetic(rng, points=20):
    worst = dict(h0=0.0, mj=0.0, reeb=0.0, bracket=0.0, y1=0.0)
    for model in (oscillator_model((1.0, 2.0, 3.0), 0.25), gelfand_cetlin_model(2, 1.0)):
        M = model.manifold()
        mf = maupertuis_fields(model)
        for x in model.sample(rng, points):
            frame = point_frame(M, x)
            Z = hypersurface_reeb(model, x)
            worst["h0"] = max(worst["h0"], abs(mf["H0_transform"](x)))
            worst["mj"] = max(worst["mj"], abs(mf["H_MJ"](x) - 0.5))
            XMJ = hamiltonian_vector_field(x, mf["H_MJ"])
            worst["reeb"] = max(worst["reeb"], np.max(np.abs(XMJ - Z)))
            for f, g in combinations(model.integrals[1:], 2):
                worst["bracket"] = max(worst["bracket"], abs(jacobi_bracket(M, x, f, g, frame=frame)))
            Y1 = isoenergetic_Yk(model, x, 1)
            worst["y1"] = max(worst["y1"], np.max(np.abs(Y1 - frame.reeb)))
    passed = (
        worst["h0"] < 1e-12
        and worst["mj"] < 1e-12
        and worst["reeb"] < 1e-7
        and worst["bracket"] < 1e-8
        and worst["y1"] < 1e-8
    )
    return CheckResult(
        "isoenergetic_machinery",
        passed,
        "H_0 = (H−h)/E(H) vanishes on M, H_MJ = E(H)/(4h−4H+2E(H)) equals ½ and X_{H_MJ}|_M = Z",
        {f"max_{k}_error": v for k, v in worst.items()},
    )


def hess_appelrot_start(model, rng):
    """A point of Σ whose θ-motion stays inside the chart.

    With M3 = 0 the θ-dynamics feel ½ a p_ψ²/sin²θ + k cos θ, which walls off
    both poles when p_ψ ≠ 0.
    """
    x0 = np.zeros(6)
    x0[0], x0[2] = rng.uniform(0, 2 * np.pi, 2)
    x0[1] = np.pi / 2
    x0[4] = 0.1
    x0[5] = 2.0
    return x0


def check_hess_appelrot(rng, points=100, t_end=10.0, dt=1e-3):
    model = HessAppelrotModel()
    fs = model.fields()
    H, M2, M3, Mz = fs["H"], fs["M2"], fs["M3"], fs["Mz"]
    alpha = model.contact_form()
    # keep the finite-difference stencil (±2h in θ) inside the chart
    interior = replace(model, theta_margin=model.theta_margin + 0.01)
    pts = interior.sample(rng, points)
    sigma = interior.sample(rng, points, on_sigma=True)
    comm = max(abs(canonical_poisson(x, M3, Mz)) for x in pts)
    alpha_err = max(abs(alpha(x) @ hamiltonian_vector_field(x, M3) - 1.0) for x in sigma)
    oracle_err = closed_err = 0.0
    for x in pts:
        num = canonical_poisson(x, H, M3)
        oracle_err = max(oracle_err, abs(num - fd_poisson(x, H, M3)))
        # {q, p} = 1 convention: {H, M3} = ∂H/∂φ = +c M2 M3, and Ṁ3 = {M3, H} = −c M2 M3
        closed_err = max(
            closed_err,
            abs(num - model.c * M2(x) * M3(x)),
            abs(canonical_poisson(x, M3, H) + model.c * M2(x) * M3(x)),
        )
    x0 = hess_appelrot_start(model, rng)
    traj = integrate(None, FlowSpec("symplectic_hamiltonian", dt, t_end, function=H), x0)
    m3_max = float(np.max(np.abs(traj.points[:, P_PHI])))
    passed = comm < 1e-10 and alpha_err < 1e-10 and oracle_err < 1e-8 and closed_err < 1e-8 and m3_max < 1e-6
    return CheckResult(
        "hess_appelrot",
        passed,
        "{M_3, M_z} = 0, α(X_{M_3}) = 1 on Σ, Σ: M_3 = 0 is an invariant relation",
        {
            "max_M3_Mz": comm,
            "max_alpha_error": alpha_err,
            "max_fd_oracle_error": oracle_err,
            "max_closed_form_error": closed_err,
            "max_abs_M3_on_flow": m3_max,
        },
    )


def check_cross_validation(rng, points=50, restricted=restricted_bracket):
    worst = 0.0
    for exps in BRIESKORN_CASES:
        model = BrieskornModel(exps)
        M, G = model.manifold(), model.constraint_set()
        N = submanifold(M, G)
        fs = sphere_integrals(model.sphere)
        for x in model.sample(rng, points):
            data = check_admissible(M, G, x)
            for f, g in combinations(fs, 2):
                a = restricted(M, G, x, f, g, data=data)
                b = intrinsic_restricted_bracket(M, G, x, f, g, N=N)
                worst = max(worst, abs(a - b))
    return CheckResult(
        "dirac_vs_intrinsic",
        worst < 1e-7,
        "Y*_f = Y_f − Σ λ_i Y_{G_i} is the contact Hamiltonian field of f|N",
        {"max_discrepancy": worst, "tolerance": 1e-7},
    )


def hopf_rotation_error(model, x0, dt, t_end):
    traj = integrate(model.manifold(), FlowSpec("reeb", dt, t_end), x0)
    exact = from_complex(to_complex(x0) * np.exp(1j * model.frequencies * t_end))
    return float(np.linalg.norm(traj.points[-1] - exact))


def check_integrator_order(rng, dt=0.05, t_end=1.0):
    model = WeightedSphereModel((1.0, 2.0))
    x0 = model.sample(rng, 1, min_modulus=0.2)[0]
    e1 = hopf_rotation_error(model, x0, dt, t_end)
    e2 = hopf_rotation_error(model, x0, dt / 2, t_end)
    ratio = e1 / e2
    return CheckResult(
        "integrator_order",
        ratio >= 12.0,
        "Reeb flow of the weighted sphere is the rotation z_j(t) = z_j(0) e^{i 4t/a_j}",
        {"error_dt": e1, "error_dt_half": e2, "ratio": ratio},
    )


CHECKS = {
    "reeb_closed_form": check_reeb_closed_form,
    "sphere_commutation": check_sphere_commutation,
    "brieskorn_dirac_pipeline": check_brieskorn_dirac,
    "gram_mu_identity": check_gram_mu,
    "multiplier_law": check_multiplier_law,
    "torus_frequencies": check_frequencies,
    "conservation": check_conservation,
    "ustilovsky_commutation_rank": check_ustilovsky,
    "isoenergetic_machinery": check_isoenergetic,
    "hess_appelrot": check_hess_appelrot,
    "dirac_vs_intrinsic": check_cross_validation,
    "integrator_order": check_integrator_order,
}

# checks that route through the constrained bracket
USES_RESTRICTED = {"brieskorn_dirac_pipeline", "ustilovsky_commutation_rank", "dirac_vs_intrinsic"}


def run_check(name, rng, restricted=None):
    fn = CHECKS[name]
    if restricted is not None and name in USES_RESTRICTED:
        return fn(rng, restricted=restricted)
    return fn(rng)
