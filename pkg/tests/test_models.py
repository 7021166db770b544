import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactlab.errors import (
    ChartSingular,
    DenominatorVanishes,
    NotContactType,
    OffManifold,
)
from contactlab.flow import FlowSpec, independence_rank, integrate
from contactlab.geometry import (
    canonical_poisson,
    contact_hamiltonian_field,
    hamiltonian_vector_field,
    jacobi_bracket,
    point_frame,
)
from contactlab.models.brieskorn import (
    BrieskornModel,
    UstilovskyModel,
    brieskorn_bracket_closed_form,
    brieskorn_fjk,
    brieskorn_mu,
    brieskorn_V_fields,
    fjk_field,
)
from contactlab.models.complexcoords import (
    from_complex,
    gradient_from_dzbar,
    to_complex,
    vector_from_dz_coefficients,
)
from contactlab.models.hess_appelrot import P_PHI, THETA, HessAppelrotModel, hess_appelrot_fields
from contactlab.models.isoenergetic import (
    gelfand_cetlin_integrals,
    gelfand_cetlin_model,
    hypersurface_reeb,
    isoenergetic_Yk,
    maupertuis_fields,
    oscillator_model,
    sphere_to_oscillator,
)
from contactlab.models.sphere import (
    WeightedSphereModel,
    sphere_integrals,
    sphere_reeb_closed_form,
)
from contactlab.reduction import check_admissible, restricted_bracket
from contactlab.verification import hess_appelrot_start, pinned_brieskorn_point

S3 = np.sqrt(3.0)


def central_gradient(f, x, h=1e-4):
    """Five-point central differences, independent of the package helpers."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h)
    return g


def assert_gradient_matches(field, points):
    worst = 0.0
    for x in points:
        a, b = field.grad(x), central_gradient(field, x)
        worst = max(worst, np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))
    assert worst < 1e-6, f"{field.name}: relative gradient error {worst:.2e}"


# ---------------------------------------------------------------- coordinates


def test_complex_round_trip(rng):
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    x = from_complex(z)
    assert x[0] == z[0].real and x[1] == z[0].imag and x[7] == z[3].imag
    assert np.array_equal(to_complex(x), z)
    assert np.array_equal(vector_from_dz_coefficients(z), x)


def test_gradient_from_dzbar_against_finite_differences(rng):
    # φ = |z_0|^4 + Re(z_0 z̄_1^2): ∂φ/∂z̄_0 = 2|z_0|^2 z_0 + z_1^2/2, ∂φ/∂z̄_1 = z_0 z̄_1
    def phi(x):
        z = to_complex(x)
        return float(abs(z[0]) ** 4 + (z[0] * np.conj(z[1]) ** 2).real)

    for _ in range(10):
        x = rng.standard_normal(4)
        z = to_complex(x)
        dzbar = np.array([2 * abs(z[0]) ** 2 * z[0] + z[1] ** 2 / 2, z[0] * np.conj(z[1])])
        assert np.allclose(gradient_from_dzbar(dzbar), central_gradient(phi, x), atol=1e-8)


# --------------------------------------------------------------------- sphere


def test_sphere_validation():
    with pytest.raises(ValueError):
        WeightedSphereModel((1.0,))
    with pytest.raises(ValueError):
        WeightedSphereModel((1.0, -2.0))


@pytest.mark.parametrize(
    "weights, x, expected",
    [
        ((1, 2), [1, 0, 0, 0], [0, 4, 0, 0]),
        ((1, 1), [0, 1, 0, 0], [-4, 0, 0, 0]),
    ],
)
def test_sphere_reeb_examples(weights, x, expected):
    model = WeightedSphereModel(weights)
    Z = sphere_reeb_closed_form(model, np.array(x, dtype=float))
    assert np.allclose(Z, expected, atol=1e-15)


def test_sphere_reeb_off_sphere():
    with pytest.raises(OffManifold):
        sphere_reeb_closed_form(WeightedSphereModel((1, 1)), np.array([1.0, 1.0, 0, 0]))


def test_sphere_reeb_matches_frame(rng):
    model = WeightedSphereModel((1.0, 2.0, 3.0))
    M = model.manifold()
    alpha = model.contact_form()
    for x in model.sample(rng, 100):
        Z = sphere_reeb_closed_form(model, x)
        assert alpha(x) @ Z == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(Z, point_frame(M, x).reeb, atol=1e-9)


def test_sphere_form_matches_complex_expression(rng):
    # α = (i/8) Σ a_j (z_j dz̄_j - z̄_j dz_j) applied to a vector with complex components w
    model = WeightedSphereModel((1.0, 2.5, 4.0))
    a = np.array(model.weights)
    for _ in range(20):
        x = rng.standard_normal(6)
        v = rng.standard_normal(6)
        z, w = to_complex(x), to_complex(v)
        ref = (1j / 8) * np.sum(a * (z * np.conj(w) - np.conj(z) * w))
        assert abs(ref.imag) < 1e-14
        assert model.contact_form()(x) @ v == pytest.approx(ref.real, abs=1e-13)


def test_sphere_integrals_values(rng):
    model = WeightedSphereModel((1.0, 2.0))
    f0, f1 = sphere_integrals(model)
    x = np.array([1.0, 0, 0, 0])
    assert f0(x) == 1.0 and f1(x) == 0.0
    for y in model.sample(rng, 20):
        assert f0(y) + f1(y) == pytest.approx(1.0, abs=1e-14)


def test_sphere_integrals_independent_in_U(rng):
    model = WeightedSphereModel((1.0, 1.0, 1.0))
    M = model.manifold()
    fs = sphere_integrals(model)[1:]
    for x in model.sample(rng, 20, min_modulus=0.1):
        assert independence_rank(M, x, fs)[0] == 2
    assert independence_rank(M, np.array([1.0, 0, 0, 0, 0, 0]), fs)[0] < 2


def test_sphere_integrals_commute(rng):
    model = WeightedSphereModel((1.0, 2.0, 3.0))
    M = model.manifold()
    fs = sphere_integrals(model)
    for x in model.sample(rng, 30):
        for i in range(3):
            for j in range(3):
                assert abs(jacobi_bracket(M, x, fs[i], fs[j])) < 1e-9


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(0.2, 5.0), min_size=2, max_size=4),
    st.integers(0, 2**32 - 1),
)
def test_sphere_reeb_property(weights, seed):
    model = WeightedSphereModel(tuple(weights))
    x = model.sample(np.random.default_rng(seed), 1)[0]
    Z = sphere_reeb_closed_form(model, x)
    assert np.allclose(Z, point_frame(model.manifold(), x).reeb, atol=1e-9)


# ------------------------------------------------------------------ brieskorn


def test_brieskorn_exponent_validation():
    with pytest.raises(ValueError, match="exponents ≥ 1"):
        BrieskornModel((0, 2, 2))
    with pytest.raises(ValueError):
        BrieskornModel((2,))
    with pytest.raises(ValueError):
        BrieskornModel((2.5, 2, 2))


@pytest.fixture(scope="module")
def b222():
    model = BrieskornModel((2, 2, 2))
    return model, model.manifold(), model.constraint_set()


@pytest.fixture(scope="module")
def b3222():
    model = BrieskornModel((3, 2, 2, 2))
    return model, model.manifold(), model.constraint_set()


def test_pinned_point_values(b222):
    model, M, G = b222
    x = pinned_brieskorn_point()
    V1, V2 = brieskorn_V_fields(model, x)
    r = 1 / S3
    assert np.allclose(V1, [0, 2 * r, 1, -r, -1, -r], atol=1e-14)
    assert np.allclose(V2, [-2 * r, 0, r, 1, r, -1], atol=1e-14)
    assert brieskorn_mu(model, x) == pytest.approx(4.0, abs=1e-14)
    assert brieskorn_bracket_closed_form(model, x, 0, 1) == pytest.approx(2 * S3 / 9, abs=1e-14)
    assert brieskorn_fjk(model, x, 0, 1) == pytest.approx(S3 / 9, abs=1e-14)


@pytest.mark.parametrize("exps", [(2, 2, 2), (3, 2, 2, 2)])
def test_V_fields(exps, rng):
    model = BrieskornModel(exps)
    M = model.manifold()
    F = model.sphere.norm_squared()
    G1, G2 = model.constraint_fields()
    for x in model.sample(rng, 30):
        V1, V2 = brieskorn_V_fields(model, x)
        W = M.contact_form.d(x)
        assert abs(F.grad(x) @ V1) < 1e-10 and abs(F.grad(x) @ V2) < 1e-10
        # i_V dα as a covector is dα(V, ·)
        assert np.max(np.abs(W.T @ V1 + G1.grad(x))) < 1e-9
        assert np.max(np.abs(W.T @ V2 + G2.grad(x))) < 1e-9


def test_mu_is_gram_entry(b3222, rng):
    model, M, G = b3222
    for x in model.sample(rng, 30):
        mu = brieskorn_mu(model, x)
        assert mu > 0
        assert check_admissible(M, G, x).gram[0, 1] == pytest.approx(mu, abs=1e-8)


def test_mu_with_linear_exponent(rng):
    model = BrieskornModel((1, 2, 2))
    for x in model.sample(rng, 10):
        assert brieskorn_mu(model, x) >= 2.0


def test_mu_off_manifold(b222):
    with pytest.raises(OffManifold):
        brieskorn_mu(b222[0], np.array([1.0, 0, 0, 0, 0, 0]))


def test_closed_form_bracket_matches_dirac(b3222, rng):
    model, M, G = b3222
    fs = sphere_integrals(model.sphere)
    nonzero = 0.0
    for x in model.sample(rng, 50):
        data = check_admissible(M, G, x)
        for j in range(4):
            assert brieskorn_bracket_closed_form(model, x, j, j) == 0.0
            for k in range(4):
                if j == k:
                    continue
                cf = brieskorn_bracket_closed_form(model, x, j, k)
                assert restricted_bracket(M, G, x, fs[j], fs[k], data=data) == pytest.approx(cf, abs=1e-8)
                nonzero = max(nonzero, abs(cf))
    assert nonzero > 0.01


def test_fjk_identities(b3222, rng):
    model, M, G = b3222
    fs = sphere_integrals(model.sphere)
    for x in model.sample(rng, 20):
        mu = brieskorn_mu(model, x)
        for j in range(4):
            assert brieskorn_fjk(model, x, j, j) == 0.0
            for k in range(4):
                v = brieskorn_fjk(model, x, j, k)
                assert v == pytest.approx(-brieskorn_fjk(model, x, k, j), abs=1e-15)
                assert fjk_field(model, j, k)(x) == v
                if j != k:
                    br = restricted_bracket(M, G, x, fs[j], fs[k])
                    assert mu / 8 * br == pytest.approx(v, abs=1e-8)


def test_fjk_complex_reference(b3222, rng):
    model = b3222[0]
    a = np.array(model.exponents)
    for x in model.sample(rng, 10):
        u = to_complex(x) ** a
        ref = 1j * (np.conj(u[0]) * u[2] - u[0] * np.conj(u[2]))
        assert brieskorn_fjk(model, x, 0, 2) == pytest.approx(ref.real, abs=1e-14)


# ----------------------------------------------------------------- ustilovsky


def test_ustilovsky_validation():
    with pytest.raises(ValueError):
        UstilovskyModel(3, 1, (0.5,))
    with pytest.raises(ValueError):
        UstilovskyModel(7, 1, (1.0,))
    with pytest.raises(ValueError):
        UstilovskyModel(7, 2, (0.5,))
    with pytest.raises(ValueError):
        UstilovskyModel(7, 0, ())
    u = UstilovskyModel(9, 2, (0.2, 0.4))
    assert u.exponents == (9, 2, 2, 2, 2, 2) and u.n == 5


@pytest.fixture(scope="module")
def b7():
    u = UstilovskyModel(7, 1, (0.3,))
    B = u.brieskorn
    return u, B, B.manifold(), B.constraint_set()


def test_ustilovsky_H_formula(b7, rng):
    u, B, M, G = b7
    fs = u.fields()
    for x in rng.standard_normal((10, 8)):
        assert fs["H"](x) == pytest.approx(x @ x + 0.3 * fs["g1"](x), abs=1e-14)
        z = to_complex(x)
        assert fs["h1"](x) == pytest.approx(abs(z[2]) ** 2 + abs(z[3]) ** 2, abs=1e-14)
        q = 1j * (np.conj(z[1]) ** 2 * z[2] ** 2 - z[1] ** 2 * np.conj(z[2]) ** 2)
        q += 1j * (np.conj(z[1]) ** 2 * z[3] ** 2 - z[1] ** 2 * np.conj(z[3]) ** 2)
        assert fs["q1"](x) == pytest.approx(q.real, abs=1e-13)


def test_g_commute_on_sphere(rng):
    u = UstilovskyModel(7, 2, (0.3, 0.6))
    sphere = u.brieskorn.sphere
    M = sphere.manifold()
    fs = u.fields()
    for x in sphere.sample(rng, 30):
        assert abs(jacobi_bracket(M, x, fs["g1"], fs["g2"])) < 1e-8


def test_g_annihilates_V(b7, rng):
    u, B, M, G = b7
    g = u.fields()["g1"]
    for x in B.sample(rng, 30):
        V1, V2 = brieskorn_V_fields(B, x)
        assert abs(g.grad(x) @ V1) < 1e-10 and abs(g.grad(x) @ V2) < 1e-10


def test_ustilovsky_restricted_brackets(b7, rng):
    u, B, M, G = b7
    fs = u.fields()
    g = fs["g1"]
    for x in B.sample(rng, 30):
        data = check_admissible(M, G, x)
        for other in ("f0", "f1", "h1", "H"):
            assert abs(restricted_bracket(M, G, x, fs[other], g, data=data)) < 1e-8


def test_q_is_scaled_bracket(b7, rng):
    u, B, M, G = b7
    fs = u.fields()
    for x in B.sample(rng, 20):
        mu = brieskorn_mu(B, x)
        br = restricted_bracket(M, G, x, fs["f1"], fs["h1"])
        assert mu / 8 * br == pytest.approx(fs["q1"](x), abs=1e-9)


def test_ustilovsky_ambient_rank(b7, rng):
    u, B, M, G = b7
    fs = u.fields()
    names = ["G1", "G2", "F", "g1", "h1", "q1"]
    for x in B.sample(rng, 10):
        rank, s = independence_rank(None, x, [fs[n] for n in names])
        assert rank == 6 and len(s) == 6


# -------------------------------------------------------------- isoenergetic


def test_oscillator_validation():
    with pytest.raises(ValueError):
        oscillator_model((1.0,), 1.0)
    with pytest.raises(ValueError):
        oscillator_model((1.0, -1.0), 1.0)
    with pytest.raises(ValueError):
        oscillator_model((1.0, 1.0), 0.0)


@pytest.fixture(scope="module")
def osc():
    model = oscillator_model((1.0, 2.0, 3.0), 0.25)
    return model, model.manifold()


def test_oscillator_liouville_and_reeb(osc, rng):
    model, M = osc
    EH = model.liouville_derivative()
    for x in model.sample(rng, 30):
        assert EH(x) == pytest.approx(0.25, abs=1e-12)
        Z = hypersurface_reeb(model, x)
        assert np.allclose(Z, hamiltonian_vector_field(x, model.hamiltonian) / 0.25, atol=1e-10)
        assert np.allclose(Z, point_frame(M, x).reeb, atol=1e-8)
        assert model.one_form(x) @ Z == pytest.approx(1.0, abs=1e-12)


def test_liouville_field_is_dual_of_form(osc, rng):
    # i_E ω = α with ω = dp∧dq
    model, _ = osc
    n = 3
    for x in rng.standard_normal((5, 6)):
        E = model.liouville(x)
        v = rng.standard_normal(6)
        omega = E[n:] @ v[:n] - E[:n] @ v[n:]
        assert omega == pytest.approx(model.one_form(x) @ v, abs=1e-13)


def test_sphere_to_oscillator_pullback(rng):
    weights = (1.0, 2.0, 3.0)
    sphere = WeightedSphereModel(weights)
    osc = oscillator_model(weights, 0.25)
    for x in sphere.sample(rng, 20):
        y, L = sphere_to_oscillator(weights, x)
        assert osc.hamiltonian(y) == pytest.approx(0.25, abs=1e-14)
        assert np.allclose(L.T @ osc.one_form(y), sphere.contact_form()(x), atol=1e-10)


def test_not_contact_type():
    model = oscillator_model((1.0, 1.0), 1.0)
    with pytest.raises(NotContactType):
        hypersurface_reeb(model, np.zeros(4))
    with pytest.raises(NotContactType):
        isoenergetic_Yk(model, np.zeros(4), 2)


def test_gelfand_cetlin_shapes():
    with pytest.raises(ValueError):
        gelfand_cetlin_integrals(0)
    with pytest.raises(ValueError):
        gelfand_cetlin_model(2, 1.0, lambdas=[1.0, 1.0])
    assert [h.name for h in gelfand_cetlin_integrals(2)] == ["H0", "H1", "H2"]


def test_gelfand_cetlin_values(rng):
    Hs = gelfand_cetlin_integrals(2)
    for x in rng.standard_normal((20, 6)):
        q, p = x[:3], x[3:]
        r = q * q + p * p
        assert Hs[0](x) == pytest.approx(0.5 * r[0] ** 2, rel=1e-13)
        for k in range(3):
            assert Hs[k](x) == pytest.approx(0.5 * np.sum(r[: k + 1]) ** 2, rel=1e-12)


def test_gelfand_cetlin_commute(rng):
    Hs = gelfand_cetlin_integrals(2)
    for x in rng.standard_normal((50, 6)):
        for j in range(3):
            for k in range(3):
                assert abs(canonical_poisson(x, Hs[j], Hs[k])) < 1e-8


def test_gelfand_cetlin_level(rng):
    model = gelfand_cetlin_model(2, 1.0, lambdas=[1.0, 0.5, 2.0])
    M = model.manifold()
    EH = model.liouville_derivative()
    for x in model.sample(rng, 20):
        assert EH(x) == pytest.approx(2.0, abs=1e-10)
        Z = hypersurface_reeb(model, x)
        assert np.allclose(Z, hamiltonian_vector_field(x, model.hamiltonian) / 2.0, atol=1e-10)
        assert np.allclose(Z, point_frame(M, x).reeb, atol=1e-8)


@pytest.mark.parametrize("which", ["oscillator", "gelfand_cetlin"])
def test_maupertuis(which, rng):
    model = oscillator_model((1.0, 2.0), 0.5) if which == "oscillator" else gelfand_cetlin_model(1, 1.0)
    mf = maupertuis_fields(model)
    for x in model.sample(rng, 20):
        Z = hypersurface_reeb(model, x)
        assert abs(mf["H0_transform"](x)) < 1e-12
        assert mf["H_MJ"](x) == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(hamiltonian_vector_field(x, mf["H_MJ"]), Z, atol=1e-7)
        assert np.allclose(hamiltonian_vector_field(x, mf["H0_transform"]), Z, atol=1e-7)


def test_maupertuis_denominator():
    model = oscillator_model((1.0, 1.0), 1.0)
    mf = maupertuis_fields(model)
    with pytest.raises(DenominatorVanishes):
        mf["H0_transform"](np.zeros(4))
    # 4h - 4H + 2E(H) = 4 - 2H vanishes where H = 2
    x = np.array([2.0, 0, 0, 0])
    with pytest.raises(DenominatorVanishes):
        mf["H_MJ"](x)


def test_Yk(osc, rng):
    model, M = osc
    with pytest.raises(IndexError):
        isoenergetic_Yk(model, model.sample(rng, 1)[0], 0)
    Fs = model.integrals
    for x in model.sample(rng, 20):
        assert np.allclose(isoenergetic_Yk(model, x, 1), hypersurface_reeb(model, x), atol=1e-14)
        for k in range(2, len(Fs) + 1):
            Y = isoenergetic_Yk(model, x, k)
            assert abs(model.hamiltonian.grad(x) @ Y) < 1e-10
            for F in Fs:
                assert abs(F.grad(x) @ Y) < 1e-10
            assert model.one_form(x) @ Y == pytest.approx(Fs[k - 1](x), abs=1e-12)
            assert np.allclose(Y, contact_hamiltonian_field(M, x, Fs[k - 1]), atol=1e-9)
        for F in Fs:
            for K in Fs:
                assert abs(jacobi_bracket(M, x, F, K)) < 1e-8


# ------------------------------------------------------------- Hess-Appel'rot


@pytest.fixture(scope="module")
def ha():
    return HessAppelrotModel()


def test_ha_chart(ha):
    x = np.array([0.1, 0.05, 0.2, 0.0, 0.3, 1.0])
    with pytest.raises(ChartSingular):
        ha.M1()(x)
    with pytest.raises(ChartSingular):
        ha.hamiltonian()(x)
    with pytest.raises(ValueError):
        HessAppelrotModel(theta_margin=2.0)


def test_ha_field_set(ha):
    assert set(hess_appelrot_fields(ha)) == {"H", "M1", "M2", "M3", "Mz", "alpha"}


def test_ha_moments_closed_form(ha, rng):
    for x in ha.sample(rng, 20):
        phi, th, _, pphi, pth, ppsi = x
        M1 = np.sin(phi) / np.sin(th) * (ppsi - pphi * np.cos(th)) + pth * np.cos(phi)
        M2 = np.cos(phi) / np.sin(th) * (ppsi - pphi * np.cos(th)) - pth * np.sin(phi)
        assert ha.M1()(x) == pytest.approx(M1, abs=1e-13)
        assert ha.M2()(x) == pytest.approx(M2, abs=1e-13)
        H = 0.5 * (ha.a * M1**2 + ha.a * M2**2 + ha.b * pphi**2 + 2 * ha.c * M1 * pphi) + ha.k * np.cos(th)
        assert ha.hamiltonian()(x) == pytest.approx(H, abs=1e-12)


def test_ha_brackets(ha, rng):
    fs = ha.fields()
    H, M2, M3, Mz = fs["H"], fs["M2"], fs["M3"], fs["Mz"]
    for x in ha.sample(rng, 50):
        assert canonical_poisson(x, M3, Mz) == 0.0
        assert canonical_poisson(x, H, M3) == pytest.approx(ha.c * M2(x) * M3(x), abs=1e-10)
        # evolution of M3 along X_H
        assert M3.grad(x) @ hamiltonian_vector_field(x, H) == pytest.approx(
            -ha.c * M2(x) * M3(x), abs=1e-10
        )


def test_ha_alpha_of_X_M3(ha, rng):
    alpha = ha.contact_form()
    M3 = ha.M3()
    for x in ha.sample(rng, 30):
        assert alpha(x) @ hamiltonian_vector_field(x, M3) == pytest.approx(1.0 + x[P_PHI], abs=1e-14)
    for x in ha.sample(rng, 30, on_sigma=True):
        assert alpha(x) @ hamiltonian_vector_field(x, M3) == pytest.approx(1.0, abs=1e-14)


def test_ha_invariant_relation(ha, rng):
    H = ha.hamiltonian()
    x0 = hess_appelrot_start(ha, rng)
    traj = integrate(None, FlowSpec("symplectic_hamiltonian", 1e-2, 10.0, function=H), x0)
    assert np.max(np.abs(traj.points[:, P_PHI])) < 1e-6
    th = traj.points[:, THETA]
    assert np.all((th > ha.theta_margin) & (th < np.pi - ha.theta_margin))
    assert np.max(np.abs([H(p) - H(x0) for p in traj.points])) < 1e-6


# ------------------------------------------------------ gradients everywhere


def _catalog_cases(rng):
    sphere = WeightedSphereModel((1.0, 2.0, 3.0))
    yield "sphere", sphere.fields(), sphere.sample(rng, 100)
    b = BrieskornModel((3, 2, 2, 2))
    yield "brieskorn", b.fields(), b.sample(rng, 100)
    u = UstilovskyModel(7, 1, (0.3,))
    yield "ustilovsky", u.fields(), u.brieskorn.sample(rng, 100)
    osc = oscillator_model((1.0, 2.0, 3.0), 0.25)
    yield "oscillator", osc.fields(), rng.standard_normal((100, 6))
    gc = gelfand_cetlin_model(2, 1.0)
    fields = dict(gc.fields())
    fields.update(maupertuis_fields(gc))
    fields["E(H)"] = gc.liouville_derivative()
    yield "gelfand_cetlin", fields, gc.sample(rng, 100)
    ha = HessAppelrotModel()
    yield "hess_appelrot", ha.fields(), ha.sample(rng, 100)


def test_catalog_gradients_match_finite_differences():
    rng = np.random.default_rng(7)
    for model_name, fields, points in _catalog_cases(rng):
        for f in fields.values():
            if f.name == "one":
                continue
            assert_gradient_matches(f, points)


def test_catalog_hessians_match_finite_differences(rng):
    osc = oscillator_model((1.0, 2.0, 3.0), 1.0)
    for f in [osc.hamiltonian] + osc.integrals[1:] + gelfand_cetlin_integrals(2):
        for x in rng.standard_normal((10, 6)):
            H = np.array([central_gradient(lambda y, i=i: f.grad(y)[i], x) for i in range(6)])
            assert np.allclose(f.hess(x), H, atol=1e-6 * max(1.0, np.max(np.abs(H))))
