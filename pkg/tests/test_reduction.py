import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactlab.errors import GramSingular, NotTangentReeb, OffManifold
from contactlab.fields import ScalarField, coordinate
from contactlab.geometry import contact_hamiltonian_field, point_frame, project_to_manifold
from contactlab.models.brieskorn import BrieskornModel, brieskorn_mu
from contactlab.models.complexcoords import to_complex
from contactlab.models.sphere import WeightedSphereModel, sphere_integrals
from contactlab.reduction import (
    ConstraintSet,
    check_admissible,
    constrained_field,
    dirac_correction,
    dirac_multipliers,
    general_restricted_bracket,
    intrinsic_restricted_bracket,
    restricted_bracket,
    submanifold,
)
from contactlab.verification import pinned_brieskorn_point


def lin(c, name="lin"):
    c = np.asarray(c, dtype=float)
    return ScalarField(name, lambda x: float(c @ x), lambda x: c.copy())


@pytest.fixture(scope="module")
def b222():
    model = BrieskornModel((2, 2, 2))
    return model, model.manifold(), model.constraint_set()


@pytest.fixture(scope="module")
def b3222():
    model = BrieskornModel((3, 2, 2, 2))
    return model, model.manifold(), model.constraint_set()


def test_constraint_set_needs_even_count():
    with pytest.raises(ValueError):
        ConstraintSet([coordinate(0)])
    with pytest.raises(ValueError):
        ConstraintSet([])
    G = ConstraintSet([coordinate(0), coordinate(1)])
    assert len(G) == 2 and G[1].name == "x1"


def test_pinned_gram_and_multipliers(b222):
    model, M, G = b222
    x = pinned_brieskorn_point()
    data = check_admissible(M, G, x)
    assert np.allclose(data.gram, [[0, 4], [-4, 0]], atol=1e-12)
    assert data.tangent_reeb
    lam = dirac_multipliers(M, G, x, sphere_integrals(model.sphere)[0], data=data)
    assert np.allclose(lam, [1 / 3, 0.0], atol=1e-12)


def test_pinned_bracket(b222):
    model, M, G = b222
    x = pinned_brieskorn_point()
    f0, f1 = sphere_integrals(model.sphere)[:2]
    expected = 2 * np.sqrt(3) / 9
    assert restricted_bracket(M, G, x, f0, f1) == pytest.approx(expected, abs=1e-10)
    assert intrinsic_restricted_bracket(M, G, x, f0, f1) == pytest.approx(expected, abs=1e-10)
    assert general_restricted_bracket(M, G, x, f0, f1) == pytest.approx(expected, abs=1e-10)


def test_gram_singular():
    M = WeightedSphereModel((1.0, 1.0)).manifold()
    G = ConstraintSet([coordinate(1), coordinate(1)])
    with pytest.raises(GramSingular):
        check_admissible(M, G, np.array([1.0, 0, 0, 0]))


def test_off_constraint(b222):
    _, M, G = b222
    with pytest.raises(OffManifold):
        check_admissible(M, G, np.array([1.0, 0, 0, 0, 0, 0]))


def test_constrained_field_tangent_to_N(b3222, rng):
    model, M, G = b3222
    N = submanifold(M, G)
    f = lin(rng.standard_normal(8))
    for x in model.sample(rng, 10):
        W = constrained_field(M, G, x, f)
        assert np.max(np.abs(N.constraint_jacobian(x) @ W)) < 1e-10
        assert M.contact_form(x) @ W == pytest.approx(f(x), abs=1e-12)
        # and it is the contact field of f on N computed intrinsically
        assert np.allclose(W, contact_hamiltonian_field(N, x, f), atol=1e-9)


def test_multiplier_closed_form(b222, rng):
    model, M, G = b222
    G1, G2 = G
    f = lin(rng.standard_normal(6))
    for x in model.sample(rng, 10):
        mu = brieskorn_mu(model, x)
        Yf = contact_hamiltonian_field(M, x, f)
        lam = dirac_multipliers(M, G, x, f)
        assert np.allclose(lam, [G2.grad(x) @ Yf / mu, -(G1.grad(x) @ Yf) / mu], atol=1e-10)


def test_restricted_matches_intrinsic(b3222, rng):
    model, M, G = b3222
    N = submanifold(M, G)
    for x in model.sample(rng, 10):
        f, g = lin(rng.standard_normal(8)), lin(rng.standard_normal(8))
        a = restricted_bracket(M, G, x, f, g)
        assert a == pytest.approx(intrinsic_restricted_bracket(M, G, x, f, g, N=N), abs=1e-9)
        assert a == pytest.approx(general_restricted_bracket(M, G, x, f, g, N=N), abs=1e-9)


def test_correction_vanishes_for_commuting_with_constraints(b222):
    model, M, G = b222
    x = pinned_brieskorn_point()
    data = check_admissible(M, G, x)
    one = ScalarField("one", lambda y: 1.0, lambda y: np.zeros(6))
    f0 = sphere_integrals(model.sphere)[0]
    assert dirac_correction(M, G, data, one, f0) == pytest.approx(0.0, abs=1e-12)


class TestNonTangentReeb:
    """Constraints Re z1 = 0.1, Im z1 = 0.2 on S^5 are not Reeb invariant."""

    @pytest.fixture
    def setup(self):
        sphere = WeightedSphereModel((1.0, 1.0, 1.0))
        M = sphere.manifold()
        G = ConstraintSet([coordinate(2).shifted(0.1), coordinate(3).shifted(0.2)])
        return sphere, M, G, submanifold(M, G)

    def points(self, setup, rng, count):
        sphere, M, G, N = setup
        out = []
        for _ in range(count):
            y = rng.standard_normal(6)
            y[2:4] = (0.1, 0.2)
            out.append(project_to_manifold(N, y / np.linalg.norm(y)))
        return out

    def test_reeb_not_tangent(self, setup, rng):
        _, M, G, _ = setup
        x = self.points(setup, rng, 1)[0]
        data = check_admissible(M, G, x)
        assert not data.tangent_reeb
        with pytest.raises(NotTangentReeb):
            restricted_bracket(M, G, x, coordinate(0), coordinate(1), data=data)
        with pytest.raises(NotTangentReeb):
            constrained_field(M, G, x, coordinate(0), data=data)

    def test_general_formula_matches_intrinsic(self, setup, rng):
        _, M, G, N = setup
        for x in self.points(setup, rng, 10):
            f, g = lin(rng.standard_normal(6)), lin(rng.standard_normal(6))
            a = general_restricted_bracket(M, G, x, f, g, N=N)
            b = intrinsic_restricted_bracket(M, G, x, f, g, N=N)
            assert a == pytest.approx(b, abs=1e-9)
            assert a == pytest.approx(-general_restricted_bracket(M, G, x, g, f, N=N), abs=1e-9)
            assert abs(point_frame(N, x).reeb - point_frame(M, x).reeb).max() > 1e-3

    def test_displayed_variant_offset(self, setup, rng):
        # the Z-based horizontal projection is off by exactly f (Z* - Z)(g)
        _, M, G, N = setup
        for x in self.points(setup, rng, 5):
            f, g = lin(rng.standard_normal(6)), lin(rng.standard_normal(6))
            shown = general_restricted_bracket(M, G, x, f, g, N=N, displayed=True)
            exact = intrinsic_restricted_bracket(M, G, x, f, g, N=N)
            dZ = point_frame(N, x).reeb - point_frame(M, x).reeb
            assert shown - exact == pytest.approx(f(x) * (g.grad(x) @ dZ), abs=1e-9)
            assert abs(shown - exact) > 1e-6

    def test_trivial_cases(self, setup, rng):
        _, M, G, N = setup
        x = self.points(setup, rng, 1)[0]
        one = ScalarField("one", lambda y: 1.0, lambda y: np.zeros(6))
        f = lin(rng.standard_normal(6))
        assert abs(general_restricted_bracket(M, G, x, one, one, N=N)) < 1e-12
        assert abs(general_restricted_bracket(M, G, x, f, f, N=N)) < 1e-10


def test_general_agrees_with_tangent_case(b3222, rng):
    model, M, G = b3222
    N = submanifold(M, G)
    for x in model.sample(rng, 50):
        f, g = lin(rng.standard_normal(8)), lin(rng.standard_normal(8))
        a = restricted_bracket(M, G, x, f, g)
        assert general_restricted_bracket(M, G, x, f, g, N=N) == pytest.approx(a, abs=1e-8)
        assert general_restricted_bracket(M, G, x, f, g, N=N, displayed=True) == pytest.approx(a, abs=1e-8)


def test_gram_antisymmetric_and_inverse(b3222, rng):
    model, M, G = b3222
    for x in model.sample(rng, 10):
        d = check_admissible(M, G, x)
        assert np.max(np.abs(d.gram + d.gram.T)) < 1e-9
        assert np.allclose(d.gram_inverse @ d.gram, np.eye(2), atol=1e-8)


def test_multipliers_for_constant_and_fj(b222, rng):
    model, M, G = b222
    fs = sphere_integrals(model.sphere)
    one = ScalarField("one", lambda y: 1.0, lambda y: np.zeros(6))
    for x in model.sample(rng, 10):
        mu = brieskorn_mu(model, x)
        assert np.allclose(dirac_multipliers(M, G, x, one), 0.0, atol=1e-12)
        for j, f in enumerate(fs):
            u = to_complex(x)[j] ** 2
            lam = dirac_multipliers(M, G, x, f)
            assert np.allclose(lam, [4 * u.real / mu, 4 * u.imag / mu], atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=6, max_size=6),
    st.lists(st.floats(-2, 2), min_size=6, max_size=6),
    st.integers(0, 2**32 - 1),
)
def test_restricted_bracket_antisymmetric(cf, cg, seed):
    model = BrieskornModel((2, 2, 2))
    M, G = model.manifold(), model.constraint_set()
    x = model.sample(np.random.default_rng(seed), 1)[0]
    f, g = lin(cf), lin(cg)
    assert restricted_bracket(M, G, x, f, g) == pytest.approx(-restricted_bracket(M, G, x, g, f), abs=1e-9)
