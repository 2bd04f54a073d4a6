import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import line_measures, seeded_measures
from measureiso import spaces as sp
from measureiso.errors import DomainError, ValidationError
from measureiso.isometries import (
    antipodal_mix_transform,
    bidual_check,
    bidual_set,
    collapse_transform,
    dirac_integrals,
    dirac_sup_profile,
    extract_point_map,
    kloeckner_isometry,
    ks_isometry,
    kuiper_isometry,
    levy_isometry,
    lift_isometry,
    lp_isometry,
    probe_grid,
    verify_dirac_characterization,
)
from measureiso.measures import center_of_mass, dirac, measure, same_measure
from measureiso.metrics import ks_distance, kuiper_distance, levy_distance, levy_prokhorov_distance
from measureiso.transport import wasserstein

L = sp.line()
seeds = st.integers(0, 2**32 - 1)


def test_lift_identity():
    s = sp.euclidean(2)
    m = measure(s, [[0.0, 1.0], [2.0, 3.0]], [0.4, 0.6])
    assert same_measure(lift_isometry(sp.identity_map(s))(m), m, tol=0.0)


def test_kloeckner_examples():
    s = sp.euclidean(2)
    phi = kloeckner_isometry(sp.rotation2d(np.pi / 2))
    x = dirac(s, [3.0, -1.0])
    assert same_measure(phi(x), x, tol=1e-15)
    # a horizontal pair about (1, 0) turns vertical
    pair = measure(s, [[0.0, 0.0], [2.0, 0.0]])
    assert same_measure(phi(pair), measure(s, [[1.0, -1.0], [1.0, 1.0]]), tol=1e-15)
    nu = measure(s, [[0.0, 5.0], [1.0, 1.0], [4.0, 0.0]], [0.2, 0.3, 0.5])
    assert abs(wasserstein(s, phi(pair), phi(nu), 2) - wasserstein(s, pair, nu, 2)) <= 1e-7
    np.testing.assert_allclose(center_of_mass(phi(nu)), center_of_mass(nu), atol=1e-14)


def test_kloeckner_errors():
    phi = kloeckner_isometry(np.eye(2))
    with pytest.raises(DomainError, match="DISCRETE_SPACE_UNSUPPORTED"):
        phi(dirac(sp.discrete(3), 0))
    with pytest.raises(DomainError, match="WRONG_SPACE"):
        phi(dirac(sp.euclidean(3), [0.0, 0.0, 0.0]))


def test_kloeckner_is_not_a_pushforward():
    # the shared atom 0 lands at (1, -1) in one image and at (-1, 1) in the other,
    # so no single point map T induces phi
    s = sp.euclidean(2)
    phi = kloeckner_isometry(sp.rotation2d(np.pi / 2))
    a = phi(measure(s, [[0.0, 0.0], [2.0, 0.0]]))
    b = phi(measure(s, [[0.0, 0.0], [-2.0, 0.0]]))
    assert same_measure(a, measure(s, [[1.0, -1.0], [1.0, 1.0]]), tol=1e-15)
    assert same_measure(b, measure(s, [[-1.0, -1.0], [-1.0, 1.0]]), tol=1e-15)


def test_constructor_examples():
    psi = sp.affine_real(2.0, 0.0)
    assert same_measure(ks_isometry(psi)(dirac(L, 3.0)), dirac(L, 1.5), tol=1e-15)
    assert same_measure(levy_isometry(1.0)(dirac(L, 0.0)), dirac(L, -1.0), tol=0.0)
    assert same_measure(levy_isometry(1.0, reflect=True)(dirac(L, 0.25)), dirac(L, 0.75), tol=0.0)
    assert same_measure(kuiper_isometry(sp.cube_map())(measure(L, [-1.0, 2.0])), measure(L, [-1.0, 8.0]), tol=0.0)
    s = sp.euclidean(2)
    shift = sp.AffineMap(np.eye(2), [1.0, 1.0])
    assert same_measure(lp_isometry(shift)(dirac(s, [0.0, 0.0])), dirac(s, [1.0, 1.0]), tol=0.0)


def test_constructor_validation():
    with pytest.raises(ValidationError, match="NOT_BIJECTIVE"):
        ks_isometry(sp.affine_real(-1.0, 0.0), increasing=True)
    with pytest.raises(ValidationError):
        lp_isometry(sp.cube_map())


@given(line_measures(), line_measures(), st.floats(0.2, 3.0), st.floats(-2, 2), st.booleans())
def test_ks_isometry_preserves_ks(mu, nu, slope, offset, increasing):
    psi = sp.affine_real(slope if increasing else -slope, offset)
    phi = ks_isometry(psi, increasing)
    assert abs(ks_distance(phi(mu), phi(nu)) - ks_distance(mu, nu)) <= 1e-10


@given(line_measures(grid=False), line_measures(grid=False), st.floats(-2, 2), st.booleans())
def test_levy_isometry_preserves_levy(mu, nu, c, reflect):
    phi = levy_isometry(c, reflect)
    assert abs(levy_distance(phi(mu), phi(nu)) - levy_distance(mu, nu)) <= 1e-9


@given(line_measures(), line_measures())
def test_kuiper_cube_preserves_kuiper(mu, nu):
    phi = kuiper_isometry(sp.cube_map())
    assert abs(kuiper_distance(phi(mu), phi(nu)) - kuiper_distance(mu, nu)) <= 1e-9


@given(data=st.data())
def test_lp_affine_preserves_lp(data):
    s = sp.euclidean(2)
    mu, nu = data.draw(seeded_measures(s, 6)), data.draw(seeded_measures(s, 6))
    phi = lp_isometry(sp.random_isometry(s, np.random.default_rng(data.draw(seeds))))
    assert abs(levy_prokhorov_distance(phi(mu), phi(nu)) - levy_prokhorov_distance(mu, nu)) <= 1e-8


@given(data=st.data())
def test_group_law(data):
    # (f o g)_# = f_# o g_#
    s = sp.euclidean(3)
    rng = np.random.default_rng(data.draw(seeds))
    f, g = sp.random_isometry(s, rng), sp.random_isometry(s, rng)
    mu = data.draw(seeded_measures(s))
    lhs = lift_isometry(f.compose(g))(mu)
    rhs = lift_isometry(f)(lift_isometry(g)(mu))
    assert same_measure(lhs, rhs, tol=1e-12)


# ------------------------------------------------------------ sphere

def test_probe_grid_on_sphere():
    for n in (2, 3, 5):
        pts = probe_grid(sp.sphere(n), 50)
        assert pts.shape == (50, n)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 0.5, atol=1e-15)
    with pytest.raises(DomainError, match="WRONG_SPACE"):
        probe_grid(L, 10)


def test_sup_profile_of_a_dirac():
    s = sp.sphere(3)
    x = np.array([0.0, 0.5, 0.0])
    value, arg = dirac_sup_profile(s, dirac(s, x), 2.0, [-x, x])
    assert value == 1.0 and arg.tolist() == (-x).tolist()


def test_sup_profile_of_antipodal_pair_is_flat():
    s = sp.sphere(3)
    x = np.array([0.5, 0.0, 0.0])
    mu = measure(s, [x, -x])
    probes = probe_grid(s, 64)
    np.testing.assert_allclose(dirac_integrals(mu, 2.0, probes), 0.5, atol=1e-15)
    value, _ = dirac_sup_profile(s, mu, 2.0, probes)
    assert value == pytest.approx(0.5, abs=1e-15)


def test_sup_profile_errors():
    s = sp.sphere(2)
    with pytest.raises(ValidationError, match="EMPTY_PROBES"):
        dirac_sup_profile(s, dirac(s, [0.5, 0.0]), 1.0, np.zeros((0, 2)))
    with pytest.raises(DomainError, match="WRONG_SPACE"):
        dirac_sup_profile(s, dirac(sp.sphere(3), [0.5, 0.0, 0.0]), 1.0, [[0.5, 0.0]])


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_dirac_characterization_dirac(n, p):
    s = sp.sphere(n)
    x = sp.random_point(s, np.random.default_rng(n))
    rep = verify_dirac_characterization(s, dirac(s, x), p)
    assert rep.dirac and rep.passed


@pytest.mark.parametrize("eps", [0.1, 0.01])
@pytest.mark.parametrize("p", [1.0, 2.0])
def test_dirac_characterization_near_dirac(eps, p):
    s = sp.sphere(3)
    rng = np.random.default_rng(11)
    mu = measure(s, [sp.random_point(s, rng), sp.random_point(s, rng)], [1 - eps, eps])
    rep = verify_dirac_characterization(s, mu, p, probe_count=100, rng=rng)
    assert not rep.dirac and rep.passed
    assert rep.worst_wp < 1.0 and rep.max_bound < 1.0
    assert rep.opponents >= 100


# ------------------------------------------------------------ point maps

def test_extract_point_map_from_rotation():
    s = sp.sphere(3)
    rng = np.random.default_rng(5)
    Q = sp.random_orthogonal(3, rng)
    sample = probe_grid(s, 12)
    pm = extract_point_map(lift_isometry(Q), s, sample)
    np.testing.assert_allclose(pm.images, sample @ Q.Q.T, atol=1e-12)
    assert pm.isometry_defect <= 1e-12


def test_collapse_has_large_defect():
    s = sp.sphere(3)
    sample = probe_grid(s, 10)
    pm = extract_point_map(collapse_transform(s, sample[0]), s, sample)
    assert pm.isometry_defect > 0.1


def test_antipodal_mix_is_flagged():
    s = sp.sphere(2)
    with pytest.raises(DomainError, match="IMAGE_NOT_DIRAC"):
        extract_point_map(antipodal_mix_transform(s), s, probe_grid(s, 4))


# ------------------------------------------------------------ bidual proxy

def test_bidual_ks_three_measures():
    d0, d1, half = dirac(L, 0.0), dirac(L, 1.0), measure(L, [0.0, 1.0])
    uni = [d0, d1, half]
    # only delta_1 is at KS distance 1 from delta_0, and vice versa
    assert bidual_check(uni, "ks", d0) == {"U": [1], "UU": [0], "fixed_point": True, "dirac": True}
    res = bidual_check(uni, "ks", half)
    assert res["U"] == [] and not res["fixed_point"]


def test_bidual_set_of_empty_family_is_universe():
    uni = [dirac(L, 0.0), dirac(L, 2.0)]
    assert bidual_set(uni, "ks", []) == uni
