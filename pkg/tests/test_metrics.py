from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import discrete_measures, line_measures, seeded_measures
from measureiso import spaces as sp
from measureiso.errors import DomainError, ValidationError
from measureiso.measures import dirac, measure
from measureiso.metrics import (
    cdf_of,
    distance_by_name,
    joint_support,
    ks_distance,
    kuiper_distance,
    levy_distance,
    levy_prokhorov_distance,
    tv_distance,
    w1_cdf,
)

L = sp.line()


# ------------------------------------------------------------ brute-force oracles
# Built straight from the definitions, sharing no code with the package.

def _mass(m, pred):
    return float(sum(w for x, w in zip(m.points(), m.weights) if pred(x)))


def brute_tv(mu, nu):
    pts = list(mu.points()) + [x for x in nu.points() if not any(np.array_equal(x, y) for y in mu.points())]
    best = 0.0
    for r in range(len(pts) + 1):
        for B in combinations(range(len(pts)), r):
            inB = lambda x: any(np.array_equal(x, pts[k]) for k in B)  # noqa: E731
            best = max(best, abs(_mass(mu, inB) - _mass(nu, inB)))
    return best


def _F(m, t):
    return float(m.weights[m.atoms[:, 0] <= t].sum())


def brute_ks(mu, nu):
    z = np.union1d(mu.atoms[:, 0], nu.atoms[:, 0])
    ts = np.concatenate([z, 0.5 * (z[:-1] + z[1:]), [z[0] - 1, z[-1] + 1]])
    return max(abs(_F(mu, t) - _F(nu, t)) for t in ts)


def brute_kuiper(mu, nu):
    """Every interval with endpoints at atoms (any open/closed pattern) and every half-line."""
    z = np.union1d(mu.atoms[:, 0], nu.atoms[:, 0])
    best = 0.0

    def diff(pred):
        return abs(_mass(mu, lambda x: pred(x[0])) - _mass(nu, lambda x: pred(x[0])))

    for a in z:
        for b in z[z >= a]:
            for pred in (
                lambda x, a=a, b=b: a <= x <= b,
                lambda x, a=a, b=b: a < x <= b,
                lambda x, a=a, b=b: a <= x < b,
                lambda x, a=a, b=b: a < x < b,
            ):
                best = max(best, diff(pred))
        for pred in (lambda x, a=a: x <= a, lambda x, a=a: x < a, lambda x, a=a: x >= a, lambda x, a=a: x > a):
            best = max(best, diff(pred))
    return best


def brute_levy_feasible(mu, nu, eps):
    """All three step functions of t change only at z, z + eps, z - eps; test
    those points, the midpoints between them and both far ends."""
    z = np.union1d(mu.atoms[:, 0], nu.atoms[:, 0])
    br = np.unique(np.concatenate([z, z + eps, z - eps]))
    ts = np.concatenate([br, 0.5 * (br[:-1] + br[1:]), [br[0] - 1, br[-1] + 1]])
    for t in ts:
        g = _F(nu, t)
        if _F(mu, t - eps) - eps > g + 1e-15 or g > _F(mu, t + eps) + eps + 1e-15:
            return False
    return True


def brute_lp_feasible(mu, nu, eps):
    d = sp.pairwise_distances(mu.space, mu.atoms, nu.atoms)
    for r in range(1, len(mu) + 1):
        for A in combinations(range(len(mu)), r):
            near = d[list(A)].min(axis=0) < eps
            if mu.weights[list(A)].sum() > nu.weights[near].sum() + eps + 1e-15:
                return False
    return True


def bisect(feasible, tol=1e-12):
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if feasible(mid) else (mid, hi)
    return hi


# ------------------------------------------------------------ worked examples

def test_tv_examples():
    a, b = dirac(L, 0.0), dirac(L, 1.0)
    assert tv_distance(measure(L, [0.0, 1.0]), a) == 0.5
    assert tv_distance(a, b) == 1.0
    assert tv_distance(a, a) == 0.0
    s = sp.discrete(4)
    assert tv_distance(measure(s, [0, 1]), measure(s, [1, 2])) == 0.5


def test_ks_and_kuiper_examples():
    a, half = dirac(L, 0.0), measure(L, [0.0, 1.0])
    assert ks_distance(a, half) == 0.5
    assert kuiper_distance(a, half) == 0.5
    # a bump in the middle: KS sees 1/2, Kuiper sees both excursions
    mu, nu = dirac(L, 1.0), measure(L, [0.0, 2.0])
    assert ks_distance(mu, nu) == 0.5
    assert kuiper_distance(mu, nu) == 1.0


def test_w1_cdf_example():
    assert w1_cdf(dirac(L, 0.0), dirac(L, 3.0)) == 3.0
    assert w1_cdf(measure(L, [0.0, 1.0]), dirac(L, 0.0)) == 0.5


@pytest.mark.parametrize("c", [0.0, 0.25, 0.5, 0.9, 1.0, 5.0])
def test_levy_between_diracs(c):
    assert levy_distance(dirac(L, 0.0), dirac(L, c)) == pytest.approx(min(c, 1.0), abs=1e-9)


@pytest.mark.parametrize("s", [L, sp.euclidean(2), sp.sphere(3), sp.discrete(3)], ids=str)
def test_lp_between_diracs(s):
    rng = np.random.default_rng(3)
    for _ in range(10):
        x, y = sp.random_point(s, rng), sp.random_point(s, rng)
        expected = min(sp.distance(s, x, y), 1.0)
        assert levy_prokhorov_distance(dirac(s, x), dirac(s, y)) == pytest.approx(expected, abs=1e-12)


def test_lp_half_mass_example():
    assert levy_prokhorov_distance(measure(L, [0.0, 1.0]), dirac(L, 0.0)) == pytest.approx(0.5, abs=1e-12)


def test_cdf_of():
    F = cdf_of(measure(L, [2.0, 0.0], [0.75, 0.25]))
    assert F.eval(-1.0) == 0.0
    assert F.eval(0.0) == 0.25
    assert F.eval(1.0) == 0.25
    assert F.eval(2.0) == 1.0
    assert F.eval_left(2.0) == 0.25


def test_joint_support_identifies_close_atoms():
    z, wm, wn = joint_support(dirac(L, 1.0), measure(L, [1.0 + 1e-13, 2.0]))
    assert z[:, 0].tolist() == [1.0, 2.0]
    assert wm.tolist() == [1.0, 0.0] and wn.tolist() == [0.5, 0.5]


def test_errors():
    s = sp.euclidean(2)
    with pytest.raises(DomainError, match="WRONG_SPACE"):
        ks_distance(dirac(s, [0.0, 0.0]), dirac(s, [1.0, 0.0]))
    with pytest.raises(DomainError, match="WRONG_SPACE"):
        cdf_of(dirac(sp.discrete(3), 0))
    with pytest.raises(DomainError, match="SPACE_MISMATCH"):
        tv_distance(dirac(L, 0.0), dirac(s, [0.0, 0.0]))
    big = measure(L, np.arange(16.0))
    with pytest.raises(DomainError, match="SUPPORT_TOO_LARGE"):
        levy_prokhorov_distance(big, dirac(L, 0.0))
    with pytest.raises(ValidationError, match="UNKNOWN_METRIC"):
        distance_by_name("hellinger", dirac(L, 0.0), dirac(L, 0.0))


# ------------------------------------------------------------ oracle agreement

@given(line_measures(max_atoms=4), line_measures(max_atoms=4))
def test_tv_matches_subset_enumeration(mu, nu):
    assert abs(tv_distance(mu, nu) - brute_tv(mu, nu)) <= 1e-14


@given(discrete_measures(k=5, max_atoms=4), discrete_measures(k=5, max_atoms=4))
def test_tv_discrete_matches_subset_enumeration(mu, nu):
    assert abs(tv_distance(mu, nu) - brute_tv(mu, nu)) <= 1e-14


@given(line_measures(), line_measures())
def test_ks_matches_pointwise_sup(mu, nu):
    assert abs(ks_distance(mu, nu) - brute_ks(mu, nu)) <= 1e-14


@given(line_measures(max_atoms=5), line_measures(max_atoms=5))
def test_kuiper_matches_interval_enumeration(mu, nu):
    assert abs(kuiper_distance(mu, nu) - brute_kuiper(mu, nu)) <= 1e-14


@given(line_measures(max_atoms=5), line_measures(max_atoms=5))
def test_levy_matches_definition(mu, nu):
    expected = bisect(lambda e: brute_levy_feasible(mu, nu, e))
    assert abs(levy_distance(mu, nu) - expected) <= 1e-9


@given(line_measures(max_atoms=5, grid=False), line_measures(max_atoms=5, grid=False))
def test_levy_matches_definition_off_grid(mu, nu):
    expected = bisect(lambda e: brute_levy_feasible(mu, nu, e))
    assert abs(levy_distance(mu, nu) - expected) <= 1e-9


@pytest.mark.parametrize("s", [L, sp.euclidean(2), sp.sphere(3), sp.discrete(4)], ids=str)
@given(data=st.data())
def test_lp_matches_subset_bisection(s, data):
    mu, nu = data.draw(seeded_measures(s, max_atoms=4)), data.draw(seeded_measures(s, max_atoms=4))
    expected = bisect(lambda e: brute_lp_feasible(mu, nu, e))
    assert abs(levy_prokhorov_distance(mu, nu) - expected) <= 1e-9


# ------------------------------------------------------------ properties

@given(line_measures(), line_measures())
def test_chain_and_ks_below_tv(mu, nu):
    ks, ku, tv = ks_distance(mu, nu), kuiper_distance(mu, nu), tv_distance(mu, nu)
    assert 0 <= ks <= ku + 1e-12
    assert ku <= tv + 2e-12
    assert tv <= 1 + 3e-12
    assert levy_distance(mu, nu) <= ks + 1e-9


@pytest.mark.parametrize("name", ["tv", "ks", "kuiper", "levy", "lp"])
@given(line_measures(max_atoms=4), line_measures(max_atoms=4), line_measures(max_atoms=4))
def test_metric_axioms(name, mu, nu, eta):
    tol = 1e-9 if name == "levy" else 1e-12
    rho = lambda a, b: distance_by_name(name, a, b)  # noqa: E731
    assert rho(mu, mu) <= tol
    assert abs(rho(mu, nu) - rho(nu, mu)) <= tol
    assert rho(mu, nu) <= rho(mu, eta) + rho(eta, nu) + 3 * tol


@pytest.mark.parametrize("s", [sp.euclidean(2), sp.sphere(3), sp.discrete(5)], ids=str)
@given(data=st.data())
def test_lp_symmetric_off_the_line(s, data):
    # the defining inequality is one-sided, so symmetry is checked rather than assumed
    mu, nu = data.draw(seeded_measures(s)), data.draw(seeded_measures(s))
    assert abs(levy_prokhorov_distance(mu, nu) - levy_prokhorov_distance(nu, mu)) <= 1e-12
