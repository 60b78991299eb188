import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings, strategies as st

from newton_cradle.core import cradle_from_spectrum, make_cradle, random_hermitian, random_unit_vector
from newton_cradle.secular import (
    asymptotes,
    detect_level_repulsion,
    eigenvalues_at,
    interlace_by_deletion,
    mu_of_s,
    secular_roots,
    secular_sum,
    solve,
    trajectory,
    velocities_at,
    velocity_at,
)

from conftest import random_cradle


@pytest.fixture
def two_level():
    return cradle_from_spectrum([0.0, 1.0], [1.0, 1.0])


def test_two_level_spectrum(two_level):
    s = eigenvalues_at(two_level, 4.0 / 3.0)
    assert np.allclose(s, [1.0 / 3.0, 2.0], atol=1e-12, rtol=0)
    assert abs(asymptotes(two_level).values[0] - 0.5) <= 1e-12
    assert abs(mu_of_s(two_level, 2.0).value - 4.0 / 3.0) <= 1e-12


def test_mu_zero_is_base(rng):
    c = random_cradle(7, rng)
    assert np.array_equal(eigenvalues_at(c, 0.0), c.eigenvalues)


def test_against_dense(rng):
    for _ in range(40):
        n = int(rng.integers(2, 30))
        c = random_cradle(n, rng)
        mu = float(rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3))
        got = eigenvalues_at(c, mu)
        want = sl.eigvalsh(c.matrix(mu))
        scale = np.linalg.norm(c.matrix(0), 2) + abs(mu)
        assert np.max(np.abs(got - want)) <= 1e-9 * scale


def test_secular_residual(rng):
    c = random_cradle(10, rng)
    for mu in (-5.0, -0.1, 0.2, 3.0):
        for s in eigenvalues_at(c, mu):
            terms = c.weights / (s - c.eigenvalues)
            assert abs(np.sum(terms) - 1 / mu) <= 1e-10 * np.sum(np.abs(terms))


def test_mu_of_s_roundtrip(rng):
    c = random_cradle(6, rng)
    for mu in (-2.0, 0.5, 7.0):
        for s in eigenvalues_at(c, mu):
            assert abs(mu_of_s(c, s).value - mu) <= 1e-8 * abs(mu)
    assert mu_of_s(c, c.eigenvalues[2]).at_pole
    at_asym = mu_of_s(c, asymptotes(c).values[0])
    assert not at_asym.is_finite or abs(at_asym.value) > 1e10


def test_asymptotes_are_roots_and_interlace(rng):
    c = random_cradle(9, rng)
    a = asymptotes(c).values
    s = c.eigenvalues
    assert np.all((s[:-1] < a) & (a < s[1:]))
    for x in a:
        terms = c.weights / (x - s)
        assert abs(np.sum(terms)) <= 1e-12 * np.sum(np.abs(terms))


def test_large_mu_limits(rng):
    c = random_cradle(5, rng)
    a = asymptotes(c).values
    big = eigenvalues_at(c, 1e8)
    assert np.allclose(big[:-1], a, atol=1e-6)
    # The top level escapes like mu + <v|S|v>.
    shift = np.sum(c.weights * c.eigenvalues)
    assert abs(big[-1] - (1e8 + shift)) <= 1e-6
    low = eigenvalues_at(c, -1e8)
    assert np.allclose(low[1:], a, atol=1e-6)


def test_velocity_at_zero_is_weight(rng):
    c = random_cradle(8, rng)
    assert np.allclose(velocities_at(c, 0.0), c.weights, atol=1e-15)
    for n in range(8):
        assert abs(velocity_at(c, c.eigenvalues[n]) - c.weights[n]) <= 1e-15


def test_velocity_finite_difference(rng):
    c = random_cradle(6, rng)
    h = 1e-6
    for mu in (-3.0, 0.4, 2.5):
        fd = (eigenvalues_at(c, mu + h) - eigenvalues_at(c, mu - h)) / (2 * h)
        assert np.allclose(velocities_at(c, mu), fd, rtol=1e-6, atol=1e-9)


def test_momentum_conservation(rng):
    c = random_cradle(12, rng)
    traj = trajectory(c, np.linspace(-20, 20, 101))
    assert np.allclose(traj.velocities.sum(axis=1), 1.0, atol=1e-10)


def test_monotone_and_bounded(rng):
    c = random_cradle(7, rng)
    grid = np.linspace(-50, 50, 1001)
    vals = trajectory(c, grid).eigenvalues
    assert np.all(np.diff(vals, axis=0) > 0)
    lower, upper = asymptotes(c).bounds()
    assert np.all((vals > lower) & (vals < upper))


def test_frozen_level_stays(rng):
    c = cradle_from_spectrum([0.0, 1.0, 2.0, 3.0], [1.0, 0.0, 1.0, 1.0])
    roots = solve(c, [-4.0, 0.5, 10.0])
    assert np.all(roots.values[:, 1] == 1.0)
    for i, mu in enumerate([-4.0, 0.5, 10.0]):
        assert np.allclose(np.sort(roots.values[i]), sl.eigvalsh(c.matrix(mu)), atol=1e-12)
    assert np.all(velocities_at(c, 3.0)[1] == 0)


def test_interlace_by_deletion(rng):
    S = random_hermitian(8, rng)
    for r in range(8):
        keep = [i for i in range(8) if i != r]
        want = sl.eigvalsh(S[np.ix_(keep, keep)])
        assert np.allclose(interlace_by_deletion(S, r), want, atol=1e-10)


def test_interlace_with_frozen_level():
    S = np.diag([0.0, 1.0, 2.0]).astype(complex)
    S[0, 2] = S[2, 0] = 0.5
    assert np.allclose(interlace_by_deletion(S, 0), [1.0, 2.0])


def test_no_crossings_without_frozen(rng):
    c = random_cradle(6, rng)
    rep = detect_level_repulsion(c, np.linspace(-30, 30, 601))
    assert rep.crossings == () and rep.predicted == ()
    assert np.all(rep.min_gaps > 0)


def test_frozen_crossing_predicted():
    # f(1) = 1/2 - 1/4 so the lower level reaches s = 1 at mu = 4
    c = cradle_from_spectrum([0.0, 1.0, 3.0], [1.0, 0.0, 1.0])
    rep = detect_level_repulsion(c, np.linspace(-10, 10, 2001))
    assert len(rep.predicted) == 1
    p = rep.predicted[0]
    assert p.frozen == 1 and p.mover == 0
    assert len(rep.crossings) == 1
    x = rep.crossings[0]
    assert {x.lower, x.upper} == {0, 1}
    assert x.mu_before <= p.mu <= x.mu_after
    assert abs(p.mu - 4.0) <= 1e-12
    # level 0 sits exactly at s = 1 at the predicted weight
    assert abs(eigenvalues_at(c, p.mu)[0] - 1.0) <= 1e-12


def test_single_active_level():
    c = cradle_from_spectrum([0.0, 1.0], [1.0, 0.0])
    assert np.allclose(eigenvalues_at(c, 2.5), [2.5, 1.0])


def test_secular_sum_sign(two_level):
    assert secular_sum(two_level, 2.0) > 0
    assert secular_sum(two_level, 0.25) > 0 and secular_sum(two_level, 0.75) < 0


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-100, 100), min_size=2, max_size=12, unique=True),
    st.integers(0, 2**32 - 1),
    st.floats(-1e3, 1e3).filter(lambda m: abs(m) > 1e-6),
)
def test_property_dense_agreement(poles, seed, mu):
    poles = np.sort(poles)
    if np.min(np.diff(poles)) < 1e-6:
        return
    rng = np.random.default_rng(seed)
    c = cradle_from_spectrum(poles, rng.uniform(0.1, 1.0, poles.size))
    got = eigenvalues_at(c, mu)
    want = sl.eigvalsh(c.matrix(mu))
    assert np.max(np.abs(got - want)) <= 1e-9 * (np.max(np.abs(poles)) + abs(mu))
    assert abs(np.sum(velocities_at(c, mu)) - 1) <= 1e-10


def test_secular_roots_raw():
    origin, tau = secular_roots(np.array([0.0, 1.0]), np.array([0.5, 0.5]), np.array([0.75]))
    roots = np.array([0.0, 1.0])[origin[0]] + tau[0]
    assert np.allclose(roots, [1 / 3, 2])
