import itertools

import numpy as np
import pytest
import scipy.linalg as sl

from newton_cradle.adiabatic import (
    Literal,
    SatInstance,
    build_3sat_hamiltonian,
    fd_gap_slope,
    gap_trajectory,
    mixer_hamiltonian,
    narrowing_criterion,
    parse_dimacs,
    random_3sat,
    stepped_schedule,
    violation_counts,
)
from newton_cradle.core import SpectralDecomposition, eigendecompose, random_hermitian, random_unit_vector
from newton_cradle.exceptions import AmbiguousGap, DimensionCapExceeded, InputError


def brute_force_counts(inst):
    out = []
    for bits in itertools.product([0, 1], repeat=inst.num_vars):
        # bits[i] is variable i+1; index b has variable i+1 at bit i
        x = dict(zip(range(1, inst.num_vars + 1), bits))
        out.append((sum(b << i for i, b in enumerate(bits)),
                    sum(all(x[l.var] == int(l.negated) for l in c) for c in inst.clauses)))
    counts = np.zeros(2**inst.num_vars)
    for b, v in out:
        counts[b] = v
    return counts


def test_empty_instance_is_zero():
    assert np.array_equal(build_3sat_hamiltonian(SatInstance(3, ())), np.zeros((8, 8)))


def test_single_literal():
    inst = SatInstance.from_ints(1, [(1,)])
    assert np.array_equal(build_3sat_hamiltonian(inst), np.diag([1.0, 0.0]))


def test_three_var_clause():
    inst = SatInstance.from_ints(3, [(1, 2, -3)])
    d = np.diag(build_3sat_hamiltonian(inst))
    assert d.sum() == 1
    # violated only by x1 = 0, x2 = 0, x3 = 1, i.e. b = 4
    assert d[4] == 1


def test_exhaustive_enumeration():
    rng = np.random.default_rng(5)
    for n in range(3, 11):
        inst = random_3sat(n, int(rng.integers(1, 3 * n)), rng)
        assert np.array_equal(violation_counts(inst), brute_force_counts(inst))


def test_instance_validation():
    with pytest.raises(InputError):
        SatInstance.from_ints(3, [(1, 1, 2)])
    with pytest.raises(InputError):
        SatInstance.from_ints(2, [(1, 3)])
    with pytest.raises(InputError):
        SatInstance.from_ints(4, [(1, 2, 3, 4)])
    with pytest.raises(DimensionCapExceeded):
        build_3sat_hamiltonian(SatInstance(13, ()))


def test_dimacs_round_trip():
    text = "c demo\np cnf 4 2\n1 -2 3 0\n-4\n 2 0\n"
    inst = parse_dimacs(text)
    assert inst.clauses == ((Literal(1, False), Literal(2, True), Literal(3, False)), (Literal(4, True), Literal(2, False)))
    assert parse_dimacs(inst.to_dimacs()) == inst
    with pytest.raises(InputError):
        parse_dimacs("1 2 0\n")


def test_random_3sat_seeded():
    a = random_3sat(5, 7, np.random.default_rng(3))
    b = random_3sat(5, 7, np.random.default_rng(3))
    assert a == b and len(a.clauses) == 7


def test_mixers():
    for kind in ("uniform", "transverse"):
        H = mixer_hamiltonian(3, kind)
        evals, evecs = sl.eigh(H)
        assert abs(evals[0]) <= 1e-12 and evals[1] - evals[0] > 0.5
        assert np.allclose(np.abs(evecs[:, 0]), 1 / np.sqrt(8))
    assert np.allclose(sl.eigvalsh(mixer_hamiltonian(2, "transverse", [1.0, 2.0])), [0, 1, 2, 3])
    with pytest.raises(InputError):
        mixer_hamiltonian(2, "bogus")


def test_gap_equal_hamiltonians():
    H = np.diag([0.0, 0.7, 2.0])
    sch = gap_trajectory(H, H, np.linspace(0, 1, 11))
    assert np.allclose(sch.gap, 0.7)
    assert sch.a == 0.0


def test_gap_commuting_crossing():
    t = np.linspace(0, 1, 201)
    sch = gap_trajectory(np.diag([0.0, 1.0]), np.diag([1.0, 0.0]), t)
    assert np.allclose(sch.gap, np.abs(1 - 2 * t), atol=1e-12)
    assert sch.g_min == 0.0 and sch.t_min == 0.5
    assert sch.degenerate[100] and sch.degenerate.sum() == 1


def test_gap_matches_dense(rng):
    H_S, H_C = random_hermitian(6, rng), random_hermitian(6, rng)
    sch = gap_trajectory(H_S, H_C)
    assert sch.grid.size == 201
    for t, g in zip(sch.grid[::20], sch.gap[::20]):
        e = sl.eigvalsh((1 - t) * H_S + t * H_C)
        assert abs(g - (e[1] - e[0])) <= 1e-10
    assert np.all(sch.gap >= 0)


def test_criterion_trivial_cases(rng):
    state = eigendecompose(np.diag([0.0, 1.0, 3.0]))
    g = state.eigenvectors[:, 0]
    r = narrowing_criterion(state, (0.5, g))
    assert r.narrows and r.lhs == pytest.approx(1) and r.rhs == pytest.approx(0)
    v = (state.eigenvectors[:, 0] + state.eigenvectors[:, 1]) / np.sqrt(2)
    r = narrowing_criterion(state, (0.5, v))
    assert r.marginal and not r.narrows
    r = narrowing_criterion(state, (-0.5, g))
    assert not r.narrows


def test_criterion_ambiguous():
    state = eigendecompose(np.diag([0.0, 0.0, 1.0]), strict=False)
    with pytest.raises(AmbiguousGap):
        narrowing_criterion(state, (1.0, np.array([1.0, 0, 0])))


def test_criterion_matches_finite_difference(rng):
    checked = 0
    for _ in range(60):
        n = int(rng.integers(2, 8))
        H = random_hermitian(n, rng)
        v = random_unit_vector(n, rng)
        mu = float(rng.choice([-1, 1]) * rng.uniform(0.1, 2))
        r = narrowing_criterion(eigendecompose(H), (mu, v))
        if r.marginal:
            continue
        slope = fd_gap_slope(H, mu, v)
        assert r.narrows == (np.sign(mu) * slope < 0)
        # the reported speeds are the derivatives of the bottom two levels
        P, h = np.outer(v, v.conj()), 1e-6
        fd = (sl.eigvalsh(H + h * P)[:2] - sl.eigvalsh(H - h * P)[:2]) / (2 * h)
        assert abs(fd[0] - r.lhs) <= 1e-5 * r.lhs
        assert abs(fd[1] - r.rhs) <= 1e-5 * r.rhs
        checked += 1
    assert checked >= 55


def test_degenerate_excited_cluster():
    # excited level doubly degenerate: the lower branch of the cluster stays put for mu > 0
    H = np.diag([0.0, 1.0, 1.0])
    state = SpectralDecomposition(np.array([0.0, 1.0, 1.0]), np.eye(3, dtype=complex))
    v = np.array([0.3, 0.8, np.sqrt(1 - 0.73)])
    up = narrowing_criterion(state, (1.0, v))
    down = narrowing_criterion(state, (-1.0, v))
    assert up.rhs == 0.0 and up.excited_multiplicity == 2
    assert down.rhs == pytest.approx(0.64 + 0.27)
    for rep, mu in ((up, 1.0), (down, -1.0)):
        slope = fd_gap_slope(H, mu, v)
        assert rep.narrows == (np.sign(mu) * slope < 0)


def test_stepped_schedule_zero():
    H = mixer_hamiltonian(2)
    assert stepped_schedule(H, H) == []


def test_stepped_schedule_two_level():
    v = np.array([np.cos(0.3), np.sin(0.3)])
    reps = stepped_schedule(np.diag([0.0, 1.0]), np.diag([0.0, 1.0]) + np.outer(v, v))
    assert len(reps) == 1
    r = reps[0]
    assert r.consistent
    assert (r.gap_change < 0) == r.criterion.narrows


@pytest.mark.parametrize("kind", ["uniform", "transverse"])
def test_stepped_schedule_sat(kind):
    inst = random_3sat(4, 5, np.random.default_rng(11))
    reps = stepped_schedule(mixer_hamiltonian(4, kind), build_3sat_hamiltonian(inst))
    assert reps
    for r in reps:
        d = r.to_dict()
        assert set(d) >= {"j", "mu", "criterion", "gap_change", "fd_slope"}
        if r.consistent is not None:
            assert r.consistent


def test_step_monotone_spectrum(rng):
    H = random_hermitian(5, rng)
    v = random_unit_vector(5, rng)
    P = np.outer(v, v.conj())
    for mu in (0.7, -0.7):
        before, after = sl.eigvalsh(H), sl.eigvalsh(H + mu * P)
        assert np.all(np.sign(mu) * (after - before) >= -1e-12)
