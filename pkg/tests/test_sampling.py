import numpy as np
import pytest
import scipy.linalg as sl

from newton_cradle.core import cradle_from_spectrum
from newton_cradle.exceptions import FrozenLevelsError, InvalidProfile
from newton_cradle.sampling import (
    SampledSignal,
    coefficients,
    evaluate,
    nodes_from_density,
    reconstruct,
    reconstruction_kernel,
    resample,
    sample,
    varying_rate_demo,
)

from conftest import random_cradle


def test_node_interpolation(rng):
    c = random_cradle(9, rng)
    f = rng.normal(size=9)
    sig = sample(f, c, 0.8)
    assert np.max(np.abs(reconstruct(sig, sig.nodes) - sig.amplitudes)) <= 1e-12
    K = reconstruction_kernel(c, 0.8, sig.nodes)
    assert np.allclose(K, np.eye(9), atol=1e-12)


def test_samples_are_eigen_overlaps(rng):
    c = random_cradle(6, rng)
    f = rng.normal(size=6) + 1j * rng.normal(size=6)
    sig = sample(f, c, -1.5)
    evals, evecs = sl.eigh(c.matrix(-1.5))
    assert np.allclose(sig.nodes, evals, atol=1e-12)
    assert np.allclose(np.abs(sig.amplitudes), np.abs(evecs.conj().T @ f), atol=1e-12)


def test_cross_lattice_equivalence(rng):
    c = random_cradle(7, rng)
    f = rng.normal(size=7)
    a, b = sample(f, c, 0.3), sample(f, c, 5.0)
    s = np.linspace(c.eigenvalues[0] - 3, c.eigenvalues[-1] + 3, 1000)
    assert np.max(np.abs(reconstruct(a, s) - reconstruct(b, s))) <= 1e-9
    assert np.allclose(reconstruct(a, s), evaluate(f, c, s), atol=1e-9)


def test_parseval(rng):
    c = random_cradle(8, rng)
    f = rng.normal(size=8) + 1j * rng.normal(size=8)
    norms = [np.linalg.norm(sample(f, c, mu).amplitudes) for mu in (-10.0, -0.5, 0.0, 2.0, 40.0)]
    assert np.max(np.abs(np.array(norms) - np.linalg.norm(f))) <= 1e-10


def test_resample_without_vector(rng):
    c = random_cradle(5, rng)
    f = rng.normal(size=5)
    moved = resample(sample(f, c, 0.1), -2.0)
    direct = sample(f, c, -2.0)
    assert np.allclose(moved.nodes, direct.nodes)
    assert np.allclose(moved.amplitudes, direct.amplitudes, atol=1e-12)


def test_mu_zero_samples_are_coefficients(rng):
    c = random_cradle(4, rng)
    f = rng.normal(size=4)
    sig = sample(f, c, 0.0)
    assert np.array_equal(sig.nodes, c.eigenvalues)
    assert np.allclose(sig.amplitudes, coefficients(f, c))


def test_real_signal_stays_real(rng):
    c = cradle_from_spectrum([0.0, 1.0, 2.5], [1.0, 1.0, 1.0])
    sig = sample(np.array([0.3, -1.0, 0.2]), c, 0.5)
    assert not np.iscomplexobj(sig.amplitudes)
    assert np.isrealobj(evaluate([1.0, 0.0, 0.0], c, 0.7, basis="eigen"))


def test_signal_dict_round_trip(rng):
    c = random_cradle(4, rng)
    f = rng.normal(size=4) + 1j * rng.normal(size=4)
    sig = sample(f, c, 1.0)
    d = sig.to_dict()
    assert "amplitudes_im" in d
    back = SampledSignal.from_dict(d, c)
    assert np.array_equal(back.amplitudes, sig.amplitudes)
    assert np.array_equal(back.nodes, sig.nodes)


def test_frozen_levels_rejected():
    c = cradle_from_spectrum([0.0, 1.0, 2.0], [1.0, 0.0, 1.0])
    with pytest.raises(FrozenLevelsError):
        sample([1.0, 0.0, 0.0], c, 1.0)


def test_varying_rate_demo():
    nodes = nodes_from_density(lambda x: 1 + x**2, -2.0, 2.0, 12)
    assert np.all(np.diff(nodes) > 0)
    # denser sampling where the density is larger
    gaps = np.diff(nodes)
    assert gaps[0] < gaps[len(gaps) // 2]
    c = varying_rate_demo(nodes)
    assert np.allclose(c.eigenvalues, nodes)
    f = np.linspace(1, 2, 12)
    assert np.allclose(sample(f, c, 0.0, basis="eigen").amplitudes, f)


def test_invalid_profile():
    with pytest.raises(InvalidProfile):
        varying_rate_demo([1.0, 0.5])
    with pytest.raises(InvalidProfile):
        varying_rate_demo([0.0, 1.0], weights=[1.0, -1.0])
    with pytest.raises(InvalidProfile):
        nodes_from_density(lambda x: x, -1.0, 1.0, 5)
