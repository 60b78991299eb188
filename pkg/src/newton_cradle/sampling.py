"""Finite sampling and reconstruction on cradle eigenvalue lattices.

A vector ``|f>`` becomes the function ``f(s) = <s|f>`` on the whole real
line, ``|s>`` being the cradle eigenvector with eigenvalue ``s``. Its values
on the eigenvalue lattice of any single ``S(mu)`` determine it everywhere:

    f(s) = sum_n <s|s_n(mu)> f(s_n(mu))

The kernel is real, so real coefficient vectors give real signals; complex
ones are carried as complex amplitudes (two real channels). Nothing here
decays like sinc outside ``[s_1, s_N]``: amplitudes there follow the kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CradleConfig, cradle_from_spectrum
from .exceptions import FrozenLevelsError, InvalidProfile
from .kernel import basis_matrix_from_roots, overlap_rows
from .secular import solve


def _require_active(cradle):
    if cradle.frozen:
        raise FrozenLevelsError(f"levels {sorted(cradle.frozen)} are frozen")


def _realify(x):
    x = np.asarray(x)
    if np.iscomplexobj(x) and np.all(x.imag == 0):
        return x.real
    return x


def coefficients(f_vec, cradle: CradleConfig):
    """``<s_n|f>`` in the aligned base basis for an ambient vector ``f_vec``."""
    a = cradle.aligned_basis().conj().T @ np.asarray(f_vec, dtype=complex)
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a.imag), initial=0.0) <= 1e-14 * scale:
        a = a.real
    return a


def evaluate(f_vec, cradle: CradleConfig, s, basis="ambient"):
    """``f(s)`` for scalar or array ``s``.

    ``basis="ambient"`` takes ``f_vec`` as an ordinary vector; with
    ``basis="eigen"`` it is already the coefficient vector ``<s_n|f>``.
    """
    _require_active(cradle)
    a = coefficients(f_vec, cradle) if basis == "ambient" else np.asarray(f_vec)
    out = _realify(overlap_rows(cradle, np.atleast_1d(s)) @ a)
    return out[0] if np.ndim(s) == 0 else out


@dataclass(frozen=True)
class SampledSignal:
    cradle: CradleConfig
    mu: float
    nodes: np.ndarray
    amplitudes: np.ndarray

    def to_dict(self):
        d = {"mu": self.mu, "nodes": self.nodes.tolist()}
        if np.iscomplexobj(self.amplitudes):
            d["amplitudes"] = self.amplitudes.real.tolist()
            d["amplitudes_im"] = self.amplitudes.imag.tolist()
        else:
            d["amplitudes"] = self.amplitudes.tolist()
        return d

    @classmethod
    def from_dict(cls, d, cradle):
        amp = np.asarray(d["amplitudes"], dtype=float)
        if "amplitudes_im" in d:
            amp = amp + 1j * np.asarray(d["amplitudes_im"], dtype=float)
        return cls(cradle, float(d["mu"]), np.asarray(d["nodes"], dtype=float), amp)


def sample(f_vec, cradle: CradleConfig, mu: float, basis="ambient") -> SampledSignal:
    """Values of ``f`` on the eigenvalue lattice of ``S + mu vv^dagger``."""
    _require_active(cradle)
    a = coefficients(f_vec, cradle) if basis == "ambient" else np.asarray(f_vec)
    roots = solve(cradle, [mu])
    Q = basis_matrix_from_roots(cradle, roots)
    return SampledSignal(cradle, float(mu), roots.values[0].copy(), _realify(Q @ a))


def reconstruction_kernel(cradle: CradleConfig, mu: float, s) -> np.ndarray:
    """``<s|s_n(mu)>`` for each ``s`` (rows) and lattice node ``n`` (columns)."""
    Q = basis_matrix_from_roots(cradle, solve(cradle, [mu]))
    return overlap_rows(cradle, np.atleast_1d(s)) @ Q.T


def reconstruct(sig: SampledSignal, s):
    """Interpolate the sampled signal at ``s`` (scalar or array)."""
    _require_active(sig.cradle)
    K = reconstruction_kernel(sig.cradle, sig.mu, s)
    out = _realify(K @ sig.amplitudes)
    return out[0] if np.ndim(s) == 0 else out


def resample(sig: SampledSignal, mu: float) -> SampledSignal:
    """Move samples to another lattice of the same cradle without the original vector."""
    nodes = solve(sig.cradle, [mu]).values[0]
    return SampledSignal(sig.cradle, float(mu), nodes, np.asarray(reconstruct(sig, nodes)))


def nodes_from_density(density, a, b, n):
    """``n`` nodes on ``[a, b]`` whose local spacing is inversely proportional to ``density``.

    ``density`` is a positive callable; node ``k`` sits where the integrated
    density reaches ``(k + 1/2)/n`` of its total.
    """
    grid = np.linspace(a, b, 4096)
    rho = np.asarray(density(grid), dtype=float)
    if np.any(rho <= 0):
        raise InvalidProfile("density must be positive")
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(grid))])
    return np.interp((np.arange(n) + 0.5) / n * cum[-1], cum, grid)


def varying_rate_demo(nodes, weights=None) -> CradleConfig:
    """Cradle whose ``mu = 0`` lattice is exactly ``nodes``.

    ``S = diag(nodes)`` and ``v`` has the given weights (uniform by default).
    Shaping the kernel through ``v`` is left to experiment.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 1 or nodes.size < 2 or np.any(np.diff(nodes) <= 0):
        raise InvalidProfile("nodes must be a strictly ascending sequence of length >= 2")
    if weights is None:
        weights = np.ones(nodes.size)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != nodes.shape or np.any(weights <= 0):
        raise InvalidProfile("weights must be positive, one per node")
    return cradle_from_spectrum(nodes, np.sqrt(weights))
