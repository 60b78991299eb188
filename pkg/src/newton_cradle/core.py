"""Matrix validation, dense eigendecomposition and cradle construction.

Operators are plain ``numpy`` arrays (complex128). The two record types here
are frozen dataclasses; nothing in the package mutates them after
construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateSpectrum, InvalidAnchor, NotHermitian, NotUnitary

HERMITIAN_RTOL = 1e-12
UNITARY_TOL = 1e-12
NORM_TOL = 1e-12
DEGENERACY_RTOL = 1e-10
FREEZE_TOL = 1e-10


def check_hermitian(H, rtol=HERMITIAN_RTOL):
    """Return ``H`` as a complex square array, raising if it is not Hermitian."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {H.shape}")
    if H.shape[0] < 2:
        raise NotHermitian("dimension must be at least 2")
    scale = np.max(np.abs(H)) if H.size else 0.0
    err = np.max(np.abs(H - H.conj().T))
    if err > rtol * scale:
        raise NotHermitian(f"max |H - H^dagger| = {err:.3e} exceeds {rtol * scale:.3e}")
    return H


def check_unitary(U, tol=UNITARY_TOL):
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {U.shape}")
    if U.shape[0] < 2:
        raise NotUnitary("dimension must be at least 2")
    err = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if err > tol:
        raise NotUnitary(f"max |U^dagger U - 1| = {err:.3e} exceeds {tol:.3e}")
    return U


def check_unit_vector(v, dim, tol=NORM_TOL):
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != dim:
        raise InvalidAnchor(f"vector has length {v.shape[0]}, expected {dim}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise InvalidAnchor(f"vector norm {norm!r} is not 1 within {tol}")
    return v


def fix_phases(vectors):
    """Rotate each column so its largest-magnitude entry is real and positive."""
    vectors = np.array(vectors, dtype=complex)
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    @property
    def spread(self):
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def matrix(self):
        X = self.eigenvectors
        return (X * self.eigenvalues) @ X.conj().T

    def is_strict(self):
        return _smallest_gap(self.eigenvalues)[1] >= _degeneracy_threshold(self.eigenvalues)


def _degeneracy_threshold(eigenvalues):
    spread = float(eigenvalues[-1] - eigenvalues[0])
    return DEGENERACY_RTOL * spread


def _smallest_gap(eigenvalues):
    gaps = np.diff(eigenvalues)
    k = int(np.argmin(gaps))
    return k, float(gaps[k])


def check_nondegenerate(eigenvalues):
    """Raise ``DegenerateSpectrum`` if two adjacent eigenvalues are too close.

    The threshold is relative to the spread of the spectrum, so a spectrum
    with all eigenvalues equal is always rejected.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    k, gap = _smallest_gap(eigenvalues)
    threshold = _degeneracy_threshold(eigenvalues)
    if gap < threshold or gap <= 0.0:
        raise DegenerateSpectrum((k, k + 1), gap, threshold)


def eigendecompose(H, strict=True):
    """Dense eigendecomposition of a Hermitian matrix.

    With ``strict`` (the default) a degenerate spectrum raises
    ``DegenerateSpectrum`` naming the colliding pair of (0-based) levels.
    """
    H = check_hermitian(H)
    evals, evecs = np.linalg.eigh(H)
    if strict:
        check_nondegenerate(evals)
    return SpectralDecomposition(evals, fix_phases(evecs))


@dataclass(frozen=True)
class CradleConfig:
    """A Hermitian cradle ``S + mu |v><v|`` described in the eigenbasis of ``S``.

    ``coeffs[n]`` is ``<s_n|v>``; ``frozen`` holds the (0-based) levels whose
    coefficient magnitude is at or below ``FREEZE_TOL``. Those levels never
    move and are left out of every secular sum.
    """

    base: SpectralDecomposition
    coeffs: np.ndarray
    frozen: frozenset = field(default_factory=frozenset)

    @property
    def dim(self):
        return self.base.dim

    @property
    def eigenvalues(self):
        return self.base.eigenvalues

    @property
    def weights(self):
        return np.abs(self.coeffs) ** 2

    @property
    def active(self):
        return np.array([n for n in range(self.dim) if n not in self.frozen], dtype=int)

    @property
    def anchor(self):
        """The direction ``|v>`` in the ambient basis."""
        return self.base.eigenvectors @ self.coeffs

    def signed_coeffs(self):
        """Real coefficients of ``|v>`` in the kernel-aligned basis.

        Active level ``k`` (0-based position among the active levels) gets
        ``(-1)**(k+1) * |v_n|``; frozen levels get 0.
        """
        out = np.zeros(self.dim)
        for k, n in enumerate(self.active):
            out[n] = (-1) ** (k + 1) * abs(self.coeffs[n])
        return out

    def aligned_basis(self):
        """Base eigenvectors rephased so that ``<s_n|v>`` equals ``signed_coeffs()``.

        In this basis every overlap between eigenvectors of cradle members is
        real and given by the signed kernel.
        """
        target = self.signed_coeffs()
        phases = np.ones(self.dim, dtype=complex)
        for n in self.active:
            phases[n] = np.sign(target[n]) * self.coeffs[n] / abs(self.coeffs[n])
        return self.base.eigenvectors * phases

    def matrix(self, mu=0.0):
        v = self.anchor
        return self.base.matrix() + mu * np.outer(v, v.conj())


def make_cradle(base, v, freeze_tol=FREEZE_TOL):
    """Build a cradle from a strict decomposition of ``S`` and a unit vector ``v``."""
    if not isinstance(base, SpectralDecomposition):
        base = eigendecompose(base)
    check_nondegenerate(base.eigenvalues)
    v = check_unit_vector(v, base.dim)
    coeffs = base.eigenvectors.conj().T @ v
    frozen = frozenset(int(n) for n in np.flatnonzero(np.abs(coeffs) <= freeze_tol))
    if len(frozen) == base.dim:
        raise InvalidAnchor("vector is orthogonal to every eigenvector")
    return CradleConfig(base, coeffs, frozen)


def cradle_from_spectrum(eigenvalues, coeffs, freeze_tol=FREEZE_TOL):
    """Cradle with ``S = diag(eigenvalues)``; ``coeffs`` is normalised here."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    coeffs = np.asarray(coeffs, dtype=complex)
    order = np.argsort(eigenvalues)
    eigenvalues, coeffs = eigenvalues[order], coeffs[order]
    base = SpectralDecomposition(eigenvalues, np.eye(len(eigenvalues), dtype=complex))
    norm = np.linalg.norm(coeffs)
    if not np.isfinite(norm) or norm == 0.0:
        raise InvalidAnchor("coefficient vector must be finite and nonzero")
    return make_cradle(base, coeffs / norm, freeze_tol)


def random_hermitian(n, rng, scale=1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (A + A.conj().T) / 2


def random_unit_vector(n, rng):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_unitary(n, rng):
    """Haar-distributed unitary via QR with the diagonal phase fix."""
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
