"""Build the eigensystem of ``S + R`` as a chain of rank-one cradle steps.

``R`` is split into weighted projectors ``mu_j |v_j><v_j|``. Each step solves
one cradle in the current eigenbasis and moves the basis with the signed
kernel, so eigenvectors are carried as an explicit change-of-basis product.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CradleConfig,
    FREEZE_TOL,
    SpectralDecomposition,
    _degeneracy_threshold,
    _smallest_gap,
    check_hermitian,
    eigendecompose,
    fix_phases,
)
from .exceptions import IntermediateDegeneracy
from .kernel import basis_matrix_from_roots
from .secular import solve

RANK_TOL = 1e-14
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class CradleStep:
    index: int
    mu: float
    direction: np.ndarray           # <lambda_n|v_j> in the eigenbasis before the step
    eigenvalues_before: np.ndarray
    result: SpectralDecomposition

    @property
    def min_gap(self):
        return float(np.min(np.diff(self.result.eigenvalues)))

    def to_dict(self):
        return {
            "j": self.index,
            "mu": self.mu,
            "eigenvalues_before": self.eigenvalues_before.tolist(),
            "eigenvalues_after": self.result.eigenvalues.tolist(),
            "min_gap": self.min_gap,
        }


def rank_one_decompose(R, tol=RANK_TOL):
    """Split Hermitian ``R`` into ``[(mu_j, v_j)]`` with orthonormal ``v_j``.

    Weights with ``|mu| <= tol * ||R||_2`` are dropped, so ``R = 0`` gives an
    empty list. Ordered by descending ``|mu|``.
    """
    R = check_hermitian(R)
    mus, vecs = np.linalg.eigh(R)
    scale = np.max(np.abs(mus))
    if scale == 0.0:
        return []
    keep = np.flatnonzero(np.abs(mus) > tol * scale)
    keep = keep[np.argsort(-np.abs(mus[keep]), kind="stable")]
    vecs = fix_phases(vecs)
    return [(float(mus[j]), vecs[:, j]) for j in keep]


def recoefficient(cradle: CradleConfig, mu: float, v_next, roots=None):
    """Coefficients of ``v_next`` in the eigenbasis of ``S + mu vv^dagger``.

    ``v_next`` is given by its coefficients in the cradle's aligned base
    basis; the result is ``Q @ v_next`` with ``Q[n, r] = <s_n(mu)|s_r>``.
    """
    roots = solve(cradle, [mu]) if roots is None else roots
    Q = basis_matrix_from_roots(cradle, roots)
    return Q @ np.asarray(v_next, dtype=complex)


def mgs(X):
    """Modified Gram-Schmidt on the columns of ``X``."""
    X = np.array(X, dtype=complex)
    for j in range(X.shape[1]):
        for i in range(j):
            X[:, j] -= (X[:, i].conj() @ X[:, j]) * X[:, i]
        X[:, j] /= np.linalg.norm(X[:, j])
    return X


def _check_step(step, evals):
    k, gap = _smallest_gap(evals)
    if gap < _degeneracy_threshold(evals) or gap <= 0:
        raise IntermediateDegeneracy(step, (k, k + 1), gap)


def _cradle_step(evals, basis, mu, v):
    """One cradle step in the current basis. Returns new (evals, basis, coeffs)."""
    c = basis.conj().T @ v
    amp = np.abs(c)
    frozen = frozenset(int(n) for n in np.flatnonzero(amp <= FREEZE_TOL))
    # The cradle lives in the current eigenbasis, which is the identity here.
    base = SpectralDecomposition(evals, np.eye(len(evals), dtype=complex))
    cradle = CradleConfig(base, c / np.linalg.norm(c), frozen)
    roots = solve(cradle, [mu])
    Q = basis_matrix_from_roots(cradle, roots)
    # Columns of basis @ aligned_basis are the base vectors with <s_n|v> real.
    aligned = basis @ cradle.aligned_basis()
    new_basis = aligned @ Q.T
    new_evals = roots.values[0]
    order = np.argsort(new_evals, kind="stable")
    return new_evals[order], new_basis[:, order], c


def _run(S, steps, check_orthogonality=True):
    base = S if isinstance(S, SpectralDecomposition) else eigendecompose(S)
    evals = base.eigenvalues.copy()
    basis = base.eigenvectors.copy()
    log = []
    for j, (mu, v) in enumerate(steps):
        before = evals.copy()
        evals, basis, c = _cradle_step(evals, basis, mu, v)
        _check_step(j, evals)
        if check_orthogonality:
            drift = np.max(np.abs(basis.conj().T @ basis - np.eye(len(evals))))
            if drift > ORTHO_TOL:
                basis = mgs(basis)
        log.append(CradleStep(j, mu, c, before, SpectralDecomposition(evals, fix_phases(basis))))
    return SpectralDecomposition(evals, fix_phases(basis)), log


def compose_sum(S, R, order=None, jitter=False, rng=None, weight_scale=1.0):
    """Eigensystem of ``S + R`` from cradle steps; returns ``(decomposition, steps)``.

    ``order`` permutes the rank-one terms (default: descending ``|mu|``).
    Raises ``IntermediateDegeneracy`` if a step produces a degenerate
    spectrum, unless ``jitter`` is set, in which case the weights get uniform
    noise of size ``1e-10 * ||S||_2`` and the chain is retried once.
    ``weight_scale`` multiplies every weight, giving ``S + weight_scale * R``.
    """
    S = check_hermitian(S)
    terms = [(weight_scale * mu, v) for mu, v in rank_one_decompose(R)]
    if order is not None:
        terms = [terms[i] for i in order]
    try:
        return _run(S, terms)
    except IntermediateDegeneracy:
        if not jitter or not terms:
            raise
    rng = rng if rng is not None else np.random.default_rng(0)
    size = 1e-10 * np.linalg.norm(S, 2)
    terms = [(mu + rng.uniform(-size, size), v) for mu, v in terms]
    return _run(S, terms)


def partial_sum_trace(S, R, t, **kwargs):
    """Eigenvalues of ``S + t R`` with every cradle weight scaled by ``t``."""
    if t == 0:
        return eigendecompose(S).eigenvalues
    return compose_sum(S, R, weight_scale=t, **kwargs)[0].eigenvalues
