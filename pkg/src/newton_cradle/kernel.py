"""Overlaps ``<s|s_n>`` between cradle eigenvectors and the base eigenbasis.

The signed kernel is real and continuous in ``s`` when the base eigenvectors
are taken in the cradle's aligned basis (see ``CradleConfig.aligned_basis``),
where ``<s_n|v> = (-1)**n |v_n|`` with ``n`` counted from 1 among the active
levels. Every evaluation is done relative to a nearby pole so the removable
singularity at ``s = s_n`` needs no special threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CradleConfig
from .secular import Roots, solve


@dataclass(frozen=True)
class KernelEvaluation:
    s: float
    row: np.ndarray        # signed overlaps <s|s_n>
    magnitude: np.ndarray  # |<s|s_n>| from the magnitude formula


def _nearest_origin(cradle, s):
    A = cradle.active
    s = np.atleast_1d(np.asarray(s, dtype=float))
    p = cradle.eigenvalues[A]
    o = np.argmin(np.abs(s[:, None] - p[None, :]), axis=1)
    return A[o], s - p[o]


def _ratios(cradle, origin, tau):
    """``tau / (s - s_m)`` for active ``m`` (1 at the origin), shape ``(G, K)``."""
    A = cradle.active
    s = cradle.eigenvalues
    diff = tau[:, None] - (s[A][None, :] - s[origin][:, None])
    own = A[None, :] == origin[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(own, 1.0, tau[:, None] / np.where(own, 1.0, diff))
    return ratio, np.where(own, tau[:, None], diff)


def _signed_rows(cradle, origin, tau):
    A = cradle.active
    amp = np.abs(cradle.coeffs[A])
    ratio, diff = _ratios(cradle, origin, tau)
    norm = np.sqrt(np.sum(amp**2 * ratio**2, axis=1))
    position = np.arange(1, len(A) + 1)
    o_pos = np.searchsorted(A, origin) + 1
    below = np.sum(diff > 0, axis=1)
    sigma = np.where(tau == 0, (-1.0) ** o_pos, np.sign(tau) * (-1.0) ** below)
    rows = np.zeros((len(tau), cradle.dim))
    rows[:, A] = (-1.0) ** position * amp * ratio * (sigma / norm)[:, None]
    return rows


def overlap_rows(cradle: CradleConfig, s) -> np.ndarray:
    """Signed kernel rows ``<s|s_n>`` for each ``s``; shape ``(len(s), N)``.

    Frozen levels get zero columns: a cradle eigenvector of an active level
    never overlaps a frozen eigenvector.
    """
    origin, tau = _nearest_origin(cradle, s)
    return _signed_rows(cradle, origin, tau)


def overlap_row(cradle: CradleConfig, s: float, canonical: bool = False) -> np.ndarray:
    """Signed kernel row at one ``s``.

    ``canonical`` flips the overall sign so the largest entry is positive,
    which is the convention for reporting a standalone vector. The
    continuous convention is the default.
    """
    row = overlap_rows(cradle, [s])[0]
    if canonical and row[np.argmax(np.abs(row))] < 0:
        row = -row
    return row


def overlap_signed(cradle: CradleConfig, s: float, n: int) -> float:
    return float(overlap_row(cradle, s)[n])


def overlap_magnitudes(cradle: CradleConfig, s) -> np.ndarray:
    """``|v_n| / |s - s_n| * (sum_m |v_m|^2/(s - s_m)^2)^(-1/2)`` per level."""
    A = cradle.active
    origin, tau = _nearest_origin(cradle, s)
    ratio, _ = _ratios(cradle, origin, tau)
    amp = np.abs(cradle.coeffs[A])
    norm = np.sqrt(np.sum(amp**2 * ratio**2, axis=1))
    out = np.zeros((len(tau), cradle.dim))
    out[:, A] = amp * np.abs(ratio) / norm[:, None]
    return out


def overlap_magnitude(cradle: CradleConfig, s: float, n: int) -> float:
    return float(overlap_magnitudes(cradle, [s])[0, n])


def evaluate_kernel(cradle: CradleConfig, s: float) -> KernelEvaluation:
    return KernelEvaluation(float(s), overlap_row(cradle, s), overlap_magnitudes(cradle, [s])[0])


def basis_matrix_from_roots(cradle: CradleConfig, roots: Roots, index: int = 0) -> np.ndarray:
    """``Q[n, r] = <s_n(mu)|s_r>`` for one solved parameter value.

    Rows of active levels come from the signed kernel at the root, using the
    root's own origin offset; rows of frozen levels are unit rows.
    """
    N = cradle.dim
    Q = np.zeros((N, N))
    A = cradle.active
    Q[A] = _signed_rows(cradle, roots.origin[index, A], roots.tau[index, A])
    for m in cradle.frozen:
        Q[m, m] = 1.0
    return Q


def basis_matrix(cradle: CradleConfig, mu: float) -> np.ndarray:
    return basis_matrix_from_roots(cradle, solve(cradle, [mu]))


def basis_row(cradle: CradleConfig, mu: float, n: int) -> np.ndarray:
    return basis_matrix(cradle, mu)[n]
