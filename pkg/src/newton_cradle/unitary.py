"""Unitary cradles ``U(alpha) = (1 + (e^{i alpha} - 1)|w><w|) U`` and the Cayley bridge.

The Cayley transform ``S = -i (U + 1)(U - 1)^{-1}`` shares eigenvectors with
``U`` and maps eigenvalues by ``u = (s - i)/(s + i)``. Ascending ``s`` means
counterclockwise phase from 1, so level ordering carries over unchanged.
Phases are reported in ``[0, 2*pi)`` via ``phase = 2*atan2(1, -s)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CradleConfig,
    SpectralDecomposition,
    check_hermitian,
    check_unit_vector,
    check_unitary,
    eigendecompose,
    make_cradle,
)
from .exceptions import CayleySingular
from .kernel import basis_matrix_from_roots
from .secular import POS_INF, MuValue, Roots, secular_roots

CAYLEY_GAP = 1e-10


def cayley_to_unitary(S) -> np.ndarray:
    """``U = (S - i)(S + i)^{-1}``; never singular for Hermitian ``S``."""
    S = check_hermitian(S)
    eye = np.eye(S.shape[0])
    # (S - i)(S + i)^{-1} = ((S + i)^{-dagger} (S - i)^dagger)^dagger and
    # S - i, S + i commute, so a left solve is equivalent.
    return np.linalg.solve(S + 1j * eye, S - 1j * eye)


def cayley_to_hermitian(U) -> np.ndarray:
    """``S = -i (U + 1)(U - 1)^{-1}``, raising ``CayleySingular`` near eigenvalue 1."""
    U = check_unitary(U)
    eye = np.eye(U.shape[0])
    gap = np.min(np.abs(np.linalg.eigvals(U) - 1.0))
    if gap < CAYLEY_GAP:
        raise CayleySingular(f"U has an eigenvalue within {gap:.3e} of 1")
    # U + 1 and U - 1 commute.
    S = -1j * np.linalg.solve(U - eye, U + eye)
    return (S + S.conj().T) / 2


def phase_of(s):
    """Phase in ``[0, 2*pi)`` of the Cayley image of the real ``s``."""
    return 2.0 * np.arctan2(1.0, -np.asarray(s, dtype=float))


def mobius(s):
    s = np.asarray(s, dtype=float)
    return (s - 1j) / (s + 1j)


@dataclass(frozen=True)
class UnitaryCradle:
    U: np.ndarray
    anchor: np.ndarray              # |w>
    base: SpectralDecomposition     # of the Cayley transform S; columns are |u_n>
    coeffs: np.ndarray              # w_n = <u_n|w>
    cradle: CradleConfig            # S + mu |v><v|
    norm_v: float                   # N_v
    alpha_star: float

    @property
    def dim(self):
        return self.base.dim

    @property
    def eigenvalues(self):
        return mobius(self.base.eigenvalues)

    @property
    def phases(self):
        return phase_of(self.base.eigenvalues)

    @property
    def scale(self):
        """``sum_m |w_m|^2 (s_m^2 + 1)``, which is ``4 N_v^2``."""
        s = self.base.eigenvalues
        return float(np.sum(np.abs(self.coeffs) ** 2 * (s**2 + 1)))

    @property
    def mean_s(self):
        """``sum_k |w_k|^2 s_k``."""
        return float(np.sum(np.abs(self.coeffs) ** 2 * self.base.eigenvalues))


def make_unitary_cradle(U, w) -> UnitaryCradle:
    U = check_unitary(U)
    w = check_unit_vector(w, U.shape[0])
    base = eigendecompose(cayley_to_hermitian(U))
    coeffs = base.eigenvectors.conj().T @ w
    s = base.eigenvalues
    c2 = float(np.sum(np.abs(coeffs) ** 2 * (s**2 + 1)))
    v_coeffs = coeffs * (s + 1j) / (1j * math.sqrt(c2))
    v = base.eigenvectors @ v_coeffs
    cradle = make_cradle(base, v / np.linalg.norm(v))
    mean = float(np.sum(np.abs(coeffs) ** 2 * s))
    alpha_star = 2.0 * math.atan2(1.0, mean)
    return UnitaryCradle(U, w, base, coeffs, cradle, math.sqrt(c2) / 2, alpha_star)


def u_of_alpha(uc: UnitaryCradle, alpha: float) -> np.ndarray:
    w = uc.anchor
    return uc.U + (np.exp(1j * alpha) - 1.0) * np.outer(w, w.conj() @ uc.U)


def anchor_v_from_w(uc: UnitaryCradle):
    """``|v> = N_v^{-1} (1 - U)^{-1} |w>`` and its coefficients ``v_n``.

    The inverse is applied in the eigenbasis: ``v_n = w_n / (N_v (1 - u_n))``.
    """
    v_n = uc.coeffs / (uc.norm_v * (1.0 - uc.eigenvalues))
    return uc.base.eigenvectors @ v_n, v_n


def anchor_w_from_v(s, v_n):
    """Inverse coefficient map ``w_m = (i/(s_m + i)) v_m / sqrt(sum_k |v_k|^2/(s_k^2+1))``."""
    s = np.asarray(s, dtype=float)
    v_n = np.asarray(v_n, dtype=complex)
    norm = math.sqrt(float(np.sum(np.abs(v_n) ** 2 / (s**2 + 1))))
    return 1j / (s + 1j) * v_n / norm


def _half_angle(alpha):
    return math.sin(alpha / 2.0), math.cos(alpha / 2.0)


def mu_of_alpha(uc: UnitaryCradle, alpha: float) -> MuValue:
    """``mu(alpha) = C / (cot(alpha/2) - m)`` with ``C = sum |w|^2 (s^2+1)``, ``m = sum |w|^2 s``.

    Written as ``C sin / (cos - m sin)`` so nothing overflows near 0 or 2*pi.
    Returns ``POS_INF`` at ``alpha = alpha*``.
    """
    alpha = math.fmod(alpha, 2 * math.pi)
    if alpha < 0:
        alpha += 2 * math.pi
    if alpha == 0.0:
        return MuValue(0.0)
    sn, cs = _half_angle(alpha)
    den = cs - uc.mean_s * sn
    if abs(den) <= 4 * np.finfo(float).eps * (abs(cs) + abs(uc.mean_s * sn)):
        return POS_INF
    return MuValue(uc.scale * sn / den)


def mu_of_alpha_v(uc: UnitaryCradle, alpha: float) -> float:
    """The same map written with the ``v`` coefficients instead of ``w``."""
    s = uc.base.eigenvalues
    wv = uc.cradle.weights
    a = float(np.sum(wv / (s**2 + 1)))
    b = float(np.sum(wv * s / (s**2 + 1)))
    sn, cs = _half_angle(alpha)
    return sn / (a * cs - b * sn)


def alpha_of_mu(uc: UnitaryCradle, mu) -> float:
    """Inverse of ``mu_of_alpha`` with values in ``[0, 2*pi)``; ``POS_INF`` maps to ``alpha*``."""
    if isinstance(mu, MuValue):
        if not mu.is_finite:
            return uc.alpha_star
        mu = mu.value
    if mu == 0:
        return 0.0
    return 2.0 * math.atan2(abs(mu), math.copysign(1.0, mu) * (uc.scale + uc.mean_s * mu))


def _alpha_target(uc, alphas):
    """``(cot(alpha/2) - m) / C`` which is ``1/mu``; ``inf`` at ``alpha == 0``."""
    alphas = np.mod(np.asarray(alphas, dtype=float), 2 * np.pi)
    sn, cs = np.sin(alphas / 2), np.cos(alphas / 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (cs - uc.mean_s * sn) / (uc.scale * sn)
    return alphas, np.where(alphas == 0, np.inf, t)


def solve_alpha(uc: UnitaryCradle, alphas) -> Roots:
    """Cayley preimages ``s_n(alpha)`` labelled as Hermitian levels.

    Solves ``sum_m |w_m|^2 (s_m^2+1)/(s - s_m) + m = cot(alpha/2)``, which is
    the secular equation with ``1/mu = (cot(alpha/2) - m)/C``. At
    ``alpha = alpha*`` the top level sits at infinity and its entry is NaN.
    """
    alphas, target = _alpha_target(uc, alphas)
    cr = uc.cradle
    s = cr.eigenvalues
    A = cr.active
    G, N = len(alphas), cr.dim
    w_scaled = np.abs(uc.coeffs[A]) ** 2 * (s[A] ** 2 + 1) / uc.scale
    origin_a, tau_a = secular_roots(s[A], w_scaled, target)
    origin = np.broadcast_to(np.arange(N), (G, N)).copy()
    tau = np.zeros((G, N))
    origin[:, A] = A[origin_a]
    tau[:, A] = tau_a
    return Roots(s[origin] + tau, origin, tau)


def _relabel(uc, alphas, values):
    """Shift Hermitian labels to continuity in ``alpha``.

    Past ``alpha*`` the root Hermitian level ``k+1`` holds is the continuation
    of unitary level ``k`` (and the lowest root continues the top level, which
    went through infinity).
    """
    A = uc.cradle.active
    out = values.copy()
    past = np.mod(alphas, 2 * np.pi) > uc.alpha_star
    rolled = values[:, np.roll(A, -1)]
    out[np.ix_(past, A)] = rolled[past]
    return out


def eigenphases_at(uc: UnitaryCradle, alpha) -> np.ndarray:
    """Phases of ``u_n(alpha)`` in ``[0, 2*pi)``, level ``n`` tracked continuously from ``u_n``."""
    return eigenphase_trajectory(uc, [alpha])[0]


def eigenphase_trajectory(uc: UnitaryCradle, alphas) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=float)
    roots = solve_alpha(uc, alphas)
    phases = phase_of(np.where(np.isnan(roots.values), np.inf, roots.values))
    phases = np.where(np.isnan(roots.values), 0.0, phases)
    return _relabel(uc, alphas, phases)


def overlap_with_anchor(uc: UnitaryCradle, alpha: float) -> np.ndarray:
    """``|<u_n(alpha)|w>|^2`` per level, from the signed kernel (continuity labels)."""
    roots = solve_alpha(uc, [alpha])
    bad = np.isnan(roots.tau)
    Q = basis_matrix_from_roots(uc.cradle, Roots(roots.values, roots.origin, np.where(bad, 0.0, roots.tau)))
    s = uc.base.eigenvalues
    # w in the aligned basis: w_r = N_v (1 - u_r) v_r with v_r real signed.
    w_aligned = uc.norm_v * (1.0 - mobius(s)) * uc.cradle.signed_coeffs()
    for m in uc.cradle.frozen:
        w_aligned[m] = uc.coeffs[m]
    amp = np.abs(Q @ w_aligned) ** 2
    if bad.any():
        # The level at infinity is the Cayley preimage of u = 1.
        amp[bad[0]] = 1.0 - np.sum(amp[~bad[0]])
    return _relabel(uc, np.array([alpha]), amp[None, :])[0]


def complex_velocity(uc: UnitaryCradle, n: int, alpha: float) -> complex:
    """``du_n/dalpha`` from the closed-form velocity equation.

    ``i u_n / |e^{i alpha} - 1|^2 * (sum_m |w_m|^2 / |u_n(alpha) - u_m|^2)^{-1}``,
    with chord lengths computed from real preimages,
    ``|u(a) - u(b)| = 2|a - b| / sqrt((a^2+1)(b^2+1))``, so the ``alpha -> 0``
    limit ``i |w_n|^2 u_n`` comes out without cancellation.
    """
    if n in uc.cradle.frozen:
        return 0j
    phases = eigenphases_at(uc, alpha)
    u_n = np.exp(1j * phases[n])
    if math.fmod(alpha, 2 * math.pi) == 0.0:
        return complex(1j * abs(uc.coeffs[n]) ** 2 * u_n)
    roots = solve_alpha(uc, [alpha])
    labels = _relabel(uc, np.array([alpha]), np.arange(uc.dim, dtype=float)[None, :])[0].astype(int)
    k = labels[n]
    s = uc.base.eigenvalues
    A = uc.cradle.active
    o = roots.origin[0, k]
    tau = roots.tau[0, k]
    if np.isnan(tau):
        # u_n(alpha) = 1: chord |1 - u_m| = 2/sqrt(s_m^2+1).
        total = np.sum(np.abs(uc.coeffs[A]) ** 2 * (s[A] ** 2 + 1) / 4)
    else:
        diff = tau - (s[A] - s[o])
        s_n = s[o] + tau
        total = np.sum(
            np.abs(uc.coeffs[A]) ** 2 * (s_n**2 + 1) * (s[A] ** 2 + 1) / (4 * diff**2)
        )
    speed = 1.0 / (4 * math.sin(alpha / 2) ** 2 * total)
    return complex(1j * speed * u_n)


def real_velocity(uc: UnitaryCradle, n: int, alpha: float) -> float:
    """``ds_n/dalpha = 1/(2 sin^2(alpha/2)) (sum_m |w_m|^2 (s_m^2+1)/(s_n - s_m)^2)^{-1}``."""
    roots = solve_alpha(uc, [alpha])
    s = uc.base.eigenvalues
    A = uc.cradle.active
    o, tau = roots.origin[0, n], roots.tau[0, n]
    if math.fmod(alpha, 2 * math.pi) == 0.0:
        return float(np.abs(uc.coeffs[n]) ** 2 * (s[n] ** 2 + 1) / 2)
    diff = tau - (s[A] - s[o])
    total = np.sum(np.abs(uc.coeffs[A]) ** 2 * (s[A] ** 2 + 1) / diff**2)
    return float(1.0 / (2 * math.sin(alpha / 2) ** 2 * total))


def match_phases(reference, candidates):
    """Reorder ``candidates`` to the nearest phase of each ``reference`` entry.

    Greedy nearest matching on the circle; used to follow dense eigensolver
    output along a refinement grid.
    """
    reference = np.asarray(reference, dtype=float)
    candidates = list(np.asarray(candidates, dtype=float))
    out = np.empty_like(reference)
    dist = lambda a, b: abs(math.remainder(a - b, 2 * math.pi))
    for i in np.argsort([min(dist(r, c) for c in candidates) for r in reference]):
        j = min(range(len(candidates)), key=lambda j: dist(reference[i], candidates[j]))
        out[i] = candidates.pop(j)
    return out


def track_phases_dense(uc: UnitaryCradle, alpha: float, max_step=None) -> np.ndarray:
    """Eigenphases of ``U(alpha)`` from dense eigensolves, followed from ``alpha = 0``.

    Steps are at most ``pi/(8N)`` and levels are matched to the nearest phase.
    """
    N = uc.dim
    step = max_step or math.pi / (8 * N)
    count = max(1, int(math.ceil(alpha / step)))
    current = np.mod(uc.phases, 2 * np.pi)
    for a in np.linspace(0.0, alpha, count + 1)[1:]:
        ph = np.mod(np.angle(np.linalg.eigvals(u_of_alpha(uc, a))), 2 * np.pi)
        current = match_phases(current, ph)
    return current
