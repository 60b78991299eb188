"""Eigenvalues of ``S + mu |v><v|`` from the secular equation.

Every updated eigenvalue solves ``sum_m w_m / (s - s_m) = 1/mu`` with
``w_m = |<s_m|v>|**2``. Roots are bracketed between consecutive poles and
found by safeguarded Newton iteration. Each root is stored as an offset
``tau`` from a nearby pole (its *origin*), which keeps differences
``s - s_m`` accurate even when the root sits extremely close to a pole; the
overlap kernel relies on that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import CradleConfig, SpectralDecomposition, eigendecompose, make_cradle

_EPS = np.finfo(float).eps
_MAXITER = 200
_BISECT_FRACTION = 1e-3


@dataclass(frozen=True)
class MuValue:
    """An extended real: finite ``value`` or a signed infinite sentinel.

    ``infinite`` is 0 for finite values and +1/-1 for the sentinels.
    ``at_pole`` marks ``mu == 0`` obtained because ``s`` hit a base
    eigenvalue exactly.
    """

    value: float
    infinite: int = 0
    at_pole: bool = False

    @property
    def is_finite(self):
        return self.infinite == 0

    def __float__(self):
        if self.infinite:
            return math.copysign(math.inf, self.infinite)
        return self.value


POS_INF = MuValue(0.0, infinite=1)
NEG_INF = MuValue(0.0, infinite=-1)


class Roots(NamedTuple):
    """Solved eigenvalues on a batch of parameter values.

    All arrays are ``(G, N)`` and indexed by level. ``values = s[origin] + tau``.
    Frozen levels have ``origin == level`` and ``tau == 0``.
    """

    values: np.ndarray
    origin: np.ndarray
    tau: np.ndarray


def balanced_sum(terms, dist):
    """Sum ``terms`` along the last axis, farthest-from-pole terms first."""
    order = np.argsort(-np.abs(dist), axis=-1, kind="stable")
    return np.sum(np.take_along_axis(terms, order, axis=-1), axis=-1)


def _sorted_offsets(poles, weights):
    """Per origin ``o``, offsets ``p_m - p_o`` and weights ordered farthest first.

    The origin's own entry (offset 0) lands in the last column with weight 0.
    """
    delta = poles[None, :] - poles[:, None]
    order = np.argsort(-np.abs(delta), axis=1, kind="stable")
    d = np.take_along_axis(delta, order, axis=1)
    w = weights[order]
    w[:, -1] = 0.0
    return d, w


def _secular_pieces(tau, origin, poles, weights, offsets=None):
    """Return ``(w_o, rest, rest2)`` for roots expressed relative to ``origin``.

    ``rest = sum_{m != o} w_m / (tau - d_m)`` and
    ``rest2 = sum_{m != o} w_m / (tau - d_m)**2`` with ``d_m = p_m - p_o``,
    summed farthest pole first.
    """
    D, W = _sorted_offsets(poles, weights) if offsets is None else offsets
    diff = tau[..., None] - D[origin]
    diff[..., -1] = 1.0
    w = W[origin]
    q = w / diff
    return weights[origin], np.sum(q, axis=-1), np.sum(q / diff, axis=-1)


def _iterate(poles, weights, target, origin, lo, hi, x, live, polish=False):
    """Safeguarded Newton on ``g(tau) = tau * h(tau)`` inside ``(lo, hi)``.

    ``h(tau) = sum_m w_m/(tau - d_m) - target`` is strictly decreasing on the
    bracket; ``g`` removes the pole at the origin. Zero is always an endpoint
    of the bracket, so ``sign(h) = sign(g) * sign(tau)``. Bisection runs until
    the bracket is a small fraction of its initial width, unless ``polish``.
    Only lanes flagged ``live`` are touched.
    """
    x, lo, hi = x.copy(), lo.copy(), hi.copy()
    idx = np.flatnonzero(live)
    xs, los, his = x.flat[idx], lo.flat[idx], hi.flat[idx]
    org, tgt = origin.flat[idx], target.flat[idx]
    width0 = np.full(xs.shape, np.inf) if polish else his - los
    offsets = _sorted_offsets(poles, weights)
    for _ in range(_MAXITER):
        if idx.size == 0:
            break
        w_o, rest, rest2 = _secular_pieces(xs, org, poles, weights, offsets)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = w_o + xs * (rest - tgt)
            dg = rest - tgt - xs * rest2
            newton = xs - g / dg
        h_pos = (g * np.sign(xs)) > 0
        los = np.where(h_pos, xs, los)
        his = np.where(h_pos, his, xs)
        ok = (his - los <= _BISECT_FRACTION * width0) & (newton > los) & (newton < his)
        x_new = np.where(ok, newton, 0.5 * (los + his))
        done = (
            (np.abs(x_new - xs) <= 2 * _EPS * np.abs(x_new))
            | (his - los <= 2 * _EPS * np.maximum(np.abs(los), np.abs(his)))
            | (g == 0)
        )
        xs = np.where(g != 0, x_new, xs)
        x.flat[idx], lo.flat[idx], hi.flat[idx] = xs, los, his
        keep = ~done
        idx, xs, los, his = idx[keep], xs[keep], los[keep], his[keep]
        org, tgt, width0 = org[keep], tgt[keep], width0[keep]
    return x, lo, hi


def secular_roots(poles, weights, target):
    """Solve ``sum_m w_m/(s - p_m) = target`` for a batch of targets.

    ``poles`` must be strictly ascending and ``weights`` positive. ``target``
    is ``1/mu``; use ``np.inf`` (either sign) for ``mu == 0``. For
    ``target == 0`` the first ``K-1`` outputs are the asymptotes and the last
    is NaN (it sits at infinity).

    Returns ``(origin, tau)`` arrays of shape ``(G, K)``; the roots are
    ``poles[origin] + tau``.
    """
    poles = np.asarray(poles, dtype=float)
    weights = np.asarray(weights, dtype=float)
    target = np.atleast_1d(np.asarray(target, dtype=float))
    K = poles.shape[0]
    G = target.shape[0]
    total = float(np.sum(weights))
    k = np.broadcast_to(np.arange(K), (G, K))
    t = np.broadcast_to(target[:, None], (G, K))
    gaps = np.diff(poles)
    right = np.concatenate([gaps, [np.nan]])          # p_{k+1} - p_k
    left = np.concatenate([[np.nan], -gaps])          # p_{k-1} - p_k

    origin = k.copy()
    zero_mu = np.isinf(t)
    up = (t >= 0) & ~zero_mu
    with np.errstate(divide="ignore"):
        reach = total / t
    hi = np.where(up, np.where(k < K - 1, right[k], reach), 0.0)
    lo = np.where(up | zero_mu, 0.0, np.where(k > 0, left[k], reach))
    at_infinity = (t == 0) & (k == K - 1)
    single = (K == 1) & ~zero_mu & ~at_infinity
    live = ~zero_mu & ~at_infinity & ~single
    hi = np.where(live, hi, 0.0)
    lo = np.where(live, lo, 0.0)
    x0 = 0.5 * (lo + hi)
    tau, lo, hi = _iterate(poles, weights, t, origin, lo, hi, x0, live)

    # Re-anchor roots that ended closer to the far end of their bracket so that
    # the distance to that pole is carried to full relative precision.
    far = np.where(up, k + 1, k - 1)
    far_ok = live & (far >= 0) & (far < K)
    far_c = np.clip(far, 0, K - 1)
    shift = poles[far_c] - poles[k]
    switch = far_ok & (np.abs(tau) > 0.5 * np.abs(shift))
    if switch.any():
        origin = np.where(switch, far_c, origin)
        tau = np.where(switch, tau - shift, tau)
        lo2 = np.where(switch, lo - shift, lo)
        hi2 = np.where(switch, hi - shift, hi)
        tau, _, _ = _iterate(poles, weights, t, origin, lo2, hi2, tau, switch, polish=True)

    tau = np.where(single, weights[0] / np.where(single, t, 1.0), tau)
    tau = np.where(zero_mu, 0.0, tau)
    tau = np.where(at_infinity, np.nan, tau)
    return origin, tau


def _targets(mus):
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    if not np.all(np.isfinite(mus)):
        raise ValueError("mu must be finite")
    with np.errstate(divide="ignore"):
        return mus, np.where(mus == 0, np.inf, 1.0 / np.where(mus == 0, 1.0, mus))


def solve(cradle: CradleConfig, mus) -> Roots:
    """Eigenvalues of ``S + mu vv^dagger`` for every ``mu`` in ``mus``.

    Levels are labelled by continuity in ``mu``: active levels keep their
    base index and frozen levels stay put, so after a frozen level is
    crossed the output row is no longer sorted.
    """
    mus, target = _targets(mus)
    s = cradle.eigenvalues
    A = cradle.active
    G, N = mus.shape[0], cradle.dim
    origin_a, tau_a = secular_roots(s[A], cradle.weights[A], target)
    origin = np.broadcast_to(np.arange(N), (G, N)).copy()
    tau = np.zeros((G, N))
    origin[:, A] = A[origin_a]
    tau[:, A] = tau_a
    values = s[origin] + tau
    return Roots(values, origin, tau)


def eigenvalues_at(cradle: CradleConfig, mu: float) -> np.ndarray:
    return solve(cradle, [mu]).values[0]


def secular_sum(cradle: CradleConfig, s: float) -> float:
    """``sum_m |v_m|**2 / (s - s_m)`` over the active levels."""
    A = cradle.active
    d = s - cradle.eigenvalues[A]
    return float(balanced_sum(cradle.weights[A] / d, d))


def mu_of_s(cradle: CradleConfig, s: float) -> MuValue:
    """The weight ``mu`` for which ``s`` is an eigenvalue of ``S + mu vv^dagger``.

    Returns ``MuValue(0, at_pole=True)`` when ``s`` equals an active base
    eigenvalue and ``POS_INF`` when ``s`` is an asymptote.
    """
    A = cradle.active
    if np.any(cradle.eigenvalues[A] == s):
        return MuValue(0.0, at_pole=True)
    f = secular_sum(cradle, s)
    if f == 0.0:
        return POS_INF
    return MuValue(1.0 / f)


@dataclass(frozen=True)
class Asymptotes:
    """Limits ``s*_k`` of the active levels as ``mu -> +inf``.

    ``values[k]`` lies strictly between active poles ``k`` and ``k+1``.
    """

    values: np.ndarray
    levels: np.ndarray  # active level indices, one more than values

    def bounds(self):
        """Per active level, the open interval ``(s*_{k-1}, s*_k)`` it lives in.

        The outer ends are +-inf; these are for comparisons only.
        """
        lower = np.concatenate([[-np.inf], self.values])
        upper = np.concatenate([self.values, [np.inf]])
        return lower, upper


def asymptotes(cradle: CradleConfig) -> Asymptotes:
    A = cradle.active
    s = cradle.eigenvalues[A]
    origin, tau = secular_roots(s, cradle.weights[A], np.array([0.0]))
    values = s[origin[0, :-1]] + tau[0, :-1]
    return Asymptotes(values, A)


def _velocity(w_o, rest, rest2, tau):
    num = (w_o + tau * rest) ** 2
    den = w_o + tau**2 * rest2
    return num / den


def velocity_at(cradle: CradleConfig, s: float) -> float:
    """``ds/dmu`` of the eigenvalue passing through ``s``.

    Evaluated relative to the nearest active pole, so at ``s = s_n`` it
    returns ``|v_n|**2`` without a limit computation. Zero at an asymptote.
    """
    A = cradle.active
    p = cradle.eigenvalues[A]
    o = int(np.argmin(np.abs(s - p)))
    tau = np.array([s - p[o]])
    w_o, rest, rest2 = _secular_pieces(tau, np.array([o]), p, cradle.weights[A])
    return float(_velocity(w_o, rest, rest2, tau)[0])


def velocities(cradle: CradleConfig, roots: Roots) -> np.ndarray:
    """Velocities of every level for already solved ``roots``; frozen levels get 0."""
    A = cradle.active
    p = cradle.eigenvalues[A]
    pos = np.full(cradle.dim, -1)
    pos[A] = np.arange(len(A))
    vel = np.zeros(roots.values.shape)
    o = pos[roots.origin[:, A]]
    t = roots.tau[:, A]
    finite = np.isfinite(t)
    t0 = np.where(finite, t, 0.0)
    w_o, rest, rest2 = _secular_pieces(t0, o, p, cradle.weights[A])
    vel[:, A] = np.where(finite, _velocity(w_o, rest, rest2, t0), 0.0)
    return vel


def velocities_at(cradle: CradleConfig, mu: float) -> np.ndarray:
    return velocities(cradle, solve(cradle, [mu]))[0]


@dataclass(frozen=True)
class Trajectory:
    mu: np.ndarray
    eigenvalues: np.ndarray  # (G, N), labelled by continuity
    velocities: np.ndarray   # (G, N)


def trajectory(cradle: CradleConfig, mu_grid) -> Trajectory:
    mu_grid = np.asarray(mu_grid, dtype=float)
    roots = solve(cradle, mu_grid)
    return Trajectory(mu_grid, roots.values, velocities(cradle, roots))


def interlace_by_deletion(S, r: int) -> np.ndarray:
    """Eigenvalues of ``S`` with row and column ``r`` deleted, via asymptotes.

    Uses the cradle with ``v = e_r``. Levels orthogonal to ``e_r`` are frozen;
    their eigenvalues belong to the deleted matrix as well and are merged in.
    """
    base = S if isinstance(S, SpectralDecomposition) else eigendecompose(S)
    e = np.zeros(base.dim, dtype=complex)
    e[r] = 1.0
    cradle = make_cradle(base, e)
    frozen = cradle.eigenvalues[sorted(cradle.frozen)]
    return np.sort(np.concatenate([asymptotes(cradle).values, frozen]))


@dataclass(frozen=True)
class Crossing:
    lower: int       # level below at mu_before
    upper: int
    mu_before: float
    mu_after: float


@dataclass(frozen=True)
class PredictedCrossing:
    frozen: int
    mover: int
    mu: float


@dataclass(frozen=True)
class RepulsionReport:
    min_gaps: np.ndarray           # signed minimum of s_{n+1}(mu) - s_n(mu)
    crossings: tuple
    predicted: tuple


def predicted_crossings(cradle: CradleConfig):
    """Where an active level passes each frozen one, from ``mu = 1/f(s_m)``."""
    out = []
    A = cradle.active
    s = cradle.eigenvalues
    for m in sorted(cradle.frozen):
        mu = mu_of_s(cradle, s[m])
        if not mu.is_finite or mu.at_pole:
            continue
        if mu.value > 0:
            below = A[s[A] < s[m]]
            mover = int(below[-1])
        else:
            above = A[s[A] > s[m]]
            mover = int(above[0])
        out.append(PredictedCrossing(m, mover, mu.value))
    return tuple(out)


def detect_level_repulsion(cradle: CradleConfig, mu_grid) -> RepulsionReport:
    """Scan ``mu_grid`` for eigenvalue crossings.

    Only frozen levels can be crossed; the report lists the crossings seen on
    the grid next to the ones predicted analytically.
    """
    mu_grid = np.sort(np.asarray(mu_grid, dtype=float))
    vals = solve(cradle, mu_grid).values
    N = cradle.dim
    min_gaps = np.min(np.diff(vals, axis=1), axis=0)
    crossings = []
    for i in range(N):
        for j in range(i + 1, N):
            d = vals[:, j] - vals[:, i]
            flips = np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:]))
            for g in flips:
                lower, upper = (i, j) if d[g] > 0 else (j, i)
                crossings.append(Crossing(lower, upper, float(mu_grid[g]), float(mu_grid[g + 1])))
    return RepulsionReport(min_gaps, tuple(crossings), predicted_crossings(cradle))
