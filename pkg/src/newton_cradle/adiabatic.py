"""Spectral-gap diagnostics for adiabatic schedules ``H(t) = S + (t/T) R``.

Covers satisfiability cost Hamiltonians, gap trajectories along the linear
interpolation, and the per-step narrowing test: switching on
``mu |v><v|`` narrows the gap above the ground state ``|g>`` iff
``mu (|<g|v>|^2 - |<e|v>|^2) > 0``.

Basis convention: computational state ``b`` assigns ``x_i = (b >> (i-1)) & 1``
to variable ``i`` (1-based), so ``x_1`` is the least significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .composer import rank_one_decompose
from .core import SpectralDecomposition, check_hermitian, eigendecompose
from .exceptions import AmbiguousGap, DimensionCapExceeded, InputError

MAX_VARS = 12
GAP_TOL = 1e-10
MARGINAL_TOL = 1e-10
DEFAULT_GRID = np.linspace(0.0, 1.0, 201)


class Literal(NamedTuple):
    var: int        # 1-based
    negated: bool


@dataclass(frozen=True)
class SatInstance:
    num_vars: int
    clauses: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_vars < 1:
            raise InputError("need at least one variable")
        clauses = tuple(tuple(Literal(int(l[0]), bool(l[1])) for l in c) for c in self.clauses)
        for c in clauses:
            if not 1 <= len(c) <= 3:
                raise InputError(f"clause {c} must have 1 to 3 literals")
            vars_ = [l.var for l in c]
            if len(set(vars_)) != len(vars_):
                raise InputError(f"clause {c} repeats a variable")
            if min(vars_) < 1 or max(vars_) > self.num_vars:
                raise InputError(f"clause {c} references a variable outside 1..{self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_ints(cls, num_vars, clauses):
        """Clauses as DIMACS-style signed integers, e.g. ``[(1, 2, -3)]``."""
        return cls(num_vars, tuple(tuple(Literal(abs(x), x < 0) for x in c) for c in clauses))

    def to_dimacs(self):
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        for c in self.clauses:
            lines.append(" ".join(str(-l.var if l.negated else l.var) for l in c) + " 0")
        return "\n".join(lines) + "\n"


def parse_dimacs(text) -> SatInstance:
    """Read the CNF subset used here: comments, one ``p cnf`` line, clauses ending in 0."""
    num_vars = None
    clauses, current = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad problem line: {line!r}")
            num_vars = int(parts[2])
            continue
        if num_vars is None:
            raise InputError("clause before the 'p cnf' line")
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(x)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        raise InputError("missing 'p cnf' line")
    return SatInstance.from_ints(num_vars, clauses)


def random_3sat(num_vars, num_clauses, rng) -> SatInstance:
    clauses = []
    for _ in range(num_clauses):
        vars_ = rng.choice(num_vars, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3)
        clauses.append(tuple(Literal(int(v), bool(s)) for v, s in zip(vars_, signs)))
    return SatInstance(num_vars, tuple(clauses))


def violation_counts(inst: SatInstance) -> np.ndarray:
    """Number of violated clauses for every assignment ``b``."""
    if inst.num_vars > MAX_VARS:
        raise DimensionCapExceeded(f"{inst.num_vars} variables exceeds the cap of {MAX_VARS}")
    b = np.arange(2**inst.num_vars)
    counts = np.zeros(b.size)
    for c in inst.clauses:
        # A clause is violated when every literal is false: x_var == negated.
        violated = np.ones(b.size, dtype=bool)
        for lit in c:
            violated &= ((b >> (lit.var - 1)) & 1) == int(lit.negated)
        counts += violated
    return counts


def build_3sat_hamiltonian(inst: SatInstance) -> np.ndarray:
    """Diagonal ``H_C``: sum of projectors onto each clause's violating assignments."""
    return np.diag(violation_counts(inst))


def mixer_hamiltonian(num_vars, kind="uniform", fields=None) -> np.ndarray:
    """Starting Hamiltonian whose ground state is the uniform superposition.

    ``uniform``: ``1 - |+><+|`` (the negative uniform projector shifted to be
    positive semidefinite). ``transverse``: ``sum_i h_i (1 - X_i)/2``, with
    ``fields`` giving ``h_i`` (default all 1).
    """
    dim = 2**num_vars
    if kind == "uniform":
        plus = np.full(dim, 1 / np.sqrt(dim))
        return np.eye(dim) - np.outer(plus, plus)
    if kind == "transverse":
        fields = np.ones(num_vars) if fields is None else np.asarray(fields, dtype=float)
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        H = np.zeros((dim, dim))
        for i in range(num_vars):
            # variable i+1 is bit i, which is the (num_vars - 1 - i)-th kron factor
            op = np.array([[1.0]])
            for j in reversed(range(num_vars)):
                op = np.kron(op, (np.eye(2) - X) / 2 if j == i else np.eye(2))
            H += fields[i] * op
        return H
    raise InputError(f"unknown mixer kind {kind!r}")


def _cluster(evals, k, tol):
    return np.flatnonzero(np.abs(evals - evals[k]) <= tol)


@dataclass(frozen=True)
class AdiabaticSchedule:
    grid: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    degenerate: np.ndarray     # ground level degenerate at this point
    transition: np.ndarray     # |<E2|H_C - H_S|E1>| per point

    @property
    def gap(self):
        return self.E2 - self.E1

    @property
    def g_min(self):
        return float(np.min(self.gap))

    @property
    def t_min(self):
        return float(self.grid[int(np.argmin(self.gap))])

    @property
    def a(self):
        return float(np.max(self.transition))


def gap_trajectory(H_S, H_C, grid=None) -> AdiabaticSchedule:
    """Ground and first excited energies of ``(1 - t) H_S + t H_C`` on ``grid``.

    A degenerate ground level is flagged and reported with gap 0, not raised.
    When the first excited level is degenerate the transition element is
    taken over its whole eigenspace, ``||P_e R |E1>||``.
    """
    H_S, H_C = check_hermitian(H_S), check_hermitian(H_C)
    if H_S.shape != H_C.shape:
        raise InputError("H_S and H_C differ in dimension")
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    R = H_C - H_S
    E1, E2 = np.empty(grid.size), np.empty(grid.size)
    flags = np.zeros(grid.size, dtype=bool)
    trans = np.empty(grid.size)
    for i, t in enumerate(grid):
        H = (1 - t) * H_S + t * H_C
        evals, evecs = np.linalg.eigh(H)
        tol = GAP_TOL * max(1.0, float(np.max(np.abs(evals))))
        E1[i] = evals[0]
        gap = evals[1] - evals[0]
        g = evecs[:, 0]
        if gap < tol:
            flags[i] = True
            E2[i] = evals[0]
            trans[i] = abs(evecs[:, 1].conj() @ R @ g)
        else:
            E2[i] = evals[1]
            P = evecs[:, _cluster(evals, 1, tol)]
            trans[i] = np.linalg.norm(P.conj().T @ (R @ g))
    return AdiabaticSchedule(grid, E1, E2, flags, trans)


@dataclass(frozen=True)
class NarrowingReport:
    narrows: bool
    lhs: float            # |<g|v>|^2 = dE1/dmu
    rhs: float            # |<e|v>|^2 = dE2/dmu (one-sided if |e> is degenerate)
    marginal: bool
    mu: float
    excited_multiplicity: int = 1

    def to_dict(self):
        return {
            "narrows": self.narrows,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "marginal": self.marginal,
            "mu": self.mu,
            "excited_multiplicity": self.excited_multiplicity,
        }


def narrowing_criterion(state: SpectralDecomposition, step) -> NarrowingReport:
    """Does switching on ``mu |v><v|`` narrow the gap above the ground state?

    Narrows iff ``mu * (|<g|v>|^2 - |<e|v>|^2) > 0``: for a positive weight
    the ground level must climb faster, for a negative one it must descend
    slower. If the first excited level is ``k``-fold degenerate the relevant
    speed is the one of the lowest level in that cluster, which is 0 for
    ``mu > 0`` (``k >= 2``) and ``||P_e v||^2`` for ``mu < 0``.
    """
    mu, v = step
    v = np.asarray(v, dtype=complex)
    evals, evecs = state.eigenvalues, state.eigenvectors
    tol = GAP_TOL * max(1.0, float(np.max(np.abs(evals))))
    if evals[1] - evals[0] < tol:
        raise AmbiguousGap(f"ground gap {evals[1] - evals[0]:.3e} below {tol:.3e}")
    lhs = float(abs(evecs[:, 0].conj() @ v) ** 2)
    cluster = _cluster(evals, 1, tol)
    c = evecs[:, cluster].conj().T @ v
    if cluster.size == 1 or mu < 0:
        rhs = float(np.sum(np.abs(c) ** 2))
    else:
        rhs = 0.0
    marginal = abs(lhs - rhs) < MARGINAL_TOL
    narrows = (not marginal) and mu * (lhs - rhs) > 0
    return NarrowingReport(bool(narrows), lhs, rhs, bool(marginal), float(mu), int(cluster.size))


def ground_gap(H):
    evals = np.linalg.eigvalsh(H)
    return float(evals[1] - evals[0])


def fd_gap_slope(H, mu, v, h=1e-6):
    """One-sided finite difference of the ground gap along ``sign(mu) |v><v|``, per unit weight."""
    d = np.sign(mu) * h
    P = np.outer(v, np.conj(v))
    return (ground_gap(H + d * P) - ground_gap(H)) / d


@dataclass(frozen=True)
class StepReport:
    index: int
    mu: float
    criterion: NarrowingReport | None   # None when the ground level was degenerate
    gap_before: float
    gap_after: float
    fd_slope: float

    @property
    def gap_change(self):
        return self.gap_after - self.gap_before

    @property
    def consistent(self):
        """Criterion agrees with the sign of the finite-difference slope."""
        if self.criterion is None or self.criterion.marginal:
            return None
        return bool(self.criterion.narrows == (np.sign(self.mu) * self.fd_slope < 0))

    def to_dict(self):
        return {
            "j": self.index,
            "mu": self.mu,
            "criterion": None if self.criterion is None else self.criterion.to_dict(),
            "ground_velocity": None if self.criterion is None else self.criterion.lhs,
            "excited_velocity": None if self.criterion is None else self.criterion.rhs,
            "gap_before": self.gap_before,
            "gap_after": self.gap_after,
            "gap_change": self.gap_change,
            "fd_slope": self.fd_slope,
            "consistent": self.consistent,
        }


def stepped_schedule(H_S, H_C, order=None, fd_step=1e-6):
    """Switch on ``R = H_C - H_S`` one projector at a time and test every step.

    Each step is evaluated at its start with a dense eigendecomposition of
    the current Hamiltonian, because mixers and cost Hamiltonians are
    routinely degenerate.
    """
    H_S, H_C = check_hermitian(H_S), check_hermitian(H_C)
    terms = rank_one_decompose(H_C - H_S)
    if order is not None:
        terms = [terms[i] for i in order]
    H = H_S.copy()
    reports = []
    for j, (mu, v) in enumerate(terms):
        state = eigendecompose(H, strict=False)
        try:
            crit = narrowing_criterion(state, (mu, v))
        except AmbiguousGap:
            crit = None
        before = ground_gap(H)
        slope = fd_gap_slope(H, mu, v, fd_step)
        H = H + mu * np.outer(v, v.conj())
        reports.append(StepReport(j, mu, crit, before, ground_gap(H), slope))
    return reports
