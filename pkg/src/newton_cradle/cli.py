"""Command-line front end.

Exit codes: 0 on success, 1 on numerical failure (degeneracy and friends),
2 on bad input. Diagnostics go to stderr, data to stdout or ``--out``.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .adiabatic import (
    SatInstance,
    build_3sat_hamiltonian,
    gap_trajectory,
    mixer_hamiltonian,
    parse_dimacs,
    random_3sat,
    stepped_schedule,
)
from .composer import compose_sum
from .core import FREEZE_TOL, check_hermitian, make_cradle
from .exceptions import InputError, NumericalError
from .kernel import overlap_rows
from .sampling import SampledSignal, reconstruct, sample
from .secular import asymptotes, trajectory
from .unitary import alpha_of_mu, eigenphase_trajectory, make_unitary_cradle, mu_of_alpha


def _number(tok):
    tok = tok.strip()
    if tok.endswith("pi"):
        coeff = tok[:-2]
        return (float(coeff) if coeff not in ("", "+", "-") else float(coeff + "1")) * np.pi
    return float(tok)


def parse_grid(text):
    """``a:b:n`` -> ``n`` uniform points from ``a`` to ``b`` inclusive; ``2pi`` style allowed."""
    try:
        a, b, n = text.split(":")
        a, b, n = _number(a), _number(b), int(n)
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}, expected a:b:n") from exc
    if n < 1 or not (np.isfinite(a) and np.isfinite(b)):
        raise InputError(f"grid {text!r} must have n >= 1 and finite bounds")
    return np.linspace(a, b, n)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"{out}: {exc.strerror}") from exc


def _cradle(args):
    return make_cradle(io.load_matrix(args.matrix), io.load_vector(args.vector), freeze_tol=args.tol)


def cmd_trace(args):
    cradle = _cradle(args)
    traj = trajectory(cradle, parse_grid(args.grid))
    _emit(io.trajectory_csv(traj), args.out)
    side = args.asymptotes or (args.out + ".asymptotes.json" if args.out else None)
    if side:
        a = asymptotes(cradle)
        _emit(io.dumps_json({"asymptotes": a.values.tolist(), "levels": a.levels.tolist()}), side)


def cmd_kernel(args):
    cradle = _cradle(args)
    s = parse_grid(args.grid)
    _emit(io.kernel_csv(s, overlap_rows(cradle, s)), args.out)


def cmd_phase(args):
    U = io.load_matrix(args.matrix)
    uc = make_unitary_cradle(U, io.load_vector(args.vector))
    alphas = parse_grid(args.grid)
    # Make sure the divergence of mu shows up as its own row.
    if alphas.min() <= uc.alpha_star <= alphas.max() and not np.any(alphas == uc.alpha_star):
        alphas = np.sort(np.append(alphas, uc.alpha_star))
    phases = eigenphase_trajectory(uc, alphas)
    mus = [mu_of_alpha(uc, a) for a in alphas]
    _emit(io.phase_csv(alphas, phases, mus), args.out)
    if args.check_roundtrip:
        worst = max(
            (abs(alpha_of_mu(uc, m.value) - a) for a, m in zip(alphas, mus) if m.is_finite and 0 < a < 2 * np.pi),
            default=0.0,
        )
        print(f"alpha(mu(alpha)) max deviation: {worst:.3e}", file=sys.stderr)


def cmd_compose(args):
    S = check_hermitian(io.load_matrix(args.matrix))
    R = check_hermitian(io.load_matrix(args.update))
    order = [int(x) for x in args.order.split(",")] if args.order else None
    rng = np.random.default_rng(args.seed)
    dec, steps = compose_sum(S, R, order=order, jitter=args.jitter, rng=rng)
    report = {
        "eigenvalues_initial": np.linalg.eigvalsh(S).tolist(),
        "steps": [s.to_dict() for s in steps],
        "eigenvalues": dec.eigenvalues.tolist(),
    }
    _emit(io.dumps_json(report), args.out)


def cmd_sample(args):
    cradle = _cradle(args)
    f = io.load_vector(args.signal)
    sig = sample(f, cradle, args.mu)
    _emit(io.dumps_json(sig.to_dict()), args.out)


def cmd_reconstruct(args):
    cradle = _cradle(args)
    obj = io.load_json(args.samples)
    try:
        sig = SampledSignal.from_dict(obj, cradle)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.samples}: not a signal JSON ({exc})") from exc
    if sig.nodes.size != cradle.dim:
        raise InputError("signal length does not match the cradle dimension")
    s = sig.nodes if args.grid is None else parse_grid(args.grid)
    _emit(io.reconstruction_csv(s, reconstruct(sig, s)), args.out)


def _instance(args):
    if args.cnf is not None:
        try:
            with open(args.cnf) as fh:
                return parse_dimacs(fh.read())
        except OSError as exc:
            raise InputError(f"{args.cnf}: {exc.strerror}") from exc
        except ValueError as exc:
            raise InputError(f"{args.cnf}: {exc}") from exc
    if args.random_vars is None:
        raise InputError("give a CNF file or --random-vars")
    rng = np.random.default_rng(args.seed)
    return random_3sat(args.random_vars, args.random_clauses, rng)


def cmd_anneal(args):
    inst: SatInstance = _instance(args)
    H_C = build_3sat_hamiltonian(inst)
    H_S = mixer_hamiltonian(inst.num_vars, args.mixer)
    grid = None if args.grid is None else parse_grid(args.grid)
    if grid is not None and (grid.min() < 0 or grid.max() > 1):
        raise InputError("anneal grid must lie in [0, 1]")
    sched = gap_trajectory(H_S, H_C, grid)
    _emit(io.schedule_csv(sched), args.out)
    if args.report:
        steps = stepped_schedule(H_S, H_C)
        report = {
            "num_vars": inst.num_vars,
            "num_clauses": len(inst.clauses),
            "mixer": args.mixer,
            "g_min": sched.g_min,
            "t_min": sched.t_min,
            "a": sched.a,
            "degenerate_points": int(np.sum(sched.degenerate)),
            "steps": [s.to_dict() for s in steps],
        }
        _emit(io.dumps_json(report), args.report)


def build_parser():
    p = argparse.ArgumentParser(prog="newton-cradle", description="Rank-one spectral dynamics toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid_default=None):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--tol", type=float, default=FREEZE_TOL, help="freeze tolerance for |<s_n|v>|")
        sp.add_argument("--seed", type=int, default=0)
        if grid_default is not False:
            sp.add_argument("--grid", default=grid_default, help="a:b:n")

    sp = sub.add_parser("trace", help="eigenvalue trajectories s_n(mu)")
    sp.add_argument("matrix")
    sp.add_argument("vector")
    sp.add_argument("--asymptotes", help="sidecar JSON path (default: OUT.asymptotes.json)")
    common(sp, "-10:10:201")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("kernel", help="signed overlap kernel <s|s_n>")
    sp.add_argument("matrix")
    sp.add_argument("vector")
    common(sp, "-5:5:1001")
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("phase", help="eigenphase trajectories of the unitary cradle")
    sp.add_argument("matrix", help="unitary matrix JSON")
    sp.add_argument("vector", help="anchor vector JSON")
    sp.add_argument("--check-roundtrip", action="store_true")
    common(sp, "0:2pi:201")
    sp.set_defaults(func=cmd_phase)

    sp = sub.add_parser("compose", help="eigensystem of S + R by rank-one steps")
    sp.add_argument("matrix")
    sp.add_argument("update")
    sp.add_argument("--order", help="comma-separated step permutation")
    sp.add_argument("--jitter", action="store_true", help="retry once with jittered weights on degeneracy")
    common(sp, False)
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("sample", help="sample a vector on the lattice of S + mu vv^dagger")
    sp.add_argument("matrix")
    sp.add_argument("vector")
    sp.add_argument("signal", help="vector JSON of the signal")
    sp.add_argument("--mu", type=float, default=0.0)
    common(sp, False)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("reconstruct", help="reconstruct a sampled signal")
    sp.add_argument("matrix")
    sp.add_argument("vector")
    sp.add_argument("samples", help="signal JSON written by 'sample'")
    common(sp, None)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("anneal", help="gap analysis for a 3-SAT cost Hamiltonian")
    sp.add_argument("cnf", nargs="?")
    sp.add_argument("--random-vars", type=int)
    sp.add_argument("--random-clauses", type=int, default=5)
    sp.add_argument("--mixer", choices=["uniform", "transverse"], default="uniform")
    sp.add_argument("--report", help="step report JSON path")
    common(sp, None)
    sp.set_defaults(func=cmd_anneal)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
