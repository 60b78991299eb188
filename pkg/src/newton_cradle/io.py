"""File formats: matrix/vector JSON, CSV tables and report JSON.

Every float is written with 17 significant digits so that reading our own
output back is lossless. Infinite parameter values are written as ``inf``.
"""
from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

from .exceptions import InputError

FMT = "{:.17g}"


def fmt(x):
    return FMT.format(float(x))


def _as_real_array(obj, key):
    try:
        return np.asarray(obj[key], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"missing or malformed field {key!r}") from exc


def matrix_from_json(obj) -> np.ndarray:
    """``{"dim": N, "re": [[...]], "im": [[...]]}``, row-major; ``im`` optional."""
    if not isinstance(obj, dict):
        raise InputError("matrix JSON must be an object")
    re = _as_real_array(obj, "re")
    im = _as_real_array(obj, "im") if "im" in obj else np.zeros_like(re)
    if re.ndim != 2 or re.shape != im.shape or re.shape[0] != re.shape[1]:
        raise InputError(f"matrix parts must be square and equal in shape, got {re.shape} and {im.shape}")
    if "dim" in obj and int(obj["dim"]) != re.shape[0]:
        raise InputError(f"dim {obj['dim']} does not match a {re.shape[0]}x{re.shape[0]} matrix")
    return re + 1j * im


def vector_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InputError("vector JSON must be an object")
    re = _as_real_array(obj, "re")
    im = _as_real_array(obj, "im") if "im" in obj else np.zeros_like(re)
    if re.ndim != 1 or re.shape != im.shape:
        raise InputError("vector parts must be 1-d and equal in length")
    return re + 1j * im


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}


def vector_to_json(v):
    v = np.asarray(v, dtype=complex)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def load_matrix(path):
    return matrix_from_json(load_json(path))


def load_vector(path):
    return vector_from_json(load_json(path))


def dumps_json(obj):
    """JSON with floats at full precision (``repr`` round-trips)."""
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def csv_text(header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([x if isinstance(x, str) else fmt(x) for x in row])
    return buf.getvalue()


def read_csv(text):
    """Parse one of our CSV tables into ``(header, float array)``."""
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows:
        raise InputError("empty CSV")
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)


def trajectory_csv(traj):
    N = traj.eigenvalues.shape[1]
    header = ["mu"] + [f"s_{n}" for n in range(1, N + 1)] + [f"vel_{n}" for n in range(1, N + 1)]
    rows = (np.concatenate([[m], e, v]) for m, e, v in zip(traj.mu, traj.eigenvalues, traj.velocities))
    return csv_text(header, rows)


def kernel_csv(s, rows):
    N = rows.shape[1]
    header = ["s"] + [f"k_{n}" for n in range(1, N + 1)]
    return csv_text(header, (np.concatenate([[x], r]) for x, r in zip(s, rows)))


def phase_csv(alphas, phases, mus):
    """``mus`` holds ``MuValue``s; the one at ``alpha*`` is written as ``inf``."""
    N = phases.shape[1]
    header = ["alpha"] + [f"phase_{n}" for n in range(1, N + 1)] + ["mu"]
    rows = []
    for a, p, m in zip(alphas, phases, mus):
        mu = fmt(m.value) if m.is_finite else ("inf" if m.infinite > 0 else "-inf")
        rows.append([fmt(a)] + [fmt(x) for x in p] + [mu])
    return csv_text(header, rows)


def reconstruction_csv(s, f):
    f = np.asarray(f)
    if np.iscomplexobj(f):
        return csv_text(["s", "f", "f_im"], zip(s, f.real, f.imag))
    return csv_text(["s", "f"], zip(s, f))


def schedule_csv(schedule):
    return csv_text(
        ["t", "E1", "E2", "gap"],
        zip(schedule.grid, schedule.E1, schedule.E2, schedule.gap),
    )
