"""Import/export for wavefunctions, ensembles and reports.

Wavefunction CSV has columns ``x, re, im`` on a uniform grid.  The binary
format is a fixed little-endian header (magic, version, point count, x_min,
dx, hbar, mass) followed by interleaved ``re, im`` doubles.
"""

import csv
import json
import math
import struct

import numpy as np

from .ensemble import ParticleEnsemble
from .errors import InvalidInputError
from .grid import GridWavefunction

MAGIC = b"FMWF"
VERSION = 1
_HEADER = struct.Struct("<4sIQdddd")

SCHEMA = 1


def write_wavefunction_csv(path, psi):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for x, a in zip(psi.x, psi.amplitudes):
            w.writerow([repr(float(x)), repr(float(a.real)), repr(float(a.imag))])


def read_wavefunction_csv(path, hbar=1.0, mass=1.0):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"x", "re", "im"} <= set(rows[0]):
        raise InvalidInputError(f"{path}: expected columns x, re, im")
    x = np.array([float(r["x"]) for r in rows])
    amp = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    if x.size < 2:
        raise InvalidInputError(f"{path}: need at least two grid points")
    dx = np.diff(x)
    if not np.allclose(dx, dx[0], rtol=1e-9, atol=0.0) or dx[0] <= 0:
        raise InvalidInputError(f"{path}: grid must be uniform and increasing")
    step = (x[-1] - x[0]) / (x.size - 1)
    return GridWavefunction(amp, float(x[0]), float(step), hbar, mass)


def write_wavefunction_binary(path, psi):
    head = _HEADER.pack(MAGIC, VERSION, psi.size, psi.x_min, psi.dx, psi.hbar, psi.mass)
    payload = np.ascontiguousarray(psi.amplitudes, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(payload)


def read_wavefunction_binary(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise InvalidInputError(f"{path}: truncated header")
    magic, version, n, x_min, dx, hbar, mass = _HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION:
        raise InvalidInputError(f"{path}: not a version-{VERSION} wavefunction file")
    body = raw[_HEADER.size:]
    if len(body) != 16 * n:
        raise InvalidInputError(f"{path}: payload holds {len(body)} bytes, expected {16 * n}")
    amp = np.frombuffer(body, dtype="<c16").astype(np.complex128)
    return GridWavefunction(amp, x_min, dx, hbar, mass)


def read_wavefunction(path, hbar=1.0, mass=1.0):
    """Dispatch on extension: ``.csv`` is text, anything else the binary format."""
    if str(path).lower().endswith(".csv"):
        return read_wavefunction_csv(path, hbar, mass)
    return read_wavefunction_binary(path)


def write_ensemble_csv(path, e):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "p"])
        for x, p in zip(e.positions, e.momenta):
            w.writerow([repr(float(x)), repr(float(p))])


def read_ensemble_csv(path, mass=1.0):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"x", "p"} <= set(rows[0]):
        raise InvalidInputError(f"{path}: expected columns x, p")
    return ParticleEnsemble([float(r["x"]) for r in rows], [float(r["p"]) for r in rows], mass)


def _clean(obj):
    # numpy scalars/arrays to plain Python; non-finite floats to strings
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def dumps(obj):
    """Deterministic JSON: sorted keys, fixed indentation."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
