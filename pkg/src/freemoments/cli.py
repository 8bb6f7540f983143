"""Command-line front end.

    freemoments analyze skew_gaussian b=0.671
    freemoments evolve gaussian --order 2 --format csv --out gauss.csv
    freemoments classify --moments 0,-0.1006,0,0.02666
    freemoments verify classical --seed 7
    freemoments ensemble particles.csv --order 4

Exit codes: 0 success, 1 usage, 2 numeric or convergence failure,
3 verification failure.
"""

import argparse
import csv
import io as _stdio
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import families as fam
from . import io as fio
from . import suites
from .ensemble import (ParticleEnsemble, classical_omega4, drift, ensemble_moments,
                       random_ensemble)
from .errors import (BoundaryOverflowError, DegenerateTopMomentError, InvalidInputError,
                     MomentError)
from .geometry import classify, special_case_topzero
from .grid import (GridWavefunction, centroid_state, free_propagate, measure_moments,
                   shape_metrics, snap_negligible)
from .inequalities import full_report
from .moments import MomentVector, invariants, propagate, reference_time
from .wigner import wigner_moment_vector

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3

WIGNER_MAX_POINTS = 1024


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2; usage errors here are 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

DEFAULT_CONFIG = {
    "hbar": 1.0,
    "mass": 1.0,
    "length_scale": 1.0,
    "grid": {"points": None, "extent": None},
    "time": {"start": None, "stop": None, "steps": 61},
    "output": {"format": None, "path": None},
}


def load_config(path):
    """Read a YAML or JSON config; unknown top-level keys are rejected."""
    with open(path) as fh:
        text = fh.read()
    if path.lower().endswith(".json"):
        data = json.loads(text)
    else:
        import yaml

        data = yaml.safe_load(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config must be a mapping")
    unknown = set(data) - set(DEFAULT_CONFIG)
    if unknown:
        raise UsageError(f"{path}: unknown config keys {sorted(unknown)}")
    return data


def resolve_config(args):
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    if args.config:
        try:
            user = load_config(args.config)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        for key, val in user.items():
            if isinstance(cfg[key], dict):
                if not isinstance(val, dict):
                    raise UsageError(f"config key {key!r} must be a mapping")
                extra = set(val) - set(cfg[key])
                if extra:
                    raise UsageError(f"unknown keys under {key!r}: {sorted(extra)}")
                cfg[key].update(val)
            else:
                cfg[key] = val
    for key in ("hbar", "mass", "length_scale"):
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if args.format:
        cfg["output"]["format"] = args.format
    if args.out:
        cfg["output"]["path"] = args.out
    _validate(cfg)
    return cfg


def _validate(cfg):
    for key in ("hbar", "mass", "length_scale"):
        v = cfg[key]
        if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
            raise UsageError(f"{key} must be a positive number, got {v!r}")
    g = cfg["grid"]
    if g["points"] is not None:
        p = g["points"]
        if not (isinstance(p, int) and p >= 256 and p & (p - 1) == 0):
            raise UsageError(f"grid.points must be a power of two >= 256, got {p!r}")
    if g["extent"] is not None and not (g["extent"] > 0):
        raise UsageError(f"grid.extent must be positive, got {g['extent']!r}")
    if int(cfg["time"]["steps"]) < 2:
        raise UsageError("time.steps must be >= 2")
    fmt = cfg["output"]["format"]
    if fmt not in (None, "csv", "json"):
        raise UsageError(f"output.format must be csv or json, got {fmt!r}")


def units(cfg):
    return {"hbar": float(cfg["hbar"]), "mass": float(cfg["mass"]),
            "length_scale": float(cfg["length_scale"])}


# ---------------------------------------------------------------------------
# state specification
# ---------------------------------------------------------------------------

def parse_params(items):
    params = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got {item!r}")
        try:
            params[key] = float(val)
        except ValueError:
            raise UsageError(f"parameter {key} needs a number, got {val!r}") from None
    return params


def load_state(spec, params, cfg):
    """A family state or a file-backed wavefunction wrapped as a FamilyState."""
    if spec in fam.FAMILY_NAMES:
        params = dict(params)
        params.setdefault("a", cfg["length_scale"])
        try:
            return fam.make_family(spec, cfg["hbar"], cfg["mass"], cfg["grid"]["points"],
                                   cfg["grid"]["extent"], **params)
        except (InvalidInputError, TypeError) as exc:
            raise UsageError(str(exc)) from exc
    if os.path.exists(spec):
        if params:
            raise UsageError("family parameters do not apply to a wavefunction file")
        try:
            psi = fio.read_wavefunction(spec, cfg["hbar"], cfg["mass"])
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {spec}: {exc}") from exc
        return fam.FamilyState("file", {"path": spec}, psi, {})
    raise UsageError(f"unknown state {spec!r}: give a family "
                     f"({', '.join(fam.FAMILY_NAMES)}) or a wavefunction file")


def is_grid_state(state):
    return isinstance(getattr(state, "psi", None), GridWavefunction)


def wigner_view(psi):
    """Coarsen to at most ``WIGNER_MAX_POINTS`` so the N^2 transform stays cheap."""
    factor = max(1, psi.size // WIGNER_MAX_POINTS)
    return psi.coarsen(factor) if factor > 1 else psi


def _guard(fn):
    try:
        return fn()
    except MomentError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def flatten(obj, prefix=""):
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows.extend(flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            rows.extend(flatten(v, f"{prefix}[{i}]"))
    else:
        rows.append((prefix, obj))
    return rows


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(doc, fmt):
    if fmt == "json":
        return fio.dumps(doc)
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in flatten(fio._clean(doc)):
        w.writerow([k, _fmt(v)])
    return buf.getvalue()


def emit(text, cfg):
    path = cfg["output"]["path"]
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def envelope(command, cfg, **body):
    doc = {"schema": fio.SCHEMA, "command": command, "units": units(cfg)}
    doc.update(body)
    return doc


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _order_block(y, method):
    block = {"method": method, "moments": y.to_dict()}
    try:
        zs = invariants(y)
        block["invariants"] = zs.to_dict()
        block["t0"] = zs.t0
    except DegenerateTopMomentError as exc:
        block["invariants"] = None
        block["note"] = str(exc)
    return block


def _geometry(y):
    try:
        return classify(y).to_dict()
    except MomentError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def analyze_grid(state):
    psi = state.psi
    out = {"centroid": centroid_state(psi).to_dict()}
    out["shape"] = _guard(lambda: shape_metrics(psi).to_dict())
    orders, op_moments = {}, {}
    for n in (1, 2, 3, 4):
        entry = {}
        try:
            y = measure_moments(psi, n)
            op_moments[n] = y
            entry["operator"] = _order_block(y, "operator")
        except MomentError as exc:
            entry["operator"] = {"error": f"{type(exc).__name__}: {exc}"}
        entry["wigner"] = _guard(
            lambda n=n: _order_block(wigner_moment_vector(wigner_view(psi), n), "wigner"))
        orders[str(n)] = entry
    out["orders"] = orders
    geo = {}
    for n in (3, 4):
        if n in op_moments:
            y, zeroed = snap_negligible(psi, op_moments[n])
            geo[str(n)] = _geometry(y)
            if zeroed:
                geo[str(n)]["zeroed_indices"] = zeroed
    out["geometry"] = geo
    if all(n in op_moments for n in (2, 3, 4)):
        out["inequalities"] = [r.to_dict() for r in
                               full_report(op_moments[2], op_moments[3], op_moments[4])]
    return out


def analyze_closed(state):
    m2, m4 = state.moment_vector(2), state.moment_vector(4)
    m3 = MomentVector(3, [0.0] * 4, m2.mass, m2.hbar)
    out = {
        "centroid": {"x": 0.0, "p": 0.0, "mass": m2.mass},
        "shape": state.shape_metrics().to_dict(),
        "closed_forms": state.closed,
        "orders": {"2": {"closed_form": _order_block(m2, "closed_form")},
                   "4": {"closed_form": _order_block(m4, "closed_form")}},
        "geometry": {"4": _geometry(m4)},
        "inequalities": [r.to_dict() for r in full_report(m2, m3, m4)],
    }
    if isinstance(state, fam.PowerExpState):
        q = state.quadrature()
        out["quadrature"] = q
        out["quadrature_max_relative_difference"] = max(
            abs(q[k] - state.closed[k]) / abs(state.closed[k]) for k in ("x2", "p2", "y0", "y2", "y4"))
    return out


def cmd_analyze(args, cfg):
    state = load_state(args.state, parse_params(args.params), cfg)
    body = analyze_grid(state) if is_grid_state(state) else analyze_closed(state)
    doc = envelope("analyze", cfg, state={"name": state.name, "params": state.params}, **body)
    emit(render(doc, cfg["output"]["format"] or "json"), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def initial_moments(state, n, snap=False):
    if is_grid_state(state):
        y = measure_moments(state.psi, n)
        return snap_negligible(state.psi, y)[0] if snap else y
    if n == 3:
        return MomentVector(3, [0.0] * 4, state.mass, state.hbar)
    return state.moment_vector(n)


def time_grid(cfg, y):
    """Scaled times ``u``; by default spanning three geometric time scales."""
    t = cfg["time"]
    if t["start"] is not None and t["stop"] is not None:
        return np.linspace(float(t["start"]), float(t["stop"]), int(t["steps"]))
    span = 3.0
    try:
        rep = classify(y) if y.order in (3, 4) else None
        if rep is not None and rep.u0:
            span = 3.0 * rep.u0
    except MomentError:
        pass
    return np.linspace(-span, span, int(t["steps"]))


def cmd_evolve(args, cfg):
    n = args.order or 2
    if n not in (2, 3, 4):
        raise UsageError("evolve supports --order 2, 3 or 4")
    state = load_state(args.state, parse_params(args.params), cfg)
    y = initial_moments(state, n, snap=True)
    notes = []
    try:
        t0 = reference_time(y)
    except DegenerateTopMomentError as exc:
        t0 = 0.0
        notes.append(f"{exc}; u measured from t = 0")
    us = time_grid(cfg, y)
    rows = []
    for u in us:
        rows.append((float(u), propagate(y, t0 + y.mass * u).values, "closed_form"))
    if is_grid_state(state):
        for u in us:
            t = t0 + y.mass * float(u)
            psi_t = free_propagate(state.psi, t)
            rows.append((float(u), measure_moments(psi_t, n).values, "grid"))
    meta = {"schema": fio.SCHEMA, "command": "evolve", "state": state.name,
            "params": state.params, "order": n, "t0": t0, **units(cfg)}
    if notes:
        meta["notes"] = notes
    fmt = cfg["output"]["format"] or "csv"
    if fmt == "json":
        doc = dict(meta)
        doc["rows"] = [{"u": u, "Y": vals, "source": src} for u, vals, src in rows]
        text = fio.dumps(doc)
    else:
        buf = _stdio.StringIO()
        for k in sorted(meta):
            v = meta[k]
            buf.write(f"# {k}={json.dumps(fio._clean(v), sort_keys=True) if isinstance(v, (dict, list)) else _fmt(v)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u"] + [f"Y{k}" for k in range(n + 1)] + ["source"])
        for u, vals, src in rows:
            w.writerow([_fmt(u)] + [_fmt(v) for v in vals] + [src])
        text = buf.getvalue()
    emit(text, cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def parse_moments(text, cfg):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--moments needs comma-separated numbers, got {text!r}") from None
    if len(vals) not in (4, 5):
        raise UsageError("--moments needs 4 (order 3) or 5 (order 4) values")
    return MomentVector(len(vals) - 1, vals, cfg["mass"], cfg["hbar"])


def cmd_classify(args, cfg):
    notes = []
    if args.moments:
        if args.state:
            raise UsageError("give either a state or --moments, not both")
        y = parse_moments(args.moments, cfg)
        source = {"moments": y.to_dict()}
    else:
        if not args.state:
            raise UsageError("classify needs a state or --moments")
        state = load_state(args.state, parse_params(args.params), cfg)
        n = args.order or (3 if state.name == "skew_gaussian" else 4)
        if n not in (3, 4):
            raise UsageError("classify supports --order 3 or 4")
        y = initial_moments(state, n, snap=True)
        source = {"state": state.name, "params": state.params, "moments": y.to_dict()}
    if y.order == 3 and y[3] == 0:
        notes.append("y_3 = 0: routed to the quadratic special case")
        rep = special_case_topzero(y)
    else:
        rep = classify(y, raw=args.raw)
    doc = envelope("classify", cfg, input=source, geometry=rep.to_dict())
    if notes:
        doc["notes"] = notes
    emit(render(doc, cfg["output"]["format"] or "json"), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args, cfg):
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    results = [suites.run(name, args.seed, args.trials) for name in names]
    ok = all(r["passed"] for r in results)
    doc = envelope("verify", cfg, seed=args.seed, passed=ok, suites=results)
    fmt = cfg["output"]["format"] or "json"
    emit(render(doc, fmt), cfg)
    for r in results:
        print(f"{r['suite']}: {'PASS' if r['passed'] else 'FAIL'} "
              f"({r['trials']} trials, {r['failure_count']} failures)", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# ensemble
# ---------------------------------------------------------------------------

def cmd_ensemble(args, cfg):
    if args.path and args.random:
        raise UsageError("give either an ensemble file or --random N, not both")
    if args.path:
        try:
            e = fio.read_ensemble_csv(args.path, cfg["mass"])
        except OSError as exc:
            raise UsageError(f"cannot read {args.path}: {exc}") from exc
        source = {"path": args.path}
    elif args.random:
        e = random_ensemble(np.random.default_rng(args.seed), args.random, cfg["mass"])
        source = {"random": args.random, "seed": args.seed}
    else:
        raise UsageError("ensemble needs a CSV file or --random N")
    if args.drift:
        e = drift(e, args.drift)
        source["drift"] = args.drift
    orders = {}
    for n in range(1, (args.order or 4) + 1):
        y = ensemble_moments(e, n)
        orders[str(n)] = _order_block(y, "ensemble")
    m = {n: ensemble_moments(e, n) for n in (2, 3, 4)}
    body = {
        "input": source,
        "size": e.size,
        "centroid": e.centroid().to_dict(),
        "orders": orders,
        "classical_omega4": classical_omega4(e),
        "geometry": {"4": _guard(lambda: classify(m[4], raw=True).to_dict())},
        "inequalities": [r.to_dict() for r in full_report(m[2], m[3], m[4], "classical")],
    }
    doc = envelope("ensemble", cfg, **body)
    emit(render(doc, cfg["output"]["format"] or "json"), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON run configuration")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--order", type=int)
    common.add_argument("--hbar", type=float)
    common.add_argument("--mass", type=float)
    common.add_argument("--length-scale", dest="length_scale", type=float)

    p = _Parser(prog="freemoments", description="Symmetrized moments of free particles.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    a = sub.add_parser("analyze", parents=[common], help="moments, invariants, inequalities")
    a.add_argument("state")
    a.add_argument("params", nargs="*", metavar="key=value")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("evolve", parents=[common], help="moment time series in scaled time u")
    e.add_argument("state")
    e.add_argument("params", nargs="*", metavar="key=value")
    e.set_defaults(func=cmd_evolve)

    c = sub.add_parser("classify", parents=[common], help="critical points of Y0(u)")
    c.add_argument("state", nargs="?")
    c.add_argument("params", nargs="*", metavar="key=value")
    c.add_argument("--moments", help="comma-separated y0..yn for n = 3 or 4")
    c.add_argument("--raw", action="store_true", help="admit non-quantum fourth-order input")
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("suite", choices=suites.SUITES + ("all",))
    v.add_argument("--trials", type=int)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("ensemble", parents=[common], help="classical ensemble moments")
    s.add_argument("path", nargs="?", help="CSV with columns x, p")
    s.add_argument("--random", type=int, metavar="N", help="seeded random ensemble of N particles")
    s.add_argument("--drift", type=float, help="drift the ensemble by this time first")
    s.set_defaults(func=cmd_ensemble)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"freemoments: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BoundaryOverflowError as exc:
        print(f"freemoments: boundary overflow at t={exc.t}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except MomentError as exc:
        print(f"freemoments: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
