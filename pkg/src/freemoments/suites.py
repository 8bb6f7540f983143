"""Seeded property sweeps behind ``freemoments verify``.

Each suite returns a plain dict with the seed, trial count, a ``passed`` flag,
summary statistics and a list of failures (each carrying what is needed to
reproduce it).
"""

import numpy as np

from . import ensemble as ens
from . import families as fam
from .errors import MomentError
from .grid import measure_moments, moment_scales
from .inequalities import full_report
from .moments import (MomentVector, invariant_scales, invariants, propagate,
                      propagate_scales)
from .wigner import wigner_moment_vector

SUITES = ("invariance", "oracle", "inequalities", "classical")

MAX_LOGGED = 20


def _rel(err, scale):
    return float(np.max(np.abs(err) / np.maximum(scale, np.finfo(float).tiny)))


def random_moment_vector(rng, order=None):
    n = int(rng.integers(2, 7)) if order is None else order
    y = rng.normal(size=n + 1)
    y[-1] = abs(y[-1]) + 0.1
    return MomentVector(n, y, float(rng.uniform(0.5, 2.0)))


def _result(name, seed, trials, failures, **stats):
    return {"suite": name, "seed": seed, "trials": trials, "passed": not failures,
            "failures": failures[:MAX_LOGGED], "failure_count": len(failures), "stats": stats}


def invariance(seed=0, trials=10000, rel=1e-10):
    """Invariants constant, semigroup law and exact top moment under ``propagate``."""
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    for i in range(trials):
        y = random_moment_vector(rng)
        t1, t2 = rng.uniform(-3.0, 3.0, 2)
        yt = propagate(y, t1)
        z0, z1 = invariants(y).z, invariants(yt).z
        scale = np.maximum(invariant_scales(y), invariant_scales(yt))
        drift = _rel(z1 - z0, scale)
        worst = max(worst, drift)
        direct = propagate(y, t1 + t2).values
        twice = propagate(yt, t2).values
        semi = _rel(direct - twice, propagate_scales(y, abs(t1) + abs(t2)))
        if drift > rel or semi > 1e-12 or yt.values[-1] != y.values[-1]:
            failures.append({"trial": i, "order": y.order, "values": y.values.tolist(),
                             "t1": float(t1), "t2": float(t2), "drift": drift,
                             "semigroup": semi})
    return _result("invariance", seed, trials, failures, max_relative_drift=worst)


def oracle(seed=0, trials=6, max_order=4):
    """Operator averaging against Wigner quadrature on random smooth states."""
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    for i in range(trials):
        psi = fam.random_smooth_state(rng)
        for n in range(1, max_order + 1):
            op, resid = measure_moments(psi, n, return_residual=True)
            wg = wigner_moment_vector(psi, n)
            scale = moment_scales(psi, n)
            err = np.abs(op.values - wg.values)
            tol = np.maximum(1e-6, 1e-4 * scale)
            worst = max(worst, _rel(err, scale))
            if np.any(err > tol) or np.any(resid > 1e-10 * scale):
                failures.append({"trial": i, "order": n, "operator": op.values.tolist(),
                                 "wigner": wg.values.tolist(),
                                 "imag_residual": resid.tolist()})
    return _result("oracle", seed, trials, failures, max_scaled_difference=worst)


def quantum_reports(psi):
    m = {n: measure_moments(psi, n) for n in (2, 3, 4)}
    return full_report(m[2], m[3], m[4])


def closed_form_reports(state):
    z = MomentVector(3, [0.0] * 4, state.mass, state.hbar)
    return full_report(state.moment_vector(2), z, state.moment_vector(4))


def inequalities(seed=0, trials=6):
    """Every inequality check on the named families and random smooth states."""
    rng = np.random.default_rng(seed)
    cases = [
        ("gaussian", lambda: quantum_reports(fam.make_gaussian().psi)),
        ("skew_gaussian b=0.671", lambda: quantum_reports(fam.make_skew_gaussian(0.671).psi)),
        ("power_exp c=1.51 b=0.24", lambda: closed_form_reports(fam.make_power_exponential(1.51, 0.24))),
        ("power_exp_truncated", lambda: closed_form_reports(
            fam.make_truncated_power_exponential(1.51, 0.24))),
    ]
    for b in rng.uniform(0.1, 1.5, 2):
        cases.append((f"skew_gaussian b={b!r}",
                      lambda b=b: quantum_reports(fam.make_skew_gaussian(float(b)).psi)))
    for c, b in zip(rng.uniform(1.6, 4.0, 2), rng.uniform(0.2, 2.0, 2)):
        cases.append((f"power_exp c={c!r} b={b!r}",
                      lambda c=c, b=b: closed_form_reports(fam.make_power_exponential(c, b))))
    for i in range(trials):
        psi = fam.random_smooth_state(rng)
        cases.append((f"random_smooth #{i}", lambda psi=psi: quantum_reports(psi)))

    failures = []
    checked = 0
    for label, run in cases:
        try:
            reports = run()
        except MomentError as exc:
            failures.append({"state": label, "error": str(exc)})
            continue
        for r in reports:
            checked += 1
            if not r.satisfied:
                failures.append({"state": label, **r.to_dict()})
    return _result("inequalities", seed, len(cases), failures, checks=checked)


def classical(seed=0, trials=10000, rel=1e-10):
    """Classical Omega_4 >= 0 and drift moments following the shared propagator."""
    rng = np.random.default_rng(seed)
    failures = []
    min_ratio = np.inf
    worst = 0.0
    for i in range(trials):
        e = ens.random_ensemble(rng)
        om = ens.classical_omega4(e)
        scale = ens.omega4_scale(e)
        if scale > 0:
            min_ratio = min(min_ratio, om / scale)
        n = int(rng.integers(2, 7))
        t = float(rng.uniform(-2.0, 2.0))
        y = ens.ensemble_moments(e, n)
        got = ens.ensemble_moments(ens.drift(e, t), n).values
        want = propagate(y, t).values
        err = _rel(got - want, propagate_scales(y, t))
        worst = max(worst, err)
        if om < -1e-12 * scale or err > rel:
            failures.append({"trial": i, "size": e.size, "omega4": om, "scale": scale,
                             "order": n, "t": t, "drift_error": err})
    return _result("classical", seed, trials, failures,
                   min_omega4_over_scale=float(min_ratio), max_drift_error=worst)


def run(name, seed=0, trials=None):
    fn = {"invariance": invariance, "oracle": oracle, "inequalities": inequalities,
          "classical": classical}[name]
    return fn(seed) if trials is None else fn(seed, trials)
