"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is warmed up once (numba compiles on first call), then timed as
the best of ``--repeat`` runs.  Results from both backends are compared so a
speedup never hides a wrong answer.
"""

import argparse
import time

import numpy as np

from freemoments import _accel
from freemoments.families import make_skew_gaussian


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    X, P = rng.normal(size=(2, 1_000_000))
    psi = make_skew_gaussian(0.671, points=1024).psi.amplitudes
    W = rng.normal(size=(1024, 1024))
    grid = np.linspace(-10, 10, 1024)
    return [
        ("ensemble_moments n=6, N=1e6", lambda: _accel.ensemble_moments(X, P, 6)),
        ("wigner_correlation N=1024", lambda: _accel.wigner_correlation(psi)),
        ("phase_space_moments n=4, 1024^2", lambda: _accel.phase_space_moments(W, grid, grid, 4)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba not importable; nothing to compare")
        return
    print(f"{'kernel':36s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'rel diff':>10s}")
    prev = _accel.backend()
    try:
        for name, fn in cases():
            _accel.set_backend("numpy")
            t_np, r_np = best_of(fn, args.repeat)
            _accel.set_backend("numba")
            t_nb, r_nb = best_of(fn, args.repeat)
            a, b = np.asarray(r_np), np.asarray(r_nb)
            diff = float(np.max(np.abs(a - b)) / np.max(np.abs(a)))
            print(f"{name:36s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f} {diff:10.1e}")
    finally:
        _accel.set_backend(prev)


if __name__ == "__main__":
    main()
