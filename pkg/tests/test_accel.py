import os
import subprocess
import sys

import numpy as np
import pytest

from freemoments import _accel
from freemoments.families import random_smooth_state

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not importable")


@pytest.fixture
def both():
    """Run a callable under each backend and return both results."""
    prev = _accel.backend()

    def run(fn):
        out = {}
        for name in ("numpy", "numba"):
            _accel.set_backend(name)
            out[name] = np.asarray(fn())
        return out["numpy"], out["numba"]

    yield run
    _accel.set_backend(prev)


@needs_numba
def test_ensemble_parity(both):
    rng = np.random.default_rng(0)
    X, P = rng.normal(size=(2, 5000))
    for n in (1, 4, 6):
        a, b = both(lambda: _accel.ensemble_moments(X, P, n))
        assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


@needs_numba
def test_wigner_correlation_parity(both):
    psi = random_smooth_state(np.random.default_rng(1), points=128).amplitudes
    a, b = both(lambda: _accel.wigner_correlation(psi))
    # same products; only the complex-multiply rounding (fma) may differ
    assert np.all(np.abs(a - b) <= 4e-16 * np.abs(a) + 1e-300)


@needs_numba
def test_phase_space_parity(both):
    rng = np.random.default_rng(2)
    W = rng.normal(size=(64, 64))
    W[3, :] = 0.0  # exercises the zero-skip branch
    x, p = rng.normal(size=(2, 64))
    a, b = both(lambda: _accel.phase_space_moments(W, x, p, 4))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(a).max())


def test_set_backend_errors():
    with pytest.raises(ValueError):
        _accel.set_backend("cuda")
    prev = _accel.set_backend(_accel.backend())
    assert prev == _accel.backend()


@pytest.mark.parametrize("flag,expected", [("0", "numpy"), ("off", "numpy"),
                                           ("1", "numba" if _accel.HAVE_NUMBA else "numpy")])
def test_env_flag(flag, expected):
    env = dict(os.environ, FREEMOMENTS_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c",
                          "from freemoments import _accel; print(_accel.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected
