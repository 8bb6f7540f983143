import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemoments.ensemble import (ParticleEnsemble, classical_omega4, drift, ensemble_moment,
                                  ensemble_moments, omega4_scale, random_ensemble)
from freemoments.errors import DegenerateEnsembleError, InvalidInputError
from freemoments.moments import propagate, propagate_scales


def naive_moments(x, p, n):
    """Oracle: plain numpy means of the deviation products."""
    X, P = x - x.mean(), p - p.mean()
    return np.array([np.mean(P ** k * X ** (n - k)) for k in range(n + 1)])


def test_two_particles_exact():
    e = ParticleEnsemble([-1.0, 1.0], [2.0, 0.0], mass=2.0)
    # deviations: X = (-1, 1), P = (1, -1)
    assert ensemble_moments(e, 2).values.tolist() == [1.0, -1.0, 1.0]
    assert e.centroid().p == 1.0


def test_validation():
    with pytest.raises(DegenerateEnsembleError):
        ParticleEnsemble([1.0], [1.0])
    with pytest.raises(DegenerateEnsembleError):
        ParticleEnsemble([1.0, 2.0], [1.0])
    with pytest.raises(DegenerateEnsembleError):
        ParticleEnsemble([1.0, 2.0], [1.0, 2.0], mass=[1.0, 2.0])
    with pytest.raises(InvalidInputError):
        ParticleEnsemble([1.0, np.inf], [1.0, 2.0])
    with pytest.raises(InvalidInputError):
        ParticleEnsemble([1.0, 2.0], [1.0, 2.0], mass=0.0)
    assert ParticleEnsemble([1.0, 2.0], [1.0, 2.0], mass=[3.0, 3.0]).mass == 3.0


def test_moment_accessors():
    e = random_ensemble(np.random.default_rng(2), size=50)
    assert ensemble_moment(e, 1, 3) == ensemble_moments(e, 3).values[1]
    with pytest.raises(InvalidInputError):
        ensemble_moment(e, 4, 3)
    with pytest.raises(InvalidInputError):
        ensemble_moments(e, 0)
    with pytest.raises(InvalidInputError):
        drift(e, math.nan)


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_against_naive(seed, n):
    e = random_ensemble(np.random.default_rng(seed))
    ref = naive_moments(e.positions, e.momenta, n)
    X, P = e.deviations()
    scale = np.array([np.mean(np.abs(P) ** k * np.abs(X) ** (n - k)) for k in range(n + 1)])
    assert np.all(np.abs(ensemble_moments(e, n).values - ref) <= 1e-12 * scale)


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 5), st.floats(-5, 5),
       st.floats(0.2, 5.0))
def test_drift_follows_shared_law(seed, n, t, mass):
    e = random_ensemble(np.random.default_rng(seed), mass=mass)
    y0 = ensemble_moments(e, n)
    got = ensemble_moments(drift(e, t), n).values
    err = np.abs(got - propagate(y0, t).values)
    assert np.all(err <= 1e-10 * propagate_scales(y0, t))


@settings(max_examples=100)
@given(st.integers(0, 2 ** 32 - 1))
def test_classical_omega4_nonnegative(seed):
    e = random_ensemble(np.random.default_rng(seed))
    assert classical_omega4(e) >= -1e-12 * omega4_scale(e)


def test_random_ensemble_is_seeded():
    a = random_ensemble(np.random.default_rng(5))
    b = random_ensemble(np.random.default_rng(5))
    assert np.array_equal(a.positions, b.positions) and np.array_equal(a.momenta, b.momenta)
