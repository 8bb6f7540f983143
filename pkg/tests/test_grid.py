import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemoments.errors import (BoundaryOverflowError, ConvergenceError, InvalidInputError,
                                ResolutionError)
from freemoments.families import make_gaussian, make_skew_gaussian, random_smooth_state
from freemoments.grid import (GridWavefunction, boundary_density, centroid, check_resolved,
                              free_propagate, measure_moments, moment_scales,
                              position_moments, shape_metrics, snap_negligible,
                              symmetrized_moment)
from freemoments.moments import propagate


def kicked_gaussian(a=1.0, k0=0.8, x0=0.3, hbar=1.0, mass=1.0, points=1024, extent=40.0):
    return GridWavefunction.from_function(
        lambda x: np.exp(-((x - x0) / a) ** 2 + 1j * k0 * x), points, extent, hbar=hbar, mass=mass)


class TestGridWavefunction:
    def test_validation(self):
        with pytest.raises(InvalidInputError):
            GridWavefunction(np.zeros(8), 0.0, 0.1)
        with pytest.raises(InvalidInputError):
            GridWavefunction(np.ones(8), 0.0, -0.1)
        with pytest.raises(InvalidInputError):
            GridWavefunction([1.0, np.nan], 0.0, 0.1)
        with pytest.raises(InvalidInputError):
            GridWavefunction(np.ones(8), 0.0, 0.1, hbar=0.0)

    def test_immutable(self):
        psi = GridWavefunction(np.ones(8), 0.0, 0.1)
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 2.0

    def test_axes(self):
        psi = GridWavefunction(np.ones(8), -1.0, 0.25, hbar=2.0)
        assert psi.x == pytest.approx(-1.0 + 0.25 * np.arange(8))
        assert psi.p == pytest.approx(2.0 * 2 * np.pi * np.fft.fftfreq(8, 0.25))
        assert psi.normalized().norm() == pytest.approx(1.0)

    def test_coarsen(self):
        psi = kicked_gaussian(points=64)
        c = psi.coarsen(4)
        assert c.size == 16 and c.dx == 4 * psi.dx
        assert np.array_equal(c.amplitudes, psi.amplitudes[::4])
        with pytest.raises(InvalidInputError):
            psi.coarsen(3)


def test_centroid_of_kicked_gaussian():
    psi = kicked_gaussian(hbar=0.5)
    xbar, pbar = centroid(psi)
    assert xbar == pytest.approx(0.3, abs=1e-13)
    assert pbar == pytest.approx(0.5 * 0.8, abs=1e-13)


def test_gaussian_moments_are_kick_invariant():
    # moments about the centroid ignore the translation and the kick
    a, hbar = 1.2, 0.8
    psi = kicked_gaussian(a=a, hbar=hbar)
    sx2, sp2 = a * a / 4, hbar * hbar / (a * a)
    assert measure_moments(psi, 2).values == pytest.approx([sx2, 0, sp2], abs=1e-13)
    y4 = measure_moments(psi, 4).values
    assert y4 == pytest.approx([3 * sx2 ** 2, 0, sx2 * sp2, 0, 3 * sp2 ** 2], abs=1e-13)


def test_chirped_gaussian_order2():
    # exp(-x^2/a^2 + i beta x^2): <XP>_sym = hbar beta a^2 / 2, <P^2> = hbar^2 (1/a^2 + beta^2 a^2)
    a, beta = 1.0, 0.4
    psi = GridWavefunction.from_function(lambda x: np.exp(-(x / a) ** 2 + 1j * beta * x * x),
                                         1024, 40.0)
    y = measure_moments(psi, 2).values
    assert y == pytest.approx([a * a / 4, beta * a * a / 2, 1 / a ** 2 + beta ** 2 * a ** 2],
                              rel=1e-11)


def test_symmetrized_moment_matches_vector():
    psi = make_skew_gaussian(0.671, points=1024, extent=40.0).psi
    y = measure_moments(psi, 3)
    for k in range(4):
        assert symmetrized_moment(psi, k, 3) == y.values[k]
    with pytest.raises(InvalidInputError):
        symmetrized_moment(psi, 4, 3)


def test_imaginary_residual_vanishes():
    psi = random_smooth_state(np.random.default_rng(7))
    y, res = measure_moments(psi, 4, return_residual=True)
    assert np.all(res < 1e-12 * moment_scales(psi, 4))


def test_order_range():
    psi = kicked_gaussian()
    with pytest.raises(InvalidInputError):
        measure_moments(psi, 0)
    with pytest.raises(InvalidInputError):
        measure_moments(psi, 7)


class TestResolution:
    def test_box_too_small(self):
        psi = GridWavefunction.from_function(lambda x: np.exp(-x * x), 256, 5.0)
        with pytest.raises(ConvergenceError):
            check_resolved(psi, 4)

    def test_grid_too_coarse(self):
        psi = GridWavefunction.from_function(lambda x: np.exp(-x * x / 0.01), 256, 40.0)
        with pytest.raises(ResolutionError):
            check_resolved(psi, 2)

    def test_check_can_be_skipped(self):
        psi = GridWavefunction.from_function(lambda x: np.exp(-x * x), 256, 5.0)
        measure_moments(psi, 2, check=False)


class TestFreePropagate:
    def test_gaussian_spread(self):
        # <X^2>(t) = a^2/4 + (hbar t / (m a))^2
        a, hbar, m = 1.0, 1.0, 2.0
        psi = make_gaussian(a, hbar, m, points=2048).psi
        for t in (-3.0, 0.5, 4.0):
            x2 = position_moments(free_propagate(psi, t), (2,))[2]
            assert x2 == pytest.approx(a * a / 4 + (hbar * t / (m * a)) ** 2, rel=1e-12)

    def test_norm_preserved_and_reversible(self):
        psi = random_smooth_state(np.random.default_rng(1))
        out = free_propagate(free_propagate(psi, 1.3), -1.3)
        assert out.norm() == pytest.approx(psi.norm(), rel=1e-13)
        assert np.allclose(out.amplitudes, psi.amplitudes, atol=1e-12)

    def test_zero_time_identity(self):
        psi = kicked_gaussian()
        assert free_propagate(psi, 0.0) is psi

    def test_boundary_overflow(self):
        psi = kicked_gaussian(k0=0.0, points=256, extent=10.0)
        with pytest.raises(BoundaryOverflowError) as exc:
            free_propagate(psi, 20.0)
        assert exc.value.t == 20.0
        free_propagate(psi, 20.0, check_boundary=False)

    def test_rejects_bad_input(self):
        psi = kicked_gaussian()
        with pytest.raises(InvalidInputError):
            free_propagate(psi, math.inf)
        odd = GridWavefunction(np.exp(-np.linspace(-5, 5, 300) ** 2), -5.0, 10 / 300)
        with pytest.raises(InvalidInputError):
            free_propagate(odd, 1.0)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-2.0, 2.0), st.sampled_from([2, 3, 4]))
def test_grid_evolution_follows_propagator(seed, t, n):
    psi = random_smooth_state(np.random.default_rng(seed), points=1024, extent=80.0)
    y0 = measure_moments(psi, n)
    yt = measure_moments(free_propagate(psi, t), n)
    scale = moment_scales(free_propagate(psi, t), n)
    assert np.all(np.abs(yt.values - propagate(y0, t).values) <= 1e-9 * scale)


def test_snap_negligible():
    psi = make_gaussian(points=1024).psi
    y = measure_moments(psi, 3)
    snapped, zeroed = snap_negligible(psi, y)
    assert zeroed == [0, 1, 2, 3] and np.all(snapped.values == 0)
    y4, z4 = snap_negligible(psi, measure_moments(psi, 4))
    assert z4 == [1, 3] and y4.values[0] == pytest.approx(3 / 16)


def test_boundary_density():
    psi = make_gaussian(points=1024).psi
    assert boundary_density(psi) < 1e-100
    flat = GridWavefunction(np.ones(64), 0.0, 1.0)
    assert boundary_density(flat) == 1.0


def test_shape_metrics_skew_length():
    # |psi|^2 = x^2 e^{-2x} on x > 0 is a Gamma(3, 1/2) density: mean 3/2, var 3/4, mu3 3/4
    psi = GridWavefunction.from_function(lambda x: np.where(x > 0, x * np.exp(-np.abs(x)), 0.0),
                                         2 ** 14, 120.0)
    sm = shape_metrics(psi)
    assert sm.sigma2 == pytest.approx(math.sqrt(0.75), rel=1e-6)
    assert sm.skew_length == pytest.approx(1.0, rel=1e-5)
    # mu4 = 3 k (k + 2) theta^4 with k = 3, theta = 1/2
    assert sm.kurtosis == pytest.approx(3 * 3 * 5 / 16 / 0.75 ** 2, rel=1e-5)
    assert set(sm.to_dict()) == {"sigma2", "sigma4", "skew_length", "kurtosis"}
