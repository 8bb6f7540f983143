import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freemoments.cubic import cubic_real_roots, cubic_residual
from freemoments.errors import InvalidInputError


def numpy_real_roots(c3, c1, c0):
    r = np.roots([c3, 0.0, c1, c0])
    # relative filter: tiny roots must not be counted real just because they are small
    return np.sort(r[np.abs(r.imag) <= 1e-7 * np.max(np.abs(r))].real)


def test_three_roots():
    assert np.allclose(cubic_real_roots(1, -1, 0), [-1, 0, 1], atol=1e-15)


def test_one_root():
    assert np.array_equal(cubic_real_roots(1, 1, 0), [0.0])


def test_real_wavefunction_structure():
    assert np.allclose(cubic_real_roots(1, -3, 0), [-math.sqrt(3), 0, math.sqrt(3)], atol=1e-15)


def test_double_root_reported_once():
    # u^3 - 3u + 2 = (u - 1)^2 (u + 2)
    assert np.allclose(cubic_real_roots(1, -3, 2), [-2, 1], atol=1e-12)


def test_triple_root():
    assert np.array_equal(cubic_real_roots(2, 0, 0), [0.0])


def test_linear_fallback():
    assert np.array_equal(cubic_real_roots(0, 2, -4), [2.0])


def test_constant_rejected():
    with pytest.raises(InvalidInputError):
        cubic_real_roots(0, 0, 1)


def test_nonfinite_rejected():
    with pytest.raises(InvalidInputError):
        cubic_real_roots(1, math.nan, 0)


coef = st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-6)
# subnormal inputs are covered by test_tiny_coefficients; here u^3 would underflow in the residual
small = st.floats(-1e3, 1e3, allow_subnormal=False)


@given(coef, small, small)
def test_residual_and_count(c3, c1, c0):
    roots = cubic_real_roots(c3, c1, c0)
    assert 1 <= len(roots) <= 3
    assert np.all(np.diff(roots) > 0)
    if len(roots) != 2:
        for u in roots:
            assert cubic_residual(c3, c1, c0, u) < 1e-10


def test_tiny_coefficients():
    (u,) = cubic_real_roots(1.0, 0.0, 6.7e-215)
    assert u == pytest.approx(-(6.7e-215) ** (1 / 3), rel=1e-14)
    assert np.allclose(cubic_real_roots(1e-200, -1e-200, 0.0), [-1, 0, 1])


@given(coef, small, small)
def test_against_numpy_roots(c3, c1, c0):
    p, q = c1 / c3, c0 / c3
    disc = 4 * p ** 3 + 27 * q * q
    scale = abs(4 * p ** 3) + 27 * q * q
    ours = cubic_real_roots(c3, c1, c0)
    ref = numpy_real_roots(c3, c1, c0)
    if abs(disc) <= 1e-6 * scale:
        return  # near a repeated root the root count is ill-conditioned
    assert len(ours) == len(ref)
    # numpy's error is absolute on the scale of the largest possible root
    size = max(math.sqrt(abs(p)), abs(q) ** (1 / 3))
    assert np.allclose(ours, ref, atol=1e-7 * size, rtol=1e-8)
