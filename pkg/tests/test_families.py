import itertools
import math

import mpmath as mp
import numpy as np
import pytest
import sympy as sp
from scipy.integrate import trapezoid

from freemoments.errors import ConvergenceError, InvalidInputError
from freemoments.families import (FAMILY_NAMES, make_abs_exp, make_family, make_gaussian,
                                  make_power_exponential, make_skew_gaussian,
                                  make_sqrt_exp, make_truncated_power_exponential,
                                  power_exp_closed_forms, power_exp_edge_scan,
                                  power_exp_quadrature, random_smooth_state,
                                  skew_gaussian_closed)
from freemoments.grid import measure_moments, shape_metrics


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def sympy_weyl_moments(psi, x, n):
    """Exact symmetrized moments of a closed-form ``psi``: every ordering, integrated by sympy."""
    def ev(f):
        return sp.integrate(sp.expand(sp.conjugate(psi) * f), (x, -sp.oo, sp.oo))

    def P(f):
        return -sp.I * sp.diff(f, x)

    norm = ev(psi)
    xbar = ev(x * psi) / norm
    pbar = ev(P(psi)) / norm
    out = []
    for k in range(n + 1):
        acc = 0
        for pos in itertools.combinations(range(n), k):
            f = psi
            for i in reversed(range(n)):
                f = P(f) - pbar * f if i in pos else (x - xbar) * f
            acc += ev(f)
        out.append(sp.re(sp.simplify(acc / (math.comb(n, k) * norm))))
    return out, sp.simplify(pbar)


def mpmath_power_exp(c, b, a=1.0, dps=30):
    """Moments of ``x^c exp(-(x/a)^b)`` from sympy derivatives and mpmath quadrature in x.

    The Weyl-ordered ``<X^2 P^2>`` is the average of the six operator strings,
    so no integration by parts is assumed.  Near ``x = 0`` the ``x = w^K``
    substitution with ``K = 1/(2c-3)`` removes the ``x^(2c-4)`` singularity.
    """
    mp.mp.dps = dps
    x = sp.symbols("x", positive=True)
    f = x ** sp.nsimplify(c) * sp.exp(-(x / sp.nsimplify(a)) ** sp.nsimplify(b))

    def P(g):
        return -sp.I * sp.diff(g, x)

    acc = 0
    for pos in itertools.combinations(range(4), 2):
        g = f
        for i in reversed(range(4)):
            g = P(g) if i in pos else x * g
        acc += f * g
    integrands = {"norm": f * f, "x2": x ** 2 * f * f, "x4": x ** 4 * f * f,
                  "p2": -f * sp.diff(f, x, 2), "y2": sp.re(sp.expand(acc / 6)),
                  "p4": f * sp.diff(f, x, 4)}
    xpk = a * ((2 * c + 1) / (2 * b)) ** (1 / b)
    K = mp.mpf(1) / (2 * c - 3)
    x1 = xpk / 100
    I = {}
    for key, expr in integrands.items():
        fn = sp.lambdify(x, expr, "mpmath")
        near = mp.quad(lambda w: fn(w ** K) * K * w ** (K - 1), [0, x1 ** (1 / K)])
        far = mp.quad(fn, [x1, xpk / 10, xpk, 4 * xpk, 20 * xpk, mp.inf])
        I[key] = near + far
    n = I["norm"]
    return {"x2": I["x2"] / n, "y0": I["x4"] / n, "p2": I["p2"] / n, "y2": I["y2"] / n,
            "y4": I["p4"] / n}


# ---------------------------------------------------------------------------
# skew Gaussian
# ---------------------------------------------------------------------------

class TestSkewGaussian:
    def test_closed_forms_against_sympy(self):
        x = sp.symbols("x", real=True)
        b = sp.Rational(671, 1000)
        vals, pbar = sympy_weyl_moments((1 + sp.I * b * x) * sp.exp(-x ** 2 / 2), x, 3)
        closed = skew_gaussian_closed(0.671)
        assert closed["order3"] == pytest.approx([float(v) for v in vals], rel=1e-13, abs=1e-300)
        assert closed["p_mean"] == pytest.approx(float(pbar), rel=1e-14)
        y = [float(v) for v in vals]
        assert closed["omega3"] == pytest.approx(y[1] * y[3] - y[2] ** 2, rel=1e-12)

    def test_scaling_with_a_and_hbar(self):
        base = skew_gaussian_closed(0.5)
        c = skew_gaussian_closed(0.5, a=2.0, hbar=3.0)
        assert c["order3"][1] == pytest.approx(base["order3"][1] * 2 * 3)
        assert c["order3"][3] == pytest.approx(base["order3"][3] * 27 / 8)
        assert c["omega3"] == pytest.approx(base["omega3"] * 81 / 4)

    def test_grid_matches_closed(self):
        s = make_skew_gaussian(0.671, points=1024, extent=40.0)
        y = measure_moments(s.psi, 3)
        assert y.values == pytest.approx(s.closed["order3"], abs=1e-12)

    def test_u0_only_when_negative(self):
        assert "u0" in skew_gaussian_closed(0.671)
        assert "u0" not in skew_gaussian_closed(0.9)


# ---------------------------------------------------------------------------
# grid families
# ---------------------------------------------------------------------------

def test_gaussian_closed_forms():
    g = make_gaussian(a=1.3, hbar=0.7, points=2048)
    assert measure_moments(g.psi, 2).values == pytest.approx(g.closed["order2"], rel=1e-10, abs=1e-14)
    assert measure_moments(g.psi, 4).values == pytest.approx(g.closed["order4"], rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("make,sigma2,kurt,rel", [
    (make_gaussian, 0.5, 3.0, 1e-10),
    (make_abs_exp, 1 / math.sqrt(2), 6.0, 1e-5),
    # the sqrt cusp at x = 0 costs O(dx^1.5) ~ 1e-3 in the Riemann sums
    (make_sqrt_exp, math.sqrt(7.5), 25.2, 2e-3),
])
def test_grid_shape_metrics(make, sigma2, kurt, rel):
    # sigma2 and K from Gamma integrals of the densities, independent of the grid
    sm = shape_metrics(make().psi)
    assert sm.sigma2 == pytest.approx(sigma2, rel=rel)
    assert sm.kurtosis == pytest.approx(kurt, rel=rel)


def test_small_box_rejected():
    with pytest.raises(ConvergenceError):
        shape_metrics(make_sqrt_exp(points=4096, extent=100.0).psi)


def test_random_smooth_state_is_resolved():
    rng = np.random.default_rng(3)
    for _ in range(5):
        psi = random_smooth_state(rng)
        measure_moments(psi, 4)  # raises if unresolved


# ---------------------------------------------------------------------------
# power exponential
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("c,b", [(2.0, 1.0), (1.8, 0.5), (1.51, 0.24)])
def test_power_exp_closed_against_mpmath(c, b):
    ref = mpmath_power_exp(c, b)
    got = power_exp_closed_forms(c, b)
    for key, v in ref.items():
        assert got[key] == pytest.approx(float(v), rel=1e-11), key


@pytest.mark.parametrize("c,b,a,hbar", [(1.51, 0.24, 1.0, 1.0), (2.5, 0.7, 0.3, 2.0),
                                        (1.6, 2.0, 1.0, 1.0)])
def test_quadrature_matches_closed(c, b, a, hbar):
    q = power_exp_quadrature(c, b, a, hbar)
    m = power_exp_closed_forms(c, b, a, hbar)
    for key in q:
        assert q[key] == pytest.approx(m[key], rel=1e-9), key


def test_y2_formula_sign():
    for c in (1.6, 2.0, 3.0):
        edge = 1 / (2 * c + 1)
        assert power_exp_closed_forms(c, 0.99 * edge)["y2"] < 0
        assert power_exp_closed_forms(c, 1.01 * edge)["y2"] > 0


def test_power_exp_derived():
    s = make_power_exponential(1.51, 0.24)
    m = s.closed
    assert m["omega4"] == pytest.approx(m["y2"] * m["y4"])
    assert m["u0"] == pytest.approx(math.sqrt(-m["y2"] / m["y4"]))
    y = s.moment_vector(4)
    assert y.values[1] == 0 and y.values[3] == 0
    with pytest.raises(InvalidInputError):
        s.moment_vector(5)


def test_power_exp_validation():
    for c, b in ((1.5, 0.2), (2.0, 0.0), (2.0, -1.0)):
        with pytest.raises(InvalidInputError):
            make_power_exponential(c, b)


def test_edge_scan_minimum_at_corner():
    c, b, s2 = power_exp_edge_scan(n_c=11, n_b=11)
    assert (c, b) == (1.5, 0.25)
    # at the corner <X^2> = Gamma(24) / Gamma(16) / 2^8, exact in integers
    assert s2 == pytest.approx(math.sqrt(math.factorial(23) / math.factorial(15) / 2 ** 8), rel=1e-12)


# ---------------------------------------------------------------------------
# truncated power exponential
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def truncated():
    return make_truncated_power_exponential(1.51, 0.24)


class TestTruncated:
    @pytest.fixture
    def state(self, truncated):
        return truncated

    def test_junction_continuity(self, state):
        assert max(state.junction_mismatch()) < 1e-12

    def test_vanishes_beyond_cutoff(self, state):
        x = np.array([state.x2, 1.01 * state.x2, 3 * state.x2])
        assert np.all(state.psi(x) == 0.0)
        assert abs(float(state._quartic(state.x2, 1))) < 1e-12 * abs(state._psi_derivs(state.x1)[1])

    def test_moments_against_grid_free_quadrature(self, state):
        # direct quadrature of the assembled piecewise psi, with derivatives by finite differences
        xs = np.linspace(1e-9, state.x2, 400001)
        f = state.psi(xs)
        norm = trapezoid(f * f, xs)
        assert state.closed["x2"] == pytest.approx(trapezoid(xs ** 2 * f * f, xs) / norm, rel=1e-4)
        assert state.closed["y0"] == pytest.approx(trapezoid(xs ** 4 * f * f, xs) / norm, rel=1e-4)

    def test_negative_omega(self, state):
        assert state.closed["y2"] < 0 and state.closed["omega4"] < 0

    def test_singular_matching(self):
        with pytest.raises(InvalidInputError):
            make_truncated_power_exponential(1.51, 0.24, match_at=6.0, zero_at=6.0)


# ---------------------------------------------------------------------------
# factory
# ---------------------------------------------------------------------------

def test_make_family_all_names():
    for name in FAMILY_NAMES:
        kw = {"points": 1024} if name in ("gaussian", "skew_gaussian") else {}
        if name in ("abs_exp", "sqrt_exp"):
            continue  # large default grids; covered above
        s = make_family(name, **kw)
        assert s.name == name


def test_make_family_errors():
    with pytest.raises(InvalidInputError):
        make_family("lorentzian")
    with pytest.raises(InvalidInputError):
        make_family("gaussian", c=1.0)
    with pytest.raises(InvalidInputError):
        make_family("gaussian", a=-1.0)
