"""Named wavefunction families with closed-form moments.

Grid families (``gaussian``, ``skew_gaussian``, ``abs_exp``, ``sqrt_exp``)
are sampled directly.  The power-exponential family ``|x|^c exp(-|x/a|^b)``
spans lengths of order 10^4 a, so its moments come from Gamma-function closed
forms, cross-checked by adaptive quadrature on the analytic density after the
substitution ``s = (x/a)^b``; its grid is for plotting only.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, InvalidInputError
from .grid import GridWavefunction, ShapeMetrics
from .moments import MomentVector

FAMILY_NAMES = ("gaussian", "skew_gaussian", "power_exp", "power_exp_truncated",
                "abs_exp", "sqrt_exp")


@dataclass
class FamilyState:
    name: str
    params: dict
    psi: GridWavefunction
    closed: dict = field(default_factory=dict)


QUAD_RTOL = 1e-13


def _quad(f, lo, hi, **kw):
    """``scipy.integrate.quad`` with its error estimate checked instead of warned about."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=QUAD_RTOL, limit=400, **kw)
    if not err <= 1e-6 * abs(val):
        raise ConvergenceError(f"quadrature did not converge on [{lo}, {hi}]: {val} +- {err}")
    return val


def _positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise InvalidInputError(f"{k} must be positive, got {v!r}")


def make_gaussian(a=1.0, hbar=1.0, mass=1.0, points=4096, extent=None):
    """``exp(-x^2/a^2)``: a minimum-uncertainty packet with ``sigma_2 = a/2``."""
    _positive(a=a, hbar=hbar, mass=mass)
    extent = 60.0 * a if extent is None else extent
    psi = GridWavefunction.from_function(lambda x: np.exp(-(x / a) ** 2), points, extent,
                                         hbar=hbar, mass=mass)
    sx2, sp2 = a * a / 4.0, hbar * hbar / (a * a)
    closed = {
        "order2": [sx2, 0.0, sp2],
        "order4": [3.0 * sx2 * sx2, 0.0, sx2 * sp2, 0.0, 3.0 * sp2 * sp2],
        "p_mean": 0.0,
        "sigma2": a / 2.0,
        "kurtosis": 3.0,
    }
    return FamilyState("gaussian", {"a": a}, psi, closed)


def skew_gaussian_closed(b, a=1.0, hbar=1.0):
    b2 = b * b
    y1 = -2.0 * b ** 3 * a * hbar / (2.0 + b2) ** 2
    y3 = 2.0 * b ** 3 * (2.0 - 3.0 * b2) * hbar ** 3 / ((2.0 + b2) ** 3 * a ** 3)
    om3 = 4.0 * b ** 6 * (3.0 * b2 - 2.0) * hbar ** 4 / ((b2 + 2.0) ** 5 * a * a)
    out = {
        "order3": [0.0, y1, 0.0, y3],
        "omega3": om3,
        "p_mean": 2.0 * b * hbar / ((b2 + 2.0) * a),
    }
    if om3 < 0 and y3 != 0:
        out["u0"] = math.sqrt(-om3) / abs(y3)
    return out


def make_skew_gaussian(b, a=1.0, hbar=1.0, mass=1.0, points=4096, extent=None):
    """``(1 + i b x/a) exp(-x^2/(2a^2))``: unskewed at ``t = 0`` but not for long."""
    _positive(a=a, hbar=hbar, mass=mass)
    extent = 80.0 * a if extent is None else extent
    psi = GridWavefunction.from_function(
        lambda x: (1.0 + 1j * b * x / a) * np.exp(-0.5 * (x / a) ** 2), points, extent,
        hbar=hbar, mass=mass)
    return FamilyState("skew_gaussian", {"b": b, "a": a}, psi, skew_gaussian_closed(b, a, hbar))


def make_abs_exp(a=1.0, hbar=1.0, mass=1.0, points=2 ** 16, extent=None):
    """``exp(-|x|/a)``; cusped at the origin, so only position moments are meaningful."""
    _positive(a=a)
    extent = 80.0 * a if extent is None else extent
    psi = GridWavefunction.from_function(lambda x: np.exp(-np.abs(x) / a), points, extent,
                                         hbar=hbar, mass=mass)
    return FamilyState("abs_exp", {"a": a}, psi, {"sigma2": a / math.sqrt(2.0), "kurtosis": 6.0})


def make_sqrt_exp(a=1.0, hbar=1.0, mass=1.0, points=2 ** 18, extent=None):
    """``exp(-sqrt(|x|/a))``; long-tailed, ``K = 25.2``."""
    _positive(a=a)
    extent = 2400.0 * a if extent is None else extent
    psi = GridWavefunction.from_function(lambda x: np.exp(-np.sqrt(np.abs(x) / a)), points,
                                         extent, hbar=hbar, mass=mass)
    return FamilyState("sqrt_exp", {"a": a}, psi,
                       {"sigma2": math.sqrt(7.5) * a, "kurtosis": 25.2})


# ---------------------------------------------------------------------------
# power-exponential family
# ---------------------------------------------------------------------------

def _lg(v):
    return math.lgamma(v)


def _log_x2(c, b, a):
    return 2.0 * math.log(a) - (2.0 / b) * math.log(2.0) + _lg((2 * c + 3) / b) - _lg((2 * c + 1) / b)


def power_exp_x2(c, b, a=1.0):
    """``<X^2>``; needs only ``(2c+1)/b > 0``, so it is usable on the ``c = 3/2`` edge."""
    return math.exp(_log_x2(c, b, a))


def power_exp_closed_forms(c, b, a=1.0, hbar=1.0):
    """Gamma-function moments of ``|x|^c exp(-|x/a|^b)``."""
    g1 = _lg((2 * c + 1) / b)
    x2 = power_exp_x2(c, b, a)
    p2 = (hbar ** 2 / a ** 2 * 2.0 ** (-2.0 + 2.0 / b) * (b * (2 * c - 1) + 1)
          * math.exp(_lg((2 * c - 1) / b) - g1))
    y0 = a ** 4 * 2.0 ** (-4.0 / b) * math.exp(_lg((2 * c + 5) / b) - g1)
    y2 = hbar ** 2 * (b * (2 * c + 1) - 1) / 4.0
    f = 9.0 + 2.0 * b * (c - 1.5) * (10.0 + 2.0 * b * b + 6.0 * b * (c - 1.5))
    y4 = hbar ** 4 / a ** 4 * 2.0 ** (-4.0 + 4.0 / b) * f * math.exp(_lg((2 * c - 3) / b) - g1)
    return {"x2": x2, "p2": p2, "y0": y0, "y2": y2, "y4": y4}


def _derived(m):
    out = dict(m)
    out["sigma2"] = math.sqrt(m["x2"])
    out["sigma4"] = m["y0"] ** 0.25
    out["kurtosis"] = m["y0"] / m["x2"] ** 2
    out["omega4"] = m["y2"] * m["y4"]
    out["p2sq_over_p4"] = m["p2"] ** 2 / m["y4"]
    out["u0"] = math.sqrt(-m["y2"] / m["y4"]) if m["y2"] < 0 else None
    return out


class _PowerExpIntegrands:
    """x-space integrands of ``psi = x^c exp(-(x/a)^b)`` for ``x > 0``, in the variable ``s``.

    ``psi' = psi g / x`` and ``psi'' = psi h / x^2`` with ``g = c - b s`` and
    ``h = g^2 - g - b^2 s``.  Everything is scaled by ``exp(-shift)`` to keep
    the integrands representable.
    """

    def __init__(self, c, b, a):
        self.c, self.b, self.a = c, b, a
        # peak of the normalization integrand
        self.shift = self.log_base(max((2 * c + 1) / (2 * b), 1e-3), 0)

    def x_of(self, s):
        return self.a * s ** (1.0 / self.b)

    def log_base(self, s, e):
        # log of x^(2c+e) psi^2/x^(2c) * dx/ds  (the x^e |psi|^2 Jacobian-weighted part)
        logx = math.log(self.a) + math.log(s) / self.b
        return (2 * self.c + e + 1) * logx - 2.0 * s - math.log(self.b) - math.log(s)

    def leading_exponent(self, e):
        # x^(2c+e) dx ~ s^((2c+e+1)/b - 1) ds near s = 0
        return (2 * self.c + e + 1) / self.b - 1.0

    def poly(self, kind, s):
        g = self.c - self.b * s
        if kind in ("norm", "x2", "x4"):
            return 1.0
        if kind in ("p2", "xp"):
            return g * g
        h = g * g - g - self.b * self.b * s
        return h * h

    EXPONENT = {"norm": 0, "x2": 2, "x4": 4, "p2": -2, "xp": 0, "p4": -4}

    def integral(self, kind, s_hi=math.inf):
        """``\\int_0^{s_hi}`` of the chosen integrand, times ``exp(-shift)``."""
        e = self.EXPONENT[kind]
        alpha = self.leading_exponent(e)

        def rem(s):
            # integrand divided by s^alpha; smooth at s = 0
            if s == 0.0:
                s = 1e-300
            return math.exp(self.log_base(s, e) - alpha * math.log(s) - self.shift) * self.poly(kind, s)

        def full(s):
            return math.exp(self.log_base(s, e) - self.shift) * self.poly(kind, s)

        # algebraic-weight rule only next to the endpoint singularity
        s0 = min(1.0, s_hi)
        total = _quad(rem, 0.0, s0, weight="alg", wvar=(alpha, 0.0))
        peak = (2 * self.c + e + 1) / (2 * self.b)
        for lo, hi in ((s0, min(max(peak, s0), s_hi)), (max(peak, s0), s_hi)):
            if hi > lo:
                total += _quad(full, lo, hi)
        return total


def _moments_from_integrals(I, hbar):
    n = I["norm"]
    return {
        "x2": I["x2"] / n,
        "y0": I["x4"] / n,
        "p2": hbar ** 2 * I["p2"] / n,
        # Weyl-ordered <X^2 P^2> for real psi: hbar^2 (\int x^2 psi'^2 / \int psi^2 - 1/2)
        "y2": hbar ** 2 * (I["xp"] / n - 0.5),
        "y4": hbar ** 4 * I["p4"] / n,
    }


def power_exp_quadrature(c, b, a=1.0, hbar=1.0):
    """The closed-form moments recomputed by adaptive quadrature."""
    ig = _PowerExpIntegrands(c, b, a)
    I = {k: ig.integral(k) for k in ig.EXPONENT}
    return _moments_from_integrals(I, hbar)


def _check_power_exp(c, b, a):
    if not (b > 0 and a > 0 and c > 1.5):
        raise InvalidInputError(
            f"power-exponential needs b > 0, a > 0, c > 3/2 (got c={c}, b={b}, a={a})")


@dataclass
class PowerExpState:
    """``psi(x) = |x|^c exp(-|x/a|^b)``, real and even."""

    c: float
    b: float
    a: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        _check_power_exp(self.c, self.b, self.a)
        self.closed = _derived(power_exp_closed_forms(self.c, self.b, self.a, self.hbar))

    name = "power_exp"

    @property
    def params(self):
        return {"c": self.c, "b": self.b, "a": self.a}

    def psi(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        return ax ** self.c * np.exp(-(ax / self.a) ** self.b)

    def quadrature(self):
        return _derived(power_exp_quadrature(self.c, self.b, self.a, self.hbar))

    def moment_vector(self, order):
        m = self.closed
        if order == 2:
            vals = [m["x2"], 0.0, m["p2"]]
        elif order == 4:
            vals = [m["y0"], 0.0, m["y2"], 0.0, m["y4"]]
        elif order in (1, 3):
            vals = [0.0] * (order + 1)
        else:
            raise InvalidInputError(f"closed forms cover orders 1-4, not {order}")
        return MomentVector(order, vals, self.mass, self.hbar)

    def shape_metrics(self):
        m = self.closed
        return ShapeMetrics(m["sigma2"], m["sigma4"], 0.0, m["kurtosis"])

    def grid(self, points=4096, extent=None):
        """Plotting grid; not used for moments."""
        extent = 8.0 * self.closed["sigma4"] if extent is None else extent
        return GridWavefunction.from_function(self.psi, points, extent, hbar=self.hbar,
                                              mass=self.mass)


def make_power_exponential(c, b, a=1.0, hbar=1.0, mass=1.0):
    return PowerExpState(c, b, a, hbar, mass)


def power_exp_edge_scan(c_max=2.5, n_c=41, n_b=41, a=1.0):
    """Smallest ``sigma_2`` over the closed region ``y_2 <= 0``, ``c >= 3/2``.

    Scans ``c`` in ``[3/2, c_max]`` and ``b`` in ``(0, 1/(2c+1)]``; returns
    ``(c, b, sigma_2)`` at the minimum.
    """
    best = (math.nan, math.nan, math.inf)
    for c in np.linspace(1.5, c_max, n_c):
        bmax = 1.0 / (2 * c + 1)
        for b in np.linspace(bmax / n_b, bmax, n_b):
            log_s2 = 0.5 * _log_x2(c, b, a)
            if log_s2 < best[2]:
                best = (float(c), float(b), log_s2)
    return best[0], best[1], math.exp(best[2])


# ---------------------------------------------------------------------------
# truncated power exponential
# ---------------------------------------------------------------------------

@dataclass
class TruncatedPowerExpState:
    """Power exponential out to ``match_at * sigma_2``, a quartic bridge to zero at
    ``zero_at * sigma_2``, and zero beyond.

    The quartic matches value, slope and curvature at the inner junction and
    has zero value and slope at the outer one.
    """

    c: float
    b: float
    a: float = 1.0
    match_at: float = 6.0
    zero_at: float = 15.0
    hbar: float = 1.0
    mass: float = 1.0

    name = "power_exp_truncated"

    def __post_init__(self):
        _check_power_exp(self.c, self.b, self.a)
        if not (self.zero_at > self.match_at > 0):
            raise InvalidInputError("singular matching system: need zero_at > match_at > 0")
        self.base = PowerExpState(self.c, self.b, self.a, self.hbar, self.mass)
        sig = self.base.closed["sigma2"]
        self.x1 = self.match_at * sig
        self.x2 = self.zero_at * sig
        self._ig = _PowerExpIntegrands(self.c, self.b, self.a)
        self.coeffs = self._match()
        self.closed = self._moments()

    @property
    def params(self):
        return {"c": self.c, "b": self.b, "a": self.a, "match_at": self.match_at,
                "zero_at": self.zero_at}

    def _psi_derivs(self, x):
        """``psi, psi', psi''`` of the untruncated state at ``x > 0``, scaled by exp(-shift/2)."""
        s = (x / self.a) ** self.b
        logpsi = self.c * math.log(x) - s - 0.5 * self._ig.shift
        psi = math.exp(logpsi)
        g = self.c - self.b * s
        h = g * g - g - self.b * self.b * s
        return psi, psi * g / x, psi * h / (x * x)

    def _match(self):
        L = self.x2 - self.x1
        if not L > 0:
            raise InvalidInputError("singular matching system: junction points coincide")
        v, d1, d2 = self._psi_derivs(self.x1)
        # quartic in xi = (x - x1)/L
        A = np.array([
            [1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 2, 0, 0],
            [1, 1, 1, 1, 1],
            [0, 1, 2, 3, 4],
        ], dtype=float)
        rhs = np.array([v, L * d1, L * L * d2, 0.0, 0.0])
        if abs(np.linalg.det(A)) < 1e-12:
            raise InvalidInputError("singular matching system")
        return np.linalg.solve(A, rhs)

    def _quartic(self, x, deriv=0):
        L = self.x2 - self.x1
        xi = (np.asarray(x, dtype=float) - self.x1) / L
        q = np.polynomial.polynomial.Polynomial(self.coeffs)
        for _ in range(deriv):
            q = q.deriv()
        return q(xi) / L ** deriv

    def psi(self, x):
        """Wavefunction values (carrying the internal scale factor; moments are ratios)."""
        ax = np.abs(np.asarray(x, dtype=float))
        out = np.zeros_like(ax)
        inner = (ax > 0) & (ax <= self.x1)
        mid = (ax > self.x1) & (ax < self.x2)
        s = (ax[inner] / self.a) ** self.b
        out[inner] = np.exp(self.c * np.log(ax[inner]) - s - 0.5 * self._ig.shift)
        out[mid] = self._quartic(ax[mid])
        return out

    def junction_mismatch(self):
        """Relative jumps of ``psi, psi', psi''`` at the inner junction."""
        ref = self._psi_derivs(self.x1)
        got = [float(self._quartic(self.x1, d)) for d in range(3)]
        return [abs(g - r) / abs(r) for g, r in zip(got, ref)]

    def _outer_integral(self, kind):
        x1, x2 = self.x1, self.x2

        def f(x):
            q = float(self._quartic(x))
            q1 = float(self._quartic(x, 1))
            q2 = float(self._quartic(x, 2))
            return {"norm": q * q, "x2": x * x * q * q, "x4": x ** 4 * q * q, "p2": q1 * q1,
                    "xp": x * x * q1 * q1, "p4": q2 * q2}[kind]

        return _quad(f, x1, x2)

    def _moments(self):
        s1 = (self.x1 / self.a) ** self.b
        I = {k: self._ig.integral(k, s_hi=s1) + self._outer_integral(k)
             for k in self._ig.EXPONENT}
        m = _moments_from_integrals(I, self.hbar)
        return _derived(m)

    def moment_vector(self, order):
        m = self.closed
        if order == 2:
            return MomentVector(2, [m["x2"], 0.0, m["p2"]], self.mass, self.hbar)
        if order == 4:
            return MomentVector(4, [m["y0"], 0.0, m["y2"], 0.0, m["y4"]], self.mass, self.hbar)
        raise InvalidInputError(f"truncated state exposes orders 2 and 4, not {order}")

    def shape_metrics(self):
        m = self.closed
        return ShapeMetrics(m["sigma2"], m["sigma4"], 0.0, m["kurtosis"])

    def grid(self, points=4096, extent=None):
        extent = 2.1 * self.x2 if extent is None else extent
        return GridWavefunction.from_function(self.psi, points, extent, hbar=self.hbar,
                                              mass=self.mass)


def make_truncated_power_exponential(c, b, a=1.0, match_at=6.0, zero_at=15.0, hbar=1.0,
                                     mass=1.0):
    return TruncatedPowerExpState(c, b, a, match_at, zero_at, hbar, mass)


_DEFAULTS = {
    "gaussian": {"a": 1.0},
    "skew_gaussian": {"b": 0.671, "a": 1.0},
    "abs_exp": {"a": 1.0},
    "sqrt_exp": {"a": 1.0},
    "power_exp": {"c": 1.51, "b": 0.24, "a": 1.0},
    "power_exp_truncated": {"c": 1.51, "b": 0.24, "a": 1.0, "match_at": 6.0, "zero_at": 15.0},
}


def make_family(name, hbar=1.0, mass=1.0, points=None, extent=None, **params):
    """Construct a family by its CLI name with float parameters."""
    if name not in _DEFAULTS:
        raise InvalidInputError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}")
    unknown = set(params) - set(_DEFAULTS[name])
    if unknown:
        raise InvalidInputError(f"unknown parameters for {name}: {sorted(unknown)}")
    p = dict(_DEFAULTS[name])
    p.update({k: float(v) for k, v in params.items()})
    grid_kw = {}
    if points is not None:
        grid_kw["points"] = int(points)
    if extent is not None:
        grid_kw["extent"] = float(extent)
    if name == "gaussian":
        return make_gaussian(p["a"], hbar, mass, **grid_kw)
    if name == "skew_gaussian":
        return make_skew_gaussian(p["b"], p["a"], hbar, mass, **grid_kw)
    if name == "abs_exp":
        return make_abs_exp(p["a"], hbar, mass, **grid_kw)
    if name == "sqrt_exp":
        return make_sqrt_exp(p["a"], hbar, mass, **grid_kw)
    if name == "power_exp":
        return make_power_exponential(p["c"], p["b"], p["a"], hbar, mass)
    return make_truncated_power_exponential(p["c"], p["b"], p["a"], p["match_at"],
                                            p["zero_at"], hbar, mass)


def random_smooth_state(rng, points=512, extent=40.0, hbar=1.0, mass=1.0):
    """A superposition of 1-3 kicked Gaussians, resolved well inside half-Nyquist."""
    terms = int(rng.integers(1, 4))
    centers = rng.uniform(-3.0, 3.0, terms)
    widths = rng.uniform(0.7, 1.5, terms)
    kicks = rng.uniform(-2.0, 2.0, terms)
    coef = rng.normal(size=terms) + 1j * rng.normal(size=terms)

    def f(x):
        out = np.zeros_like(x, dtype=complex)
        for c, w, k, z in zip(centers, widths, kicks, coef):
            out += z * np.exp(-0.5 * ((x - c) / w) ** 2 + 1j * k * x)
        return out

    return GridWavefunction.from_function(f, points, extent, hbar=hbar, mass=mass)
