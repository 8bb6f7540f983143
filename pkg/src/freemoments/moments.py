"""Exact free evolution of symmetrized moments and their invariants.

A moment vector of order ``n`` holds ``y_k`` for ``k = 0..n``: the symmetrized
expectation of ``k`` momentum deviations and ``n - k`` position deviations,
both taken about the centroid.  Under free motion every entry is a polynomial
in ``t/m`` whose coefficients are binomials times later entries, so the whole
module is low-degree polynomial arithmetic.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTopMomentError, InvalidInputError

MAX_ORDER = 64
_BINOM = [[math.comb(r, j) for j in range(r + 1)] for r in range(MAX_ORDER + 1)]

REL_TOL = 1e-10
ABS_FLOOR = 1e-14


def binom(r, j):
    """Exact binomial coefficient ``C(r, j)`` for ``0 <= r <= 64``."""
    if r > MAX_ORDER:
        raise InvalidInputError(f"order {r} exceeds the supported maximum {MAX_ORDER}")
    return _BINOM[r][j]


def close(a, b, rel=REL_TOL, abs_floor=ABS_FLOOR):
    """Elementwise ``|a - b| <= max(rel * max(|a|, |b|), abs_floor)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tol = np.maximum(rel * np.maximum(np.abs(a), np.abs(b)), abs_floor)
    return bool(np.all(np.abs(a - b) <= tol))


def _finite(x, what):
    if not math.isfinite(x):
        raise InvalidInputError(f"{what} must be finite, got {x!r}")


@dataclass(frozen=True)
class MomentVector:
    """Order-``n`` symmetrized moments ``y_0..y_n`` with their unit context.

    ``values[k]`` has units of length**(n-k) * momentum**k.
    """

    order: int
    values: np.ndarray
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        n = int(self.order)
        if n < 1:
            raise InvalidInputError(f"order must be >= 1, got {n}")
        if n > MAX_ORDER:
            raise InvalidInputError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
        if vals.shape[0] != n + 1:
            raise InvalidInputError(f"order {n} needs {n + 1} values, got {vals.shape[0]}")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("moment values must be finite")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise InvalidInputError(f"mass must be positive, got {self.mass!r}")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise InvalidInputError(f"hbar must be positive, got {self.hbar!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "order", n)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mass", float(self.mass))
        object.__setattr__(self, "hbar", float(self.hbar))

    def __getitem__(self, k):
        return float(self.values[k])

    def __len__(self):
        return self.order + 1

    @property
    def top(self):
        return float(self.values[-1])

    def is_physical_quantum(self):
        """For even order a quantum state has ``y_0 > 0`` and ``y_n > 0``."""
        if self.order % 2:
            return True
        return self.values[0] > 0 and self.values[-1] > 0

    def with_values(self, values):
        return MomentVector(self.order, values, self.mass, self.hbar)

    def to_dict(self):
        return {
            "order": self.order,
            "values": [float(v) for v in self.values],
            "mass": self.mass,
            "hbar": self.hbar,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["order"]), d["values"], d.get("mass", 1.0), d.get("hbar", 1.0))


@dataclass(frozen=True)
class InvariantSet:
    """Invariants ``Z_0..Z_n`` of an order-``n`` moment vector.

    ``Z_2``, ``Z_3`` and ``Z_4`` are the Omega, Lambda and Theta combinations.
    ``t0`` is the time at which ``Y_{n-1}`` vanishes and ``yn`` the conserved
    top moment.
    """

    order: int
    z: np.ndarray
    t0: float
    yn: float
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        z = np.array(self.z, dtype=np.float64).reshape(-1)
        if z.shape[0] != self.order + 1:
            raise InvalidInputError(f"order {self.order} needs {self.order + 1} invariants")
        if not np.all(np.isfinite(z)) or not math.isfinite(self.t0):
            raise InvalidInputError("invariants must be finite")
        if self.yn == 0:
            raise DegenerateTopMomentError("invariant set needs a nonzero top moment")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def omega(self):
        return float(self.z[2]) if self.order >= 2 else 0.0

    @property
    def lam(self):
        return float(self.z[3]) if self.order >= 3 else 0.0

    @property
    def theta(self):
        return float(self.z[4]) if self.order >= 4 else 0.0

    def to_dict(self):
        return {
            "order": self.order,
            "z": [float(v) for v in self.z],
            "t0": float(self.t0),
            "yn": float(self.yn),
        }

    @classmethod
    def from_dict(cls, d, mass=1.0, hbar=1.0):
        return cls(int(d["order"]), d["z"], float(d["t0"]), float(d["yn"]),
                   d.get("mass", mass), d.get("hbar", hbar))


@dataclass(frozen=True)
class CentroidState:
    x0: float
    p: float
    mass: float = 1.0

    def to_dict(self):
        return {"x": self.x0, "p": self.p, "mass": self.mass}


def propagate(y, t):
    """Moments at time ``t`` from the moments ``y`` at time 0.

    ``Y_k = sum_l C(n-k, l) (t/m)**l y_{k+l}``.  The top entry is copied, never
    recomputed, so it is conserved exactly.
    """
    t = float(t)
    _finite(t, "t")
    n = y.order
    tau = t / y.mass
    src = y.values
    out = np.empty(n + 1)
    powers = tau ** np.arange(n + 1)
    for k in range(n):
        r = n - k
        acc = 0.0
        for l in range(r + 1):
            acc += _BINOM[r][l] * powers[l] * src[k + l]
        out[k] = acc
    out[n] = src[n]
    return y.with_values(out)


def derivative(y):
    """Time derivatives ``d_t Y_k = (n - k) Y_{k+1} / m``; zero for ``k = n``."""
    n = y.order
    out = np.zeros(n + 1)
    for k in range(n):
        out[k] = (n - k) * y.values[k + 1] / y.mass
    return out


def reference_time(y):
    """``t0 = -m y_{n-1} / y_n``, the time at which ``Y_{n-1}`` vanishes."""
    yn = y.values[-1]
    if yn == 0:
        raise DegenerateTopMomentError(
            f"y_{y.order} = 0: reference time undefined; use the reduced-order analysis")
    # + 0.0 turns a signed zero into +0.0 for clean output
    return -y.mass * float(y.values[-2]) / float(yn) + 0.0


def invariants(y):
    """The polynomial invariants ``Z_0..Z_n`` of ``y``.

    ``Z_l = sum_j C(l, j) y_{n-l+j} (-y_{n-1})**j y_n**(l-j-1)``, with the last
    two terms of the sum merged into ``-(l-1)(-y_{n-1})**l`` so that no
    division by ``y_n`` occurs.
    """
    n = y.order
    v = y.values
    yn = float(v[n])
    if yn == 0:
        raise DegenerateTopMomentError(
            f"y_{n} = 0: invariants undefined; use the reduced-order analysis")
    ym = -float(v[n - 1])
    z = np.zeros(n + 1)
    z[0] = 1.0
    for l in range(2, n + 1):
        acc = 0.0
        for j in range(l - 1):
            acc += _BINOM[l][j] * v[n - l + j] * ym ** j * yn ** (l - j - 1)
        z[l] = acc - (l - 1) * ym ** l
    return InvariantSet(n, z, reference_time(y), yn, y.mass, y.hbar)


def moments_from_invariants(zset, u):
    """Moments at scaled time ``u = (t - t0)/m`` rebuilt from the invariants.

    ``Y_k = sum_j C(n-k, j) Z_{n-k-j} u**j / y_n**(n-k-j-1)``.
    """
    u = float(u)
    _finite(u, "u")
    n = zset.order
    yn = float(zset.yn)
    z = zset.z
    out = np.empty(n + 1)
    for k in range(n + 1):
        r = n - k
        acc = 0.0
        for j in range(r + 1):
            acc += _BINOM[r][j] * z[r - j] * u ** j * yn ** (1 - (r - j))
        out[k] = acc
    out[n] = yn
    return MomentVector(n, out, zset.mass, zset.hbar)


def second_order_waist(y):
    """Time and value of the minimum of ``Y_0`` for a second-order vector."""
    if y.order != 2:
        raise InvalidInputError("waist is defined for order-2 moments")
    y0, y1, y2 = (float(v) for v in y.values)
    if not y2 > 0:
        raise InvalidInputError(f"second momentum moment must be positive, got {y2}")
    return -y.mass * y1 / y2, (y0 * y2 - y1 * y1) / y2


def centroid_evolve(c, t):
    t = float(t)
    _finite(t, "t")
    return CentroidState(c.x0 + c.p * t / c.mass, c.p, c.mass)


def propagate_scales(y, t):
    """Magnitude of the terms summed by :func:`propagate`, per component.

    Used as the denominator of relative-error checks, since a component can
    be near zero by cancellation.
    """
    n = y.order
    tau = abs(float(t) / y.mass)
    a = np.abs(y.values)
    out = np.empty(n + 1)
    for k in range(n + 1):
        r = n - k
        out[k] = sum(_BINOM[r][l] * tau ** l * a[k + l] for l in range(r + 1))
    return out


def invariant_scales(y):
    """Magnitude of the terms summed by :func:`invariants` (before merging), per ``Z_l``."""
    n = y.order
    a = np.abs(y.values)
    ym, yn = a[n - 1], a[n]
    out = np.ones(n + 1)
    for l in range(1, n + 1):
        out[l] = sum(_BINOM[l][j] * a[n - l + j] * ym ** j * yn ** (l - j - 1)
                     for j in range(l - 1)) + (l + 1) * ym ** l
    return out
