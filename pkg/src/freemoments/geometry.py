"""Shape of the free evolution of ``Y_0`` for third- and fourth-order moments.

Critical points are located in the scaled time ``u = (t - t0)/m`` measured
from the reference time ``t0 = -m y_{n-1}/y_n``.  Extrema of ``Y_0`` sit at
zeros of ``Y_1`` and inflections at zeros of ``Y_2``.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .cubic import DISC_RTOL, cubic_real_roots
from .errors import DegenerateTopMomentError, InvalidInputError
from .moments import InvariantSet, MomentVector, invariants, propagate, reference_time

MINIMUM, MAXIMUM, INFLECTION = "minimum", "maximum", "inflection"

MONOTONE_INFLECTION = "MONOTONE_INFLECTION"
MAX_INFLECTION_MIN = "MAX_INFLECTION_MIN"
SINGLE_MIN = "SINGLE_MIN"
SINGLE_MIN_WITH_INFLECTIONS = "SINGLE_MIN_WITH_INFLECTIONS"
MIN_MAX_MIN = "MIN_MAX_MIN"
QUADRATIC_EXTREMUM = "QUADRATIC_EXTREMUM"
NO_CRITICAL_POINTS = "NO_CRITICAL_POINTS"

BOUNDARY_RTOL = DISC_RTOL


@dataclass(frozen=True)
class CriticalPoint:
    u: float
    kind: str
    value: float

    def to_dict(self):
        return {"u": float(self.u), "kind": self.kind, "value": float(self.value)}


@dataclass
class GeometryReport:
    order: int
    case_label: str
    u0: Optional[float]
    critical_points: List[CriticalPoint]
    invariants_used: Optional[InvariantSet]
    t0: float = 0.0
    mass: float = 1.0
    boundary: bool = False
    time_reversed: bool = False
    # times u (besides 0) where Y_0 returns to its u=0 value; real-ψ fourth order only
    return_points: List[float] = field(default_factory=list)

    def times(self):
        """Critical-point times ``t = t0 + m u``."""
        return [self.t0 + self.mass * cp.u for cp in self.critical_points]

    def extrema(self):
        return [cp for cp in self.critical_points if cp.kind != INFLECTION]

    def to_dict(self):
        d = {
            "order": self.order,
            "case": self.case_label,
            "u0": None if self.u0 is None else float(self.u0),
            "critical_points": [cp.to_dict() for cp in self.critical_points],
            "boundary": bool(self.boundary),
            "t0": float(self.t0),
        }
        if self.time_reversed:
            d["time_reversed"] = True
        if self.return_points:
            d["return_points"] = [float(u) for u in self.return_points]
        return d


def _sorted(points):
    return sorted(points, key=lambda cp: cp.u)


def _refine(y, rep, steps=2):
    """Polish critical times against the original moments and re-evaluate values.

    ``t = t0 + m u`` cancels badly when ``t0`` is far from the origin, and
    values assembled from invariants can lose digits the same way.  A Newton
    step on ``Y_k(t)`` (``dY_k/dt = (n-k)/m Y_{k+1}``) is kept only if it
    reduces ``|Y_k|``; the value is then ``Y_0`` propagated directly.
    """
    n, m = y.order, y.mass
    pts = []
    for cp in rep.critical_points:
        k = 2 if cp.kind == INFLECTION else 1
        t = rep.t0 + m * cp.u
        Y = propagate(y, t).values
        for _ in range(steps):
            d = (n - k) / m * Y[k + 1]
            if d == 0.0 or Y[k] == 0.0:
                break
            tn = t - Y[k] / d
            Yn = propagate(y, tn).values
            if not abs(Yn[k]) < abs(Y[k]):
                break
            t, Y = tn, Yn
        u = (t - rep.t0) / m if t != rep.t0 + m * cp.u else cp.u
        pts.append(CriticalPoint(u, cp.kind, float(Y[0])))
    rep.critical_points = pts
    return rep


def _check_order(y, n):
    if y.order != n:
        raise InvalidInputError(f"expected order-{n} moments, got order {y.order}")


# ---------------------------------------------------------------------------
# third order
# ---------------------------------------------------------------------------

def classify_third(y):
    """Classify the evolution of the skewness ``Y_0 = <X^3>``.

    Negative ``y_3`` is handled by reversing time (which flips the sign of
    every odd-``k`` moment), classifying, and reflecting ``u`` back.
    """
    _check_order(y, 3)
    y3 = y[3]
    if y3 == 0:
        raise DegenerateTopMomentError("y_3 = 0: use special_case_topzero")
    if y3 < 0:
        flipped = y.with_values(y.values * np.array([1.0, -1.0, 1.0, -1.0]))
        rep = classify_third(flipped)
        rep.critical_points = _sorted(
            CriticalPoint(-cp.u, cp.kind, cp.value) for cp in rep.critical_points)
        rep.t0 = reference_time(y)
        rep.invariants_used = invariants(y)
        rep.time_reversed = True
        return _refine(y, rep)

    zs = invariants(y)
    om, lam = zs.omega, zs.lam
    inflection = CriticalPoint(0.0, INFLECTION, lam / y3 ** 2)
    boundary = abs(om) <= BOUNDARY_RTOL * max(y[1] * y3, y[2] ** 2, abs(om))
    if om >= 0 or boundary:
        return _refine(y, GeometryReport(3, MONOTONE_INFLECTION, None, [inflection], zs,
                                         t0=zs.t0, mass=y.mass, boundary=boundary))
    root = abs(om) ** 1.5
    u0 = math.sqrt(-om) / y3
    pts = [
        CriticalPoint(-u0, MAXIMUM, (lam + 2.0 * root) / y3 ** 2),
        inflection,
        CriticalPoint(u0, MINIMUM, (lam - 2.0 * root) / y3 ** 2),
    ]
    return _refine(y, GeometryReport(3, MAX_INFLECTION_MIN, u0, pts, zs, t0=zs.t0, mass=y.mass))


def special_case_topzero(y):
    """Third order with ``y_3 = 0``: ``Y_0`` is quadratic in time."""
    _check_order(y, 3)
    if y[3] != 0:
        raise InvalidInputError("special case requires y_3 = 0")
    y0, y1, y2 = y[0], y[1], y[2]
    if y2 == 0:
        return GeometryReport(3, NO_CRITICAL_POINTS, None, [], None, t0=0.0, mass=y.mass)
    t0 = -y.mass * y1 / (2.0 * y2)
    kind = MINIMUM if y2 > 0 else MAXIMUM
    cp = CriticalPoint(0.0, kind, y0 - 3.0 * y1 * y1 / (4.0 * y2))
    return GeometryReport(3, QUADRATIC_EXTREMUM, None, [cp], None, t0=t0, mass=y.mass)


# ---------------------------------------------------------------------------
# fourth order
# ---------------------------------------------------------------------------

def fourth_order_curves(zs, u):
    """``(Y_0, Y_1, Y_2, Y_3)`` at scaled time ``u`` from the invariants."""
    y4 = zs.yn
    om, lam, th = zs.omega, zs.lam, zs.theta
    u = np.asarray(u, dtype=float)
    Y0 = y4 * u ** 4 + 6.0 * (om / y4) * u ** 2 + 4.0 * (lam / y4 ** 2) * u + th / y4 ** 3
    Y1 = y4 * u ** 3 + 3.0 * (om / y4) * u + lam / y4 ** 2
    Y2 = y4 * u ** 2 + om / y4
    return Y0, Y1, Y2, y4 * u


def classify_fourth(y, raw=False):
    """Classify the evolution of ``Y_0 = <X^4>``.

    ``raw=True`` admits non-positive ``y_0``/``y_4`` (classical data
    exploration); quantum input must have both positive.
    """
    _check_order(y, 4)
    y4 = y[4]
    if y4 == 0:
        raise DegenerateTopMomentError("y_4 = 0")
    if not raw and (y4 <= 0 or y[0] <= 0):
        raise InvalidInputError("fourth-order quantum moments need y_0 > 0 and y_4 > 0")
    if y4 < 0:
        raise InvalidInputError("negative y_4 cannot be classified")

    zs = invariants(y)
    om, lam = zs.omega, zs.lam

    def value(u):
        return float(fourth_order_curves(zs, u)[0])

    roots = cubic_real_roots(y4, 3.0 * om / y4, lam / y4 ** 2)
    om_scale = max(abs(y[2] * y4), y[3] ** 2)
    om_zero = abs(om) <= BOUNDARY_RTOL * om_scale

    if om > 0 and not om_zero:
        u = float(roots[0]) if len(roots) == 1 else float(roots[np.argmin([value(r) for r in roots])])
        return _refine(y, GeometryReport(4, SINGLE_MIN, None,
                                         [CriticalPoint(u, MINIMUM, value(u))],
                                         zs, t0=zs.t0, mass=y.mass))

    om_abs = 0.0 if om_zero else abs(om)
    u0 = math.sqrt(om_abs) / y4
    edge = 2.0 * om_abs ** 1.5
    lam_scale = abs(y[1] * y4 ** 2) + 2 * abs(y[3]) ** 3 + 3 * abs(y[2] * y[3] * y4)
    boundary = om_zero or abs(abs(lam) - edge) <= BOUNDARY_RTOL * max(edge, lam_scale)

    inflections = []
    if u0 > 0:
        for s in (-1.0, 1.0):
            inflections.append(CriticalPoint(
                s * u0, INFLECTION,
                (zs.theta - 5.0 * om * om + s * 4.0 * math.sqrt(om_abs) * lam) / y4 ** 3))

    if len(roots) == 2:
        boundary = True
    if abs(lam) > edge or boundary:
        # the only true minimum is the simple root; a double root is a stationary inflection
        if len(roots) == 1:
            umin = float(roots[0])
        else:
            umin = float(roots[0]) if lam > 0 else float(roots[-1])
            if len(roots) == 3:
                umin = float(roots[np.argmin([value(r) for r in roots])])
        pts = [CriticalPoint(umin, MINIMUM, value(umin))] + inflections
        return _refine(y, GeometryReport(4, SINGLE_MIN_WITH_INFLECTIONS, u0, _sorted(pts), zs,
                                         t0=zs.t0, mass=y.mass, boundary=boundary))

    r = [float(v) for v in roots]
    pts = [CriticalPoint(r[0], MINIMUM, value(r[0])),
           CriticalPoint(r[1], MAXIMUM, value(r[1])),
           CriticalPoint(r[2], MINIMUM, value(r[2]))] + inflections
    return _refine(y, GeometryReport(4, MIN_MAX_MIN, u0, _sorted(pts), zs, t0=zs.t0,
                                     mass=y.mass))


def real_initial_fourth(y0, y2, y4, mass=1.0):
    """Fourth-order shape for a real initial wavefunction (``y_1 = y_3 = 0``)."""
    if not y4 > 0:
        raise InvalidInputError("y_4 must be positive")
    zs = invariants(MomentVector(4, [y0, 0.0, y2, 0.0, y4], mass))
    if y2 >= 0:
        return GeometryReport(4, SINGLE_MIN, None, [CriticalPoint(0.0, MINIMUM, y0)], zs,
                              t0=0.0, mass=mass, boundary=(y2 == 0))
    u0 = math.sqrt(-y2 / y4)
    umin = math.sqrt(3.0) * u0
    vmin = y0 - 9.0 * y2 * y2 / y4
    vinf = y0 - 5.0 * y2 * y2 / y4
    pts = [
        CriticalPoint(-umin, MINIMUM, vmin),
        CriticalPoint(-u0, INFLECTION, vinf),
        CriticalPoint(0.0, MAXIMUM, y0),
        CriticalPoint(u0, INFLECTION, vinf),
        CriticalPoint(umin, MINIMUM, vmin),
    ]
    back = math.sqrt(6.0) * u0
    return GeometryReport(4, MIN_MAX_MIN, u0, pts, zs, t0=0.0, mass=mass,
                          return_points=[-back, back])


def classify(y, raw=False):
    """Dispatch on order, routing ``y_3 = 0`` to the special-case classifier."""
    if y.order == 3:
        if y[3] == 0:
            return special_case_topzero(y)
        return classify_third(y)
    if y.order == 4:
        return classify_fourth(y, raw=raw)
    raise InvalidInputError(f"classification is available for orders 3 and 4, not {y.order}")
