"""Inequalities constraining second- and fourth-order moments.

Each check returns an :class:`InequalityReport` of the form ``lhs >= rhs``.
"""

import math
from dataclasses import dataclass, field

from .errors import InvalidInputError

SCHRODINGER_2 = "SCHRODINGER_2"
HEISENBERG_2 = "HEISENBERG_2"
OMEGA4_BOUND = "OMEGA4_BOUND"
EVEN_PRODUCT = "EVEN_PRODUCT"
KURT_SKEW_X = "KURT_SKEW_X"
KURT_SKEW_P = "KURT_SKEW_P"

# y_0 y_n >= c_n hbar^n
EVEN_PRODUCT_CONSTANTS = {2: 0.25, 4: 0.375}


def tolerance(rhs):
    return max(1e-10, 1e-6 * abs(rhs))


def saturation_ratio(lhs, rhs):
    """How close ``lhs`` sits to its bound, in ``[0, 1]`` when satisfied.

    ``rhs/lhs`` for a positive bound, ``lhs/rhs`` when both sides are
    negative, and 0 otherwise.
    """
    if lhs > 0 and rhs > 0:
        return rhs / lhs
    if lhs < 0 and rhs < 0:
        return lhs / rhs
    return 0.0


@dataclass
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    margin: float = field(init=False)
    satisfied: bool = field(init=False)
    saturation_ratio: float = field(init=False)
    source: str = "quantum"
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        self.margin = self.lhs - self.rhs
        self.satisfied = self.lhs >= self.rhs - tolerance(self.rhs)
        self.saturation_ratio = saturation_ratio(self.lhs, self.rhs)

    def to_dict(self):
        d = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
             "satisfied": self.satisfied, "saturation_ratio": self.saturation_ratio,
             "source": self.source}
        if self.details:
            d["details"] = self.details
        return d


def check_schrodinger(y, source="quantum"):
    """``Omega_2 = y_0 y_2 - y_1^2 >= hbar^2/4``."""
    if y.order != 2:
        raise InvalidInputError("Schrodinger check needs order-2 moments")
    y0, y1, y2 = y[0], y[1], y[2]
    rep = InequalityReport(SCHRODINGER_2, y0 * y2 - y1 * y1, 0.25 * y.hbar ** 2, source=source)
    if source != "quantum" and not rep.satisfied:
        rep.details["note"] = "non-quantum input; the bound applies to quantum states only"
    return rep


def check_heisenberg(y, source="quantum"):
    """``y_0 y_2 >= hbar^2/4``."""
    if y.order != 2:
        raise InvalidInputError("Heisenberg check needs order-2 moments")
    return InequalityReport(HEISENBERG_2, y[0] * y[2], 0.25 * y.hbar ** 2, source=source)


def check_omega4_bound(y4, p2, p4, source="quantum"):
    """``Omega_4 = y_2 y_4 - y_3^2 >= (<P^2>^2 - <P^4>/4) hbar^2``.

    For an even or odd state (``y_3 = 0``) the equivalent bound on ``y_2`` is
    attached under ``details["y2_form"]``.
    """
    if y4.order != 4:
        raise InvalidInputError("Omega_4 bound needs order-4 moments")
    if not p4 > 0:
        raise InvalidInputError(f"<P^4> must be positive, got {p4}")
    hb2 = y4.hbar ** 2
    om = y4[2] * y4[4] - y4[3] ** 2
    rep = InequalityReport(OMEGA4_BOUND, om, (p2 * p2 - 0.25 * p4) * hb2, source=source)
    if abs(y4[3]) <= 1e-12 * math.sqrt(abs(y4[2] * y4[4])) or y4[3] == 0:
        rhs = (p2 * p2 / p4 - 0.25) * hb2
        rep.details["y2_form"] = {"lhs": y4[2], "rhs": rhs,
                                  "satisfied": y4[2] >= rhs - tolerance(rhs)}
    return rep


def check_even_product(y0, yn, n, hbar=1.0, source="quantum"):
    """``y_0 y_n >= c_n hbar^n`` with ``c_2 = 1/4`` and ``c_4 = 3/8``."""
    if n not in EVEN_PRODUCT_CONSTANTS:
        raise InvalidInputError(f"c_n is only known here for n in (2, 4), not {n}")
    if not (y0 > 0 and yn > 0):
        raise InvalidInputError("even-order y_0 and y_n must be positive")
    return InequalityReport(EVEN_PRODUCT, y0 * yn, EVEN_PRODUCT_CONSTANTS[n] * hbar ** n,
                            source=source, details={"n": n})


def check_kurtosis_skewness(m2, m3, m4, which="x", source="quantum"):
    """``m4/m2^2 >= m3^2/m2^3`` for position (``which="x"``) or momentum moments."""
    if not m2 > 0:
        raise InvalidInputError(f"second moment must be positive, got {m2}")
    name = KURT_SKEW_X if which == "x" else KURT_SKEW_P
    return InequalityReport(name, m4 / (m2 * m2), m3 * m3 / m2 ** 3, source=source)


def full_report(order2, order3, order4, source="quantum"):
    """Every applicable check from moment vectors of orders 2, 3 and 4."""
    p2, p4 = order2[2], order4[4]
    reports = [check_schrodinger(order2, source), check_heisenberg(order2, source)]
    if p4 > 0:
        reports.append(check_omega4_bound(order4, p2, p4, source))
    if order4[0] > 0 and order4[4] > 0:
        reports.append(check_even_product(order4[0], order4[4], 4, order4.hbar, source))
    if order2[0] > 0:
        reports.append(check_kurtosis_skewness(order2[0], order3[0], order4[0], "x", source))
    if p2 > 0:
        reports.append(check_kurtosis_skewness(p2, order3[3], p4, "p", source))
    return reports
