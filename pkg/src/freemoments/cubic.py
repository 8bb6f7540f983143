"""Real roots of the depressed cubic ``c3 u**3 + c1 u + c0``.

Three distinct roots use the trigonometric form, one root uses Cardano with
the cancellation-free sign choice, and a discriminant within ``DISC_RTOL`` of
zero (relative to its own terms) is treated as a repeated root.  Every root is
finished with Newton steps.
"""

import math

import numpy as np

from .errors import InvalidInputError

DISC_RTOL = 1e-12


def _newton(c3, c1, c0, u, steps=3):
    for _ in range(steps):
        f = (c3 * u * u + c1) * u + c0
        df = 3.0 * c3 * u * u + c1
        if df == 0.0:
            break
        du = f / df
        if not math.isfinite(du):
            break
        u -= du
        if abs(du) <= 1e-16 * max(abs(u), 1e-300):
            break
    return u


def cubic_real_roots(c3, c1, c0):
    """Sorted real roots of ``c3 u^3 + c1 u + c0`` (one, two or three of them).

    A repeated root is reported once, so two roots means one of them is double.
    ``c3 == 0`` falls back to the linear equation; a constant polynomial
    raises.
    """
    c3, c1, c0 = float(c3), float(c1), float(c0)
    if not all(math.isfinite(v) for v in (c3, c1, c0)):
        raise InvalidInputError("cubic coefficients must be finite")
    if c3 == 0.0:
        if c1 == 0.0:
            raise InvalidInputError("degenerate cubic: no leading or linear term")
        return np.array([-c0 / c1])

    # rescale u = lam v so that the coefficients are O(1); avoids under/overflow in p^3, q^2.
    # divisions are chained so that subnormal inputs are not flushed to zero
    lam = max(math.sqrt(abs(c1 / c3)), (abs(c0) ** (1.0 / 3.0)) / (abs(c3) ** (1.0 / 3.0)))
    if lam == 0.0:
        return np.array([0.0])
    pv = c1 / lam / lam / c3
    qv = c0 / lam / lam / lam / c3
    roots = lam * _unit_roots(pv, qv)
    # with a double root only the simple one (listed first) is polished
    polish = roots[:1] if roots.size == 2 else roots
    roots[:polish.size] = [_newton(c3, c1, c0, r) for r in polish]
    return np.sort(roots)


def _unit_roots(p, q):
    """Real roots of ``v^3 + p v + q`` with ``max(|p|, |q|)`` of order one."""
    # discriminant of v^3 + p v + q is -(4p^3 + 27q^2)
    a, b = 4.0 * p ** 3, 27.0 * q * q
    d = a + b
    scale = abs(a) + b
    if abs(d) <= DISC_RTOL * scale:
        # double root at -3q/(2p), simple root at 3q/p
        if p == 0.0:
            return np.array([0.0])
        return np.array([3.0 * q / p, -1.5 * q / p])
    if d < 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = min(1.0, max(-1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        return np.array([m * math.cos(theta - 2.0 * math.pi * j / 3.0) for j in range(3)])
    s = math.sqrt(d / 108.0)
    w = -0.5 * q + math.copysign(s, -q)
    A = math.copysign(abs(w) ** (1.0 / 3.0), w)
    return np.array([A - p / (3.0 * A) if A != 0.0 else 0.0])


def cubic_residual(c3, c1, c0, u):
    """``|poly(u)|`` relative to the magnitude of its individual terms."""
    terms = np.abs([c3 * u ** 3, c1 * u, c0])
    val = abs(c3 * u ** 3 + c1 * u + c0)
    s = terms.sum()
    return val / s if s > 0 else val
