"""Moments of free classical particle ensembles.

Each particle drifts with ``x <- x + p t / m``; moments are averages of
``P^k X^(n-k)`` over deviations from the ensemble centroid, and obey the same
polynomial evolution law as the symmetrized quantum moments.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DegenerateEnsembleError, InvalidInputError
from .moments import CentroidState, MomentVector


@dataclass(frozen=True)
class ParticleEnsemble:
    positions: np.ndarray
    momenta: np.ndarray
    mass: float = 1.0

    def __post_init__(self):
        x = np.array(self.positions, dtype=np.float64).reshape(-1)
        p = np.array(self.momenta, dtype=np.float64).reshape(-1)
        if x.shape != p.shape:
            raise DegenerateEnsembleError("positions and momenta differ in length")
        if x.shape[0] < 2:
            raise DegenerateEnsembleError(f"need at least two particles, got {x.shape[0]}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise InvalidInputError("ensemble coordinates must be finite")
        m = np.asarray(self.mass, dtype=np.float64)
        if m.ndim:
            if m.shape[0] != x.shape[0] or np.any(m != m[0]):
                raise DegenerateEnsembleError("only equal-mass ensembles are supported")
            m = m[0]
        m = float(m)
        if not (m > 0 and math.isfinite(m)):
            raise InvalidInputError(f"mass must be positive, got {m!r}")
        x.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "momenta", p)
        object.__setattr__(self, "mass", m)

    @property
    def size(self):
        return self.positions.shape[0]

    def centroid(self):
        return CentroidState(float(self.positions.mean()), float(self.momenta.mean()), self.mass)

    def deviations(self):
        return self.positions - self.positions.mean(), self.momenta - self.momenta.mean()


def ensemble_moments(e, n):
    """All order-``n`` centroid moments of ``e`` as a :class:`MomentVector`."""
    if n < 1:
        raise InvalidInputError("order must be >= 1")
    X, P = e.deviations()
    return MomentVector(n, _accel.ensemble_moments(X, P, n), e.mass)


def ensemble_moment(e, k, n):
    if not 0 <= k <= n:
        raise InvalidInputError(f"need 0 <= k <= n, got k={k}, n={n}")
    return float(ensemble_moments(e, n).values[k])


def drift(e, t):
    t = float(t)
    if not math.isfinite(t):
        raise InvalidInputError("t must be finite")
    return ParticleEnsemble(e.positions + e.momenta * (t / e.mass), e.momenta, e.mass)


def classical_omega4(e):
    """``Y_2 Y_4 - Y_3^2`` of the fourth-order ensemble moments (never negative)."""
    y = ensemble_moments(e, 4).values
    return float(y[2] * y[4] - y[3] * y[3])


def omega4_scale(e):
    y = ensemble_moments(e, 4).values
    return float(abs(y[2] * y[4]) + y[3] * y[3])


def random_ensemble(rng, size=None, mass=1.0):
    """A seeded random ensemble drawn from one of several shapes.

    Shapes include correlated Gaussians, skewed exponentials, uniform boxes
    and heavy-tailed draws, so that property sweeps see varied moment patterns.
    """
    if size is None:
        size = int(rng.integers(2, 1001))
    kind = int(rng.integers(4))
    if kind == 0:
        x = rng.normal(size=size)
        p = rng.uniform(-2, 2) * x + rng.normal(scale=rng.uniform(0.01, 2), size=size)
    elif kind == 1:
        x = rng.exponential(size=size) * rng.choice([-1.0, 1.0])
        p = rng.normal(size=size) + rng.uniform(-1, 1) * x ** 2
    elif kind == 2:
        x = rng.uniform(-3, 3, size=size)
        p = rng.uniform(-3, 3, size=size)
    else:
        x = rng.standard_t(3, size=size)
        p = rng.standard_t(4, size=size) - rng.uniform(-1, 1) * x
    shift = rng.normal(scale=10.0, size=2)
    return ParticleEnsemble(x + shift[0], p + shift[1], mass)
