"""Discrete Wigner function and phase-space moment quadrature.

``W(x, p) = (1/(pi hbar)) \\int psi*(x+y) psi(x-y) exp(2ipy/hbar) dy`` is sampled
with ``y`` on the wavefunction grid, which puts ``p`` on a grid of spacing
``pi hbar / (N dx)`` covering half the Nyquist band of ``psi``.  States whose
momentum content reaches beyond that band are rejected.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import InvalidInputError, ResolutionError
from .grid import TAIL_TOL, _is_pow2, check_resolved, spectral_tail


@dataclass(frozen=True)
class WignerGrid:
    """``values[i, m]`` at ``x[i]``, ``p[m]`` (both ascending), normalized to unit mass."""

    values: np.ndarray
    x: np.ndarray
    p: np.ndarray

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def dp(self):
        return float(self.p[1] - self.p[0])

    def total(self):
        return float(self.values.sum() * self.dx * self.dp)

    def x_marginal(self):
        return self.values.sum(axis=1) * self.dp

    def p_marginal(self):
        return self.values.sum(axis=0) * self.dx


def wigner_transform(psi, check=True):
    """Wigner function of ``psi`` on its own x grid."""
    N = psi.size
    if not _is_pow2(N):
        raise InvalidInputError("Wigner transform needs a power-of-two grid")
    if check:
        # p grid spans only half the Nyquist band; require the state to fit inside
        kt = spectral_tail(psi, 0, cutoff=0.5)
        if kt > TAIL_TOL:
            raise ResolutionError(
                f"momentum content beyond half-Nyquist ({kt:.2e}); refine the grid")
    corr = _accel.wigner_correlation(psi.amplitudes)
    # sum_j C[i,j] exp(+2 pi i j m / N) == N * ifft along j
    spec = np.fft.ifft(corr, axis=1) * N
    W = np.fft.fftshift(spec.real, axes=1) * psi.dx / (math.pi * psi.hbar)
    W /= psi.norm()
    m = np.arange(-(N // 2), N - N // 2)
    p = m * math.pi * psi.hbar / (N * psi.dx)
    return WignerGrid(W, psi.x.copy(), p)


def wigner_centroid(w):
    tot = w.values.sum()
    xbar = float(w.x @ w.values.sum(axis=1) / tot)
    pbar = float(w.values.sum(axis=0) @ w.p / tot)
    return xbar, pbar


def wigner_moments(w, n):
    """All order-``n`` phase-space moments ``\\int\\int W P^k X^(n-k)`` about the centroid."""
    xbar, pbar = wigner_centroid(w)
    sums = _accel.phase_space_moments(w.values, w.x - xbar, w.p - pbar, n)
    return sums * w.dx * w.dp / w.total()


def wigner_moment(w, k, n):
    if not 0 <= k <= n:
        raise InvalidInputError(f"need 0 <= k <= n, got k={k}, n={n}")
    return float(wigner_moments(w, n)[k])


def wigner_moment_vector(psi, n, check=True):
    """Convenience: transform ``psi`` and return its order-``n`` moments."""
    from .moments import MomentVector

    if check:
        check_resolved(psi, n)
    w = wigner_transform(psi, check=check)
    return MomentVector(n, wigner_moments(w, n), psi.mass, psi.hbar)


def momentum_density(psi, p):
    """``|psi~(p)|^2`` at arbitrary momenta by direct summation (marginal checks)."""
    x = psi.x
    phase = np.exp(-1j * np.outer(p, x) / psi.hbar)
    amp = phase @ psi.amplitudes * psi.dx / math.sqrt(2.0 * math.pi * psi.hbar)
    return np.abs(amp) ** 2 / psi.norm()
