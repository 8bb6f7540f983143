"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from ``FREEMOMENTS_NUMBA``: set it to
``0`` (or ``false``/``off``) to force the numpy implementations.  When numba
is not importable the numpy path is used regardless.  ``set_backend`` swaps
the backend at runtime for benchmarks and parity tests.

Both paths compute the same quantities; the parity tests in
``tests/test_accel.py`` hold them to rounding agreement.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "workqueue"
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_FLAG = os.environ.get("FREEMOMENTS_NUMBA", "1").strip().lower()
_backend = "numba" if HAVE_NUMBA and _FLAG not in ("0", "false", "off", "no") else "numpy"


def backend():
    return _backend


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    prev, _backend = _backend, name
    return prev


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _ensemble_moments_np(X, P, n):
    k = np.arange(n + 1)
    terms = P[:, None] ** k[None, :] * X[:, None] ** (n - k)[None, :]
    return terms.mean(axis=0)


def _wigner_correlation_np(psi):
    N = psi.shape[0]
    half = N // 2
    j = np.fft.ifftshift(np.arange(-half, N - half))
    i = np.arange(N)[:, None]
    plus = i + j[None, :]
    minus = i - j[None, :]
    ok = (plus >= 0) & (plus < N) & (minus >= 0) & (minus < N)
    out = np.zeros((N, N), dtype=np.complex128)
    out[ok] = np.conj(psi[plus[ok]]) * psi[minus[ok]]
    return out


def _phase_space_moments_np(W, X, P, n):
    # W[i, m] over x-grid X[i] and p-grid P[m]; returns sum W X^(n-k) P^k for k=0..n
    k = np.arange(n + 1)
    xp = X[:, None] ** (n - k)[None, :]
    pp = P[:, None] ** k[None, :]
    return np.einsum("ik,im,mk->k", xp, W, pp)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _ensemble_moments_nb(X, P, n):
        out = np.zeros(n + 1)
        N = X.shape[0]
        xpow = np.empty(n + 1)
        xpow[0] = 1.0
        for mu in range(N):
            x = X[mu]
            p = P[mu]
            for q in range(1, n + 1):
                xpow[q] = xpow[q - 1] * x
            pk = 1.0
            for k in range(n + 1):
                out[k] += pk * xpow[n - k]
                pk *= p
        return out / N

    @njit(cache=True, parallel=True)
    def _wigner_correlation_nb(psi):
        N = psi.shape[0]
        half = N // 2
        out = np.zeros((N, N), dtype=np.complex128)
        for i in prange(N):
            for jj in range(N):
                j = jj if jj < N - half else jj - N
                a = i + j
                b = i - j
                if a >= 0 and a < N and b >= 0 and b < N:
                    out[i, jj] = np.conj(psi[a]) * psi[b]
        return out

    @njit(cache=True, parallel=True)
    def _phase_space_moments_rows(W, X, P, n):
        Nx = W.shape[0]
        Np = W.shape[1]
        rows = np.zeros((Nx, n + 1))
        for i in prange(Nx):
            acc = np.zeros(n + 1)
            for m in range(Np):
                w = W[i, m]
                if w == 0.0:
                    continue
                pk = 1.0
                for k in range(n + 1):
                    acc[k] += w * pk
                    pk *= P[m]
            x = X[i]
            for k in range(n + 1):
                xp = 1.0
                for _ in range(n - k):
                    xp *= x
                rows[i, k] = acc[k] * xp
        return rows

    def _phase_space_moments_nb(W, X, P, n):
        return _phase_space_moments_rows(W, X, P, n).sum(axis=0)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def ensemble_moments(X, P, n):
    """Means of ``P**k * X**(n-k)`` for ``k = 0..n``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    P = np.ascontiguousarray(P, dtype=np.float64)
    if _backend == "numba":
        return _ensemble_moments_nb(X, P, int(n))
    return _ensemble_moments_np(X, P, int(n))


def wigner_correlation(psi):
    """Matrix ``C[i, j] = conj(psi[i+j]) * psi[i-j]`` with ``j`` in FFT order."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    if _backend == "numba":
        return _wigner_correlation_nb(psi)
    return _wigner_correlation_np(psi)


def phase_space_moments(W, X, P, n):
    """Unnormalized sums ``sum_{i,m} W[i,m] X[i]**(n-k) P[m]**k`` for ``k = 0..n``."""
    W = np.ascontiguousarray(W, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    P = np.ascontiguousarray(P, dtype=np.float64)
    if _backend == "numba":
        return _phase_space_moments_nb(W, X, P, int(n))
    return _phase_space_moments_np(W, X, P, int(n))
