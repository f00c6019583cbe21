"""Dense complex linear algebra, special functions and quadrature primitives.

Everything here is a pure function of its inputs; there is no shared mutable
state, so all routines are safe to call concurrently.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "NonHermitianError",
    "EigensolverError",
    "QuadratureError",
    "HermitianEigen",
    "hermitian_asymmetry",
    "hermitian_eigen",
    "unitary_evolution",
    "laguerre",
    "oscillator_eigenfunction",
    "oscillator_eigenfunctions",
    "integrate_real",
    "integrate_oscillatory",
]

MAX_EIGEN_DIM = 512
MAX_POLY_DEGREE = 200

HERMITIAN_TOL = 1e-12

_GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)
_MAX_DOUBLINGS = 14


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""

    def __init__(self, asymmetry: float, tol: float):
        self.asymmetry = asymmetry
        super().__init__(
            f"matrix is not Hermitian: max |M - M^H| = {asymmetry:.3e} exceeds {tol:.1e}"
        )


class EigensolverError(RuntimeError):
    """Eigendecomposition did not converge."""


class QuadratureError(RuntimeError):
    """Panel refinement hit its cap before two levels agreed.

    Carries the last two composite estimates for diagnosis.
    """

    def __init__(self, estimates, tol: float):
        self.estimates = estimates
        super().__init__(
            f"quadrature did not converge to {tol:.1e}: last estimates {estimates}"
        )


class HermitianEigen(NamedTuple):
    """Spectral decomposition M = V diag(values) V^H, eigenvalues ascending."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_asymmetry(m: np.ndarray) -> float:
    """Max-norm of M - M^H, the distance from being Hermitian."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eigen(m: np.ndarray, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues.

    Rejects matrices whose asymmetry exceeds ``tol`` and symmetrizes the rest
    before factorizing, so the result is exactly the decomposition of
    (M + M^H)/2.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_EIGEN_DIM:
        raise ValueError(f"dimension {m.shape[0]} exceeds supported {MAX_EIGEN_DIM}")
    asym = hermitian_asymmetry(m)
    if asym > tol:
        raise NonHermitianError(asym, tol)
    try:
        values, vectors = np.linalg.eigh((m + m.conj().T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigh failed to converge: {exc}") from exc
    return HermitianEigen(values, vectors)


def unitary_evolution(h: np.ndarray, t: float) -> np.ndarray:
    """exp(i t H) for Hermitian H, via the spectral decomposition."""
    values, vectors = hermitian_eigen(h)
    phases = np.exp(1j * t * values)
    return (vectors * phases) @ vectors.conj().T


def laguerre(n: int, l: int, x):
    """Associated Laguerre polynomial L^l_n(x).

    Uses the three-term recurrence in the degree at fixed superscript, which
    is stable for the argument ranges that arise here.  Accepts scalars or
    arrays in ``x``.
    """
    if n < 0 or l < 0:
        raise ValueError("degree and superscript must be nonnegative")
    if n > MAX_POLY_DEGREE or l > MAX_POLY_DEGREE:
        raise ValueError(f"degree/superscript limited to {MAX_POLY_DEGREE}")
    xa = np.asarray(x, dtype=float)
    p_prev = np.ones_like(xa)
    if n == 0:
        return p_prev if xa.ndim else float(p_prev)
    p = 1.0 + l - xa
    for k in range(1, n):
        p_prev, p = p, ((2 * k + l + 1 - xa) * p - (k + l) * p_prev) / (k + 1)
    return p if xa.ndim else float(p)


def oscillator_eigenfunctions(n_max: int, x) -> np.ndarray:
    """Hermite functions psi_0..psi_n_max evaluated at ``x``, shape (n_max+1, len(x)).

    These are the L^2-normalized harmonic-oscillator position eigenfunctions;
    the recurrence runs directly on psi (not on raw Hermite polynomials), so
    no overflow occurs up to n = 200.
    """
    if n_max < 0 or n_max > MAX_POLY_DEGREE:
        raise ValueError(f"level must be in 0..{MAX_POLY_DEGREE}")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1, xa.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xa * xa)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * xa * out[0]
    for n in range(2, n_max + 1):
        out[n] = np.sqrt(2.0 / n) * xa * out[n - 1] - np.sqrt((n - 1.0) / n) * out[n - 2]
    return out


def oscillator_eigenfunction(n: int, x):
    """Single Hermite function psi_n(x); scalar in, scalar out."""
    vals = oscillator_eigenfunctions(n, x)[n]
    return vals if np.ndim(x) else float(vals[0])


def _panel_sum(f: Callable, a: float, b: float, n_panels: int):
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return np.sum(weights * np.asarray(f(nodes)))


def integrate_real(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    min_panels: int = 1,
) -> float:
    """Composite Gauss-Legendre integral of a vectorized real integrand.

    Panel count doubles until two successive refinement levels agree within
    ``tol`` (absolute); ``f`` must accept an ndarray of nodes.
    """
    n_panels = max(1, min_panels)
    prev = _panel_sum(f, a, b, n_panels)
    for _ in range(_MAX_DOUBLINGS):
        n_panels *= 2
        cur = _panel_sum(f, a, b, n_panels)
        if abs(cur - prev) <= tol:
            return float(np.real(cur))
        prev = cur
    raise QuadratureError((complex(prev), complex(cur)), tol)


def oscillatory_panel_count(frequency: float, cutoff: float) -> int:
    """Smallest panel count keeping panel width <= pi / (2 (|frequency| + 1))."""
    width_cap = np.pi / (2.0 * (abs(frequency) + 1.0))
    return max(1, int(np.ceil(cutoff / width_cap)))


def integrate_oscillatory(
    g: Callable[[np.ndarray], np.ndarray],
    frequency: float,
    cutoff: float,
    tol: float = 1e-10,
) -> complex:
    """Integral of e^{i frequency t} g(t) over [0, cutoff].

    The initial panel width resolves the oscillation of the phase factor;
    refinement then proceeds exactly as in :func:`integrate_real`, with the
    real and imaginary parts each required to settle within ``tol``.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")

    def integrand(t):
        return np.asarray(g(t)) * np.exp(1j * frequency * t)

    n_panels = oscillatory_panel_count(frequency, cutoff)
    prev = _panel_sum(integrand, 0.0, cutoff, n_panels)
    for _ in range(_MAX_DOUBLINGS):
        n_panels *= 2
        cur = _panel_sum(integrand, 0.0, cutoff, n_panels)
        if abs(cur.real - prev.real) <= tol and abs(cur.imag - prev.imag) <= tol:
            return complex(cur)
        prev = cur
    raise QuadratureError((complex(prev), complex(cur)), tol)
