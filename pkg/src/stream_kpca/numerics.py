"""Dense linear-algebra kernel: thin SVD, symmetric eigendecomposition,
Moore-Penrose pseudoinverse, and a power-iteration spectral norm.

Factorizations delegate to LAPACK (via numpy). The spectral norm is a
hand-rolled power iteration on the normal matrix so that the dense
eigensolver stays available as an independent cross-check.

All functions are pure: no shared mutable state, safe to call concurrently.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ContractViolationError, NumericalFailureError

MACHINE_EPS = float(np.finfo(np.float64).eps)

POWER_ITER_TOL = 1e-6
POWER_ITER_CAP = 10_000


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return `a` as a 2-D float64 array with finite entries."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ContractViolationError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolationError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    return arr


def as_vector(x, name: str = "vector") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if arr.size < 1:
        raise ContractViolationError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    return arr


class SvdResult(NamedTuple):
    """Thin SVD `a = u @ diag(s) @ v.T` with r = min(rows, cols).

    u: (n, r) orthonormal columns
    s: (r,) non-increasing, non-negative
    v: (d, r) orthonormal columns
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def thin_svd(a) -> SvdResult:
    """Thin singular value decomposition of a dense matrix.

    Raises NumericalFailureError if the LAPACK iteration does not converge
    (never returns silent garbage).
    """
    arr = as_matrix(a, "svd input")
    try:
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    return SvdResult(u=u, s=s, v=vt.T)


def sym_eig(g) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues non-increasing and
    eigenvectors as orthonormal columns. The input must be square and
    symmetric to within 1e-10 * ||g||_F; it is symmetrized as (g + g.T)/2
    before decomposing, since floating-point construction of gram matrices
    breaks exact symmetry.
    """
    arr = as_matrix(g, "sym_eig input")
    n, m = arr.shape
    if n != m:
        raise ContractViolationError(f"sym_eig needs a square matrix, got {arr.shape}")
    scale = float(np.linalg.norm(arr))
    asym = float(np.linalg.norm(arr - arr.T))
    if asym > 1e-10 * max(scale, 1e-300):
        raise ContractViolationError(
            f"matrix is not symmetric: ||g - g.T||_F = {asym:.3e} vs ||g||_F = {scale:.3e}"
        )
    sym = (arr + arr.T) / 2.0
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigendecomposition did not converge: {exc}") from exc
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def pinv(a, rtol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse with a relative singular-value cutoff.

    Singular values sigma_i <= rtol * sigma_1 are treated as zero. The
    default rtol = max(rows, cols) * machine epsilon is the standard
    rank-revealing choice.
    """
    arr = as_matrix(a, "pinv input")
    if rtol is None:
        rtol = max(arr.shape) * MACHINE_EPS
    if rtol < 0:
        raise ContractViolationError(f"pinv cutoff must be >= 0, got {rtol}")
    u, s, v = thin_svd(arr)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((arr.shape[1], arr.shape[0]))
    cutoff = rtol * s[0]
    inv_s = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return (v * inv_s) @ u.T


def spectral_norm(a) -> float:
    """Largest singular value via power iteration on the normal matrix.

    Iterates v <- A.T (A v) from the deterministic all-ones start vector so
    runs are reproducible. The Rayleigh quotient rho = ||A v||^2 increases
    geometrically toward sigma_1^2; the raw step-to-step change understates
    the remaining error when the spectral gap is small, so the stopping
    rule extrapolates the geometric tail (ratio of successive changes) and
    stops once the estimated remaining change is below 1e-6 relative.
    Symmetric inputs work unchanged: +/- lambda_1 both fold onto
    lambda_1^2.
    """
    arr = as_matrix(a, "spectral_norm input")
    v = np.ones(arr.shape[1]) / np.sqrt(arr.shape[1])
    rho_prev = None
    delta_prev = None
    stalled = 0
    for _ in range(POWER_ITER_CAP):
        av = arr @ v
        rho = float(av @ av)
        if rho == 0.0:
            return 0.0
        w = arr.T @ av
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if rho_prev is not None:
            delta = rho - rho_prev
            if delta <= 0.0:
                return float(np.sqrt(rho))  # monotone sequence hit fp resolution
            if delta <= MACHINE_EPS * rho:
                stalled += 1
                if stalled >= 2:
                    return float(np.sqrt(rho))
            else:
                stalled = 0
            if delta_prev is not None and delta_prev > 0.0:
                ratio = delta / delta_prev
                if ratio < 1.0 and delta * ratio / (1.0 - ratio) <= POWER_ITER_TOL * rho:
                    return float(np.sqrt(rho))
            delta_prev = delta
        rho_prev = rho
    raise NumericalFailureError(
        f"power iteration did not converge within {POWER_ITER_CAP} iterations"
    )
