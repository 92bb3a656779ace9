"""Dense small-matrix primitives: eigenvalues, norms, definiteness tests.

All routines target matrices of dimension <= 16, which is why the symmetric
eigensolver is a plain cyclic Jacobi iteration rather than a LAPACK call:
at these sizes it is fast, dependency-free, and accurate to machine
precision.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteError, NonSymmetricError

SYMMETRY_TOL = 1e-12
_JACOBI_OFF_TOL = 1e-14
_MAX_SWEEPS = 60


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix has non-finite entries")
    return a


def _require_symmetric(a: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    skew = np.max(np.abs(a - a.T)) if a.size else 0.0
    if skew > tol:
        raise NonSymmetricError(f"asymmetry {skew:.3e} exceeds tolerance {tol:.3e}")


def symmetric_part(a) -> np.ndarray:
    """(A + A^T)/2.  Callers symmetrize explicitly; nothing here is silent."""
    a = _as_square(a)
    return (a + a.T) / 2.0


def symmetric_eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi.

    Sweeps rotate every off-diagonal pair per pass; iteration stops when the
    off-diagonal Frobenius mass drops below 1e-14 (scaled by the matrix norm
    so large-entry matrices terminate at their relative precision floor).
    """
    a = _as_square(a)
    _require_symmetric(a)
    n = a.shape[0]
    if n == 1:
        return a[0, :1].copy()
    m = symmetric_part(a)  # scrub roundoff-level asymmetry
    threshold = _JACOBI_OFF_TOL * max(1.0, float(np.linalg.norm(m)))
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.square(m - np.diag(np.diag(m)))))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = np.sign(theta) if theta != 0.0 else 1.0
                t = t / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = m[p, :].copy(), m[q, :].copy()
                m[p, :] = c * rp - s * rq
                m[q, :] = s * rp + c * rq
                cp, cq = m[:, p].copy(), m[:, q].copy()
                m[:, p] = c * cp - s * cq
                m[:, q] = s * cp + c * cq
                m[p, q] = 0.0
                m[q, p] = 0.0
    return np.sort(np.diag(m))


def max_eigenvalue(a) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    return float(symmetric_eigenvalues(a)[-1])


def spectral_norm(a) -> float:
    """Euclidean-induced matrix norm, computed as sqrt(lambda_max(A^T A))."""
    a = _as_square(a)
    gram = symmetric_part(a.T @ a)
    return float(np.sqrt(max(max_eigenvalue(gram), 0.0)))


def log_norm_2(a) -> float:
    """Logarithmic norm: largest eigenvalue of the symmetric part of A."""
    a = _as_square(a)
    return max_eigenvalue(symmetric_part(a))


def is_negative_definite(a, margin: float = 0.0) -> bool:
    """True iff lambda_max(A) <= -margin (strict < 0 when margin == 0)."""
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    lam = max_eigenvalue(a)
    if margin == 0.0:
        return lam < 0.0
    return lam <= -margin
