"""Dense complex linear algebra: square solves, SVD nullspaces, tolerant RREF.

Matrices are plain complex128 numpy arrays.  The nullspace is computed from
the singular value decomposition because the matrices built downstream are
Vandermonde-like and badly conditioned; rank decisions are made relative to
the largest singular value.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

DEFAULT_RANK_TOL = 1e-8
DEFAULT_PIVOT_TOL = 1e-8


class SingularMatrixError(np.linalg.LinAlgError):
    """Square solve rejected; carries the estimated condition number."""

    def __init__(self, condition: float):
        super().__init__(f"matrix numerically singular (condition ~ {condition:.3e})")
        self.condition = condition


def solve_square(a: np.ndarray, b: np.ndarray, cond_limit: float = 1e14) -> np.ndarray:
    """Solve A x = b by LU with one step of iterative refinement.

    Raises SingularMatrixError when the pivot-ratio condition estimate
    exceeds ``cond_limit``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError("dimension mismatch between matrix and right-hand side")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    dmax = diag.max() if diag.size else 0.0
    dmin = diag.min() if diag.size else 0.0
    if dmax == 0.0 or dmin == 0.0 or dmax / dmin > cond_limit:
        raise SingularMatrixError(np.inf if dmin == 0.0 else dmax / dmin)
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    # One refinement pass keeps the residual near roundoff for mildly
    # ill-conditioned systems (Vandermonde-type matrices show up here).
    r = b - a @ x
    x = x + scipy.linalg.lu_solve((lu, piv), r, check_finite=False)
    return x


def _svd_vals_vh(a: np.ndarray):
    # gesdd (numpy's default) occasionally fails to converge on
    # ill-conditioned Vandermonde blocks; gesvd is slower but dependable.
    try:
        _, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError:
        _, s, vh = scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesvd")
    return s, vh


def nullspace(a: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical nullspace of A.

    A direction counts as null when its singular value is <= rank_tol times
    the largest one.  Returns a (cols, 0) matrix for a trivial nullspace.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    if a.size == 0 or not np.any(a):
        return np.eye(a.shape[1], dtype=complex)
    s, vh = _svd_vals_vh(a)
    smax = s[0]
    rank = int(np.sum(s > rank_tol * smax))
    return vh[rank:].conj().T


def rank(a: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    a = np.asarray(a, dtype=complex)
    if a.size == 0 or not np.any(a):
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rank_tol * s[0]))


def rref(m: np.ndarray, pivot_tol: float = DEFAULT_PIVOT_TOL) -> np.ndarray:
    """Reduced row echelon form with partial pivoting.

    Entries below pivot_tol (relative to the largest entry of the input) are
    treated as zero during pivot selection; pivots are normalized to 1 and
    their columns cleared.
    """
    if pivot_tol <= 0:
        raise ValueError("pivot_tol must be positive")
    m = np.array(m, dtype=complex, copy=True)
    if m.size == 0:
        return m
    threshold = pivot_tol * max(1.0, float(np.abs(m).max()))
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pivot_row = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[pivot_row, c]) < threshold:
            m[np.abs(m[:, c]) < threshold, c] = 0.0
            continue
        if pivot_row != r:
            m[[r, pivot_row]] = m[[pivot_row, r]]
        m[r] = m[r] / m[r, c]
        for k in range(rows):
            if k != r and m[k, c] != 0:
                m[k] = m[k] - m[k, c] * m[r]
        m[:, c] = 0.0
        m[r, c] = 1.0
        r += 1
    return m
