"""Dense linear-algebra primitives used by the thresholded least-squares solver.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64 in numpy's
default row-major (C) layout. Vectors are 1-D float64 arrays. A support set is
a sorted 1-D integer array of column indices.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

RANK_TOL = 1e-10
POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000


class RankDeficientError(np.linalg.LinAlgError):
    """Raised when a matrix that must have full column rank does not."""

    def __init__(self, message, smallest=None, largest=None):
        super().__init__(message)
        self.smallest = smallest
        self.largest = largest


class PowerIterationError(RuntimeError):
    """Power iteration hit ``max_iter``; ``estimate`` holds the last value."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


def as_matrix(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf")
    return A


def as_vector(b, name="b"):
    b = np.asarray(b, dtype=float)
    if b.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError(f"{name} contains NaN or Inf")
    return b


def as_support(S, n):
    """Normalize ``S`` to a sorted, duplicate-free int array inside ``[0, n)``."""
    S = np.asarray(S, dtype=np.intp).ravel()
    if S.size and (S.min() < 0 or S.max() >= n):
        raise IndexError(f"support indices must lie in [0, {n})")
    S = np.unique(S)
    return S


def spectral_norm(A, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Largest singular value of ``A`` by power iteration on ``M = A^T A``.

    The start vector is the normalized all-ones vector. Each sweep applies
    ``P = M^(2^k)`` (kept rescaled) and then squares ``P``, so after ``k``
    sweeps the iterate is ``M^(2^k - 1) v0``: plain power iteration with the
    step count doubled per sweep, which matters when the top two singular
    values are close. Iteration stops once the eigen-residual
    ``||M v - mu v||`` drops below ``tol * mu``; by Weyl's bound some
    eigenvalue of ``M`` then lies within ``tol * mu`` of ``mu``, so the
    returned ``sqrt(mu)`` has relative error at most ``tol / 2``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_matrix(A)
    n = A.shape[1]
    # work on A / max|a_ij| so the Gram matrix neither underflows nor overflows
    amax = float(np.max(np.abs(A)))
    if amax == 0.0:
        return 0.0
    A = A / amax
    M = A.T @ A
    v = np.full(n, 1.0 / np.sqrt(n))
    w = M @ v
    if not np.any(w):
        # all-ones start lies in the null space; try the heaviest column
        v = np.zeros(n)
        v[np.argmax(np.diag(M))] = 1.0
        w = M @ v
        if not np.any(w):
            return 0.0
    P = M / np.max(np.abs(M))
    mu = float(v @ w)
    for _ in range(max_iter):
        if np.linalg.norm(w - mu * v) <= tol * mu:
            return amax * float(np.sqrt(mu))
        u = P @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            # start vector has no component left in the leading eigenspace
            u = w
            nu = np.linalg.norm(w)
        v = u / nu
        w = M @ v
        mu = float(v @ w)
        P = P @ P
        P /= np.max(np.abs(P))
    raise PowerIterationError(
        f"power iteration did not converge in {max_iter} steps", amax * float(np.sqrt(mu))
    )


def column_rank_full(A, tol=RANK_TOL):
    """True iff ``sigma_min(A) > tol * sigma_max(A)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = np.asarray(A, dtype=float)
    if A.shape[0] < A.shape[1]:
        return False
    s = np.linalg.svd(A, compute_uv=False)
    return bool(s[-1] > tol * s[0])


def require_full_rank(A, tol=RANK_TOL):
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    if m < n:
        raise RankDeficientError(f"A has {m} rows but {n} columns; need m >= n")
    s = np.linalg.svd(A, compute_uv=False)
    if not s[-1] > tol * s[0]:
        raise RankDeficientError(
            f"A is numerically rank deficient: sigma_min={s[-1]:.3e}, "
            f"sigma_max={s[0]:.3e}, relative tolerance {tol:g}",
            smallest=float(s[-1]),
            largest=float(s[0]),
        )


def _qr_solve(A, b):
    # Householder QR (LAPACK geqrf) then back substitution; b may be 1-D or 2-D.
    Q, R = np.linalg.qr(A, mode="reduced")
    return solve_triangular(R, Q.T @ b, lower=False, check_finite=False)


def pseudo_inverse_apply(A, b, rank_tol=RANK_TOL, check_rank=True):
    """Return ``A^+ b``, the unique least-squares solution of ``Ax = b``.

    ``b`` may also be a 2-D array of right-hand sides sharing one QR
    factorization.
    """
    A = as_matrix(A)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]}")
    if check_rank:
        require_full_rank(A, rank_tol)
    return _qr_solve(A, b)


def restricted_least_squares(A, b, S):
    """Least squares over vectors supported in ``S``; zero off the support.

    The caller guarantees ``A`` has full column rank (every column subset then
    does too); the solver checks this once at entry.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    S = as_support(S, n)
    x = np.zeros(n)
    if S.size:
        x[S] = _qr_solve(A[:, S], b)
    return x
