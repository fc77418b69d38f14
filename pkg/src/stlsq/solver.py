"""Sequentially thresholded least squares and its diagnostics.

The scheme alternates a hard threshold on coefficient magnitudes with a least
squares refit restricted to the surviving columns::

    x0   = A^+ b
    S_k  = {j : |x_k[j]| >= lam}
    x_k+1 = argmin ||A x - b||  over supp(x) within S_k

and stops as soon as two consecutive supports coincide. Every iterate
decreases the l0-penalized objective ``||A x - b||^2 + lam^2 ||x||_0``
(evaluated on the system rescaled to unit spectral norm) until the iterates
become stationary, and the limit is a local minimizer of that objective.

Indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from stlsq import kernels
from stlsq.numkernel import (
    RANK_TOL,
    as_matrix,
    as_support,
    as_vector,
    pseudo_inverse_apply,
    require_full_rank,
    restricted_least_squares,
    spectral_norm,
)

ZERO_TOL = 1e-12
FIXED_POINT_TOL = 1e-8
BRUTE_FORCE_MAX_N = 20

CONVERGED = "converged"
ZERO_SOLUTION = "zero_solution"
EMPTY_INITIAL_SUPPORT = "empty_initial_support"


class SolverError(RuntimeError):
    """The iteration exceeded its safety limit, which the theory rules out."""


class EmptyInitialSupport(Warning):
    pass


@dataclass(frozen=True)
class SolverParams:
    """Threshold ``lam``, optional ridge weight ``gamma`` and iteration cap.

    ``max_iter=None`` means "number of columns". ``rank_tol`` is the relative
    singular-value cutoff for the full-column-rank check at entry.
    """

    lam: float
    gamma: float = 0.0
    max_iter: int | None = None
    rank_tol: float = RANK_TOL

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be a positive finite number, got {self.lam}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.rank_tol > 0:
            raise ValueError("rank_tol must be positive")


@dataclass
class IterationTrace:
    """Per-iterate record of one solve.

    ``iterates[k]`` is x_k (``iterates[0]`` is the unrestricted least-squares
    start) and ``supports[k]`` is the thresholded set S_k computed from it.
    The run stopped because ``supports[-1] == supports[-2]`` (or because the
    initial support was empty). ``objective_values`` use the unit-norm
    rescaling; ``residual_norms`` are on the raw system.

    ``refinements`` counts restricted refits after x0, which is how iteration
    counts are usually quoted ("converges in one step"). ``iterations_used``
    excludes the final refit when it is on an empty support, since that one
    costs nothing and is not an iteration in the termination bound.
    """

    iterates: list = field(default_factory=list)
    supports: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)
    objective_values: list = field(default_factory=list)
    converged: bool = False
    status: str = CONVERGED
    iterations_used: int = 0
    scale: float = 1.0

    @property
    def refinements(self):
        return len(self.iterates) - 1

    def to_dict(self):
        return {
            "status": self.status,
            "converged": self.converged,
            "refinements": self.refinements,
            "iterations_used": self.iterations_used,
            "spectral_norm": self.scale,
            "iterates": [x.tolist() for x in self.iterates],
            "supports": [S.tolist() for S in self.supports],
            "residual_norms": list(self.residual_norms),
            "objective_values": list(self.objective_values),
        }


@dataclass
class SparseSolution:
    x: np.ndarray
    support: np.ndarray
    residual_norm: float
    objective: float
    status: str = CONVERGED


def support_of(x, zero_tol=ZERO_TOL):
    return np.flatnonzero(np.abs(np.asarray(x, dtype=float)) > zero_tol)


def threshold_support(x, lam):
    """Indices with ``|x_j| >= lam``; entries exactly at the threshold are kept."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return np.flatnonzero(np.abs(np.asarray(x, dtype=float)) >= lam)


def _l0(x, zero_tol=ZERO_TOL):
    return int(np.count_nonzero(np.abs(x) > zero_tol))


def _objective_scaled(A, b, x, lam, scale):
    r = (A @ x - b) / scale
    return float(r @ r) + lam * lam * _l0(x)


def objective_value(A, b, x, lam):
    """``||Ax - b||^2 + lam^2 ||x||_0`` with A and b both divided by ``||A||_2``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    scale = spectral_norm(A)
    if scale == 0.0:
        scale = 1.0
    return _objective_scaled(A, b, x, lam, scale)


def surrogate_value(A, b, x, y, lam):
    """Majorizer ``||Ax-b||^2 - ||A(x-y)||^2 + ||x-y||^2 + lam^2 ||x||_0``.

    Only meaningful for ``||A||_2 <= 1``; larger norms are rejected.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if spectral_norm(A) > 1.0 + 1e-8:
        raise ValueError("surrogate requires a system normalized to ||A||_2 <= 1")
    r = A @ x - b
    d = x - y
    Ad = A @ d
    return float(r @ r - Ad @ Ad + d @ d) + lam * lam * _l0(x)


def _run(A, b, lam, max_iter, scale):
    """Core loop on a validated, full-rank system. Returns (solution, trace)."""
    n = A.shape[1]
    trace = IterationTrace(scale=scale)

    def record(x):
        trace.iterates.append(x)
        trace.residual_norms.append(float(np.linalg.norm(A @ x - b)))
        trace.objective_values.append(_objective_scaled(A, b, x, lam, scale))

    x = pseudo_inverse_apply(A, b, check_rank=False)
    record(x)
    S = threshold_support(x, lam)
    trace.supports.append(S)

    if S.size == 0:
        trace.status = EMPTY_INITIAL_SUPPORT
        trace.converged = False
        zero = np.zeros(n)
        return (
            SparseSolution(zero, S, float(np.linalg.norm(b)),
                           _objective_scaled(A, b, zero, lam, scale), EMPTY_INITIAL_SUPPORT),
            trace,
        )

    while True:
        if S.size:
            trace.iterations_used += 1
            if trace.iterations_used > max_iter:
                raise SolverError(
                    f"no stationary support after {max_iter} refinements (n={n}); "
                    "this contradicts the finite-termination bound"
                )
        x = restricted_least_squares(A, b, S)
        record(x)
        S_next = threshold_support(x, lam)
        trace.supports.append(S_next)
        if np.array_equal(S_next, S):
            break
        S = S_next

    trace.converged = True
    trace.status = ZERO_SOLUTION if S.size == 0 else CONVERGED
    sol = SparseSolution(
        x=x,
        support=support_of(x),
        residual_norm=trace.residual_norms[-1],
        objective=trace.objective_values[-1],
        status=trace.status,
    )
    return sol, trace


def _validate(A, b):
    A = as_matrix(A)
    b = as_vector(b)
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
    return A, b


def sindy_solve(A, b, params):
    """Run the thresholded least-squares scheme on ``Ax = b``.

    Returns ``(SparseSolution, IterationTrace)``. Requires ``m >= n`` and full
    column rank (``RankDeficientError`` otherwise). An empty initial support is
    reported through ``status == "empty_initial_support"`` with a zero
    solution rather than raised. ``params.gamma > 0`` dispatches to
    :func:`stridge_solve`.
    """
    if params.gamma > 0:
        return stridge_solve(A, b, params)
    A, b = _validate(A, b)
    require_full_rank(A, params.rank_tol)
    scale = spectral_norm(A)
    max_iter = params.max_iter if params.max_iter is not None else A.shape[1]
    return _run(A, b, params.lam, max_iter, scale)


def sindy_solve_many(A, B, params):
    """Solve one problem per column of ``B`` against a shared dictionary.

    The rank check and spectral norm are computed once.
    """
    A = as_matrix(A)
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if params.gamma > 0:
        return [stridge_solve(A, B[:, i], params) for i in range(B.shape[1])]
    require_full_rank(A, params.rank_tol)
    scale = spectral_norm(A)
    max_iter = params.max_iter if params.max_iter is not None else A.shape[1]
    return [_run(A, as_vector(B[:, i]), params.lam, max_iter, scale) for i in range(B.shape[1])]


def ridge_augment(A, b, gamma):
    """Stack ``[A; gamma I]`` and ``[b; 0]``.

    Note the ridge weight enters the least-squares term as ``gamma**2``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    return np.vstack([A, gamma * np.eye(n)]), np.concatenate([b, np.zeros(n)])


def stridge_solve(A, b, params):
    """Sequential threshold ridge regression: the scheme on ``[A; gamma I]``.

    ``A`` need not have full column rank (nor ``m >= n``); the augmented
    matrix always does. Trace objectives are those of the augmented system.
    """
    if not params.gamma > 0:
        raise ValueError("stridge_solve needs gamma > 0")
    A = as_matrix(A)
    b = as_vector(b)
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
    At, bt = ridge_augment(A, b, params.gamma)
    plain = SolverParams(params.lam, 0.0, params.max_iter, params.rank_tol)
    return sindy_solve(At, bt, plain)


def is_fixed_point(A, b, x, lam, tol=FIXED_POINT_TOL):
    """True iff one more sweep of the scheme leaves ``x`` where it is."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    mag = np.abs(x)
    nonzero = mag > ZERO_TOL
    if np.any(mag[nonzero] < lam - tol):
        return False
    if np.any(mag[~nonzero] >= lam):
        return False
    refit = restricted_least_squares(A, b, np.flatnonzero(nonzero))
    return bool(np.max(np.abs(refit - x), initial=0.0) <= tol)


def check_one_step_condition(A, b, S, lam):
    """Whether ``min_{S} |A^+ b| >= lam > max_{not S} |A^+ b|``.

    When ``b = A x*`` with ``supp(x*) = S`` and ``|x*_j| >= lam`` on ``S``,
    this is exactly the condition for the scheme to return x* after one
    refinement.
    """
    A = np.asarray(A, dtype=float)
    x0 = np.abs(pseudo_inverse_apply(A, b))
    S = as_support(S, A.shape[1])
    out = np.ones(A.shape[1], dtype=bool)
    out[S] = False
    lo = x0[S].min() if S.size else math.inf
    hi = x0[out].max() if out.any() else -math.inf
    return bool(lo >= lam > hi)


def check_global_min_conditions(A, b, x, lam, tol=FIXED_POINT_TOL):
    """Necessary conditions for ``x`` to globally minimize the objective.

    On the unit-norm system: every zero coordinate has correlation
    ``|a_j^T (Ax - b)| <= lam`` and every nonzero one has ``|x_j| >= lam``
    with vanishing correlation. Passing does not certify global optimality.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    corr = np.abs(A.T @ (A @ x - b))
    nonzero = np.abs(x) > ZERO_TOL
    if np.any(corr[~nonzero] > lam + tol):
        return False
    if np.any(np.abs(x[nonzero]) < lam - tol):
        return False
    return bool(np.all(corr[nonzero] <= tol))


def support_masks(n):
    """Bitmasks of every subset of ``range(n)``, by size then lexicographically."""
    out = np.empty(1 << n, dtype=np.int64)
    pos = 0
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            mask = 0
            for j in combo:
                mask |= 1 << j
            out[pos] = mask
            pos += 1
    return out


_MASK_CACHE: dict = {}


def brute_force_global_min(A, b, lam, tie_rtol=1e-12):
    """Exhaustive minimizer of the normalized l0 objective over all supports.

    Ties (within ``tie_rtol`` relative) go to the smaller support, then the
    lexicographically smallest one. Refuses ``n > 20``.

    The restricted fits here go through normal equations and a Cholesky
    factor, independent of the QR path the solver uses.
    """
    A, b = _validate(A, b)
    n = A.shape[1]
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N} columns, got {n}")
    require_full_rank(A)
    scale = spectral_norm(A)
    masks = _MASK_CACHE.get(n)
    if masks is None:
        masks = _MASK_CACHE[n] = support_masks(n)
    pos, F, x = kernels.best_subset(A, b, masks, 1.0 / (scale * scale), lam * lam, ZERO_TOL, tie_rtol)
    x = np.asarray(x)
    return SparseSolution(
        x=x,
        support=support_of(x),
        residual_norm=float(np.linalg.norm(A @ x - b)),
        objective=float(F),
    )
