"""Pure-Python/numpy versions of the hot loops in ``_ckernels.pyx``.

Both modules expose the same functions with the same argument conventions;
``stlsq.kernels`` picks one at import time.
"""

import numpy as np


def _rk4(f, u0, h, nsteps, out):
    # blow-up is reported through the return value, not floating-point warnings
    with np.errstate(over="ignore", invalid="ignore"):
        return _rk4_loop(f, u0, h, nsteps, out)


def _rk4_loop(f, u0, h, nsteps, out):
    u = np.array(u0, dtype=float)
    out[0] = u
    for k in range(nsteps):
        k1 = f(u)
        k2 = f(u + (0.5 * h) * k1)
        k3 = f(u + (0.5 * h) * k2)
        k4 = f(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = u
        if not np.all(np.isfinite(u)):
            return k + 1
    return -1


def _lorenz(u):
    return np.array(
        [
            10.0 * (u[1] - u[0]),
            u[0] * (28.0 - u[2]) - u[1],
            u[0] * u[1] - (8.0 / 3.0) * u[2],
        ]
    )


def _thomas(u):
    return np.array(
        [
            -0.18 * u[0] + np.sin(u[1]),
            -0.18 * u[1] + np.sin(u[2]),
            -0.18 * u[2] + np.sin(u[0]),
        ]
    )


def rk4_generic(f, u0, h, nsteps, out):
    """Classic RK4 with a Python right-hand side; returns first non-finite row or -1."""
    return _rk4(f, u0, h, nsteps, out)


def rk4_lorenz(u0, h, nsteps, out):
    return _rk4(_lorenz, u0, h, nsteps, out)


def rk4_thomas(u0, h, nsteps, out):
    return _rk4(_thomas, u0, h, nsteps, out)


def best_subset(A, b, masks, inv_scale2, lam2, zero_tol, tie_rtol):
    """Scan candidate supports (bitmasks, in priority order) for the smallest
    ``||A x - b||^2 * inv_scale2 + lam2 * ||x||_0``.

    Each restricted problem is solved through the normal equations of the
    column subset; the residual is then formed directly from ``A``. A later
    candidate only replaces the incumbent if it is lower by more than
    ``tie_rtol * max(1, F_best)``, so earlier masks win ties.

    Returns ``(position, F, x)``.
    """
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    n = A.shape[1]
    G = A.T @ A
    c = A.T @ b
    best_pos, best_F, best_x = -1, np.inf, np.zeros(n)
    bits = 1 << np.arange(n, dtype=np.int64)
    for pos, mask in enumerate(masks):
        S = np.flatnonzero(int(mask) & bits)
        x = np.zeros(n)
        if S.size:
            L = np.linalg.cholesky(G[np.ix_(S, S)])
            y = np.linalg.solve(L, c[S])
            x[S] = np.linalg.solve(L.T, y)
        r = A @ x - b
        F = float(r @ r) * inv_scale2 + lam2 * int(np.count_nonzero(np.abs(x) > zero_tol))
        if best_pos < 0 or F < best_F - tie_rtol * max(1.0, best_F):
            best_pos, best_F, best_x = pos, F, x
    return best_pos, best_F, best_x
