# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: fixed-step RK4 for the built-in systems and the
exhaustive support scan behind the brute-force oracle.

Signatures mirror ``stlsq._pykernels``.
"""

from libc.math cimport sin, sqrt, fabs, isfinite
from libc.stdlib cimport malloc, free

import numpy as np


cdef inline void _lorenz(const double* u, double* du) noexcept nogil:
    du[0] = 10.0 * (u[1] - u[0])
    du[1] = u[0] * (28.0 - u[2]) - u[1]
    du[2] = u[0] * u[1] - (8.0 / 3.0) * u[2]


cdef inline void _thomas(const double* u, double* du) noexcept nogil:
    du[0] = -0.18 * u[0] + sin(u[1])
    du[1] = -0.18 * u[1] + sin(u[2])
    du[2] = -0.18 * u[2] + sin(u[0])


ctypedef void (*rhs3_t)(const double*, double*) noexcept nogil


cdef Py_ssize_t _rk4_3(rhs3_t f, double[::1] u0, double h, Py_ssize_t nsteps,
                       double[:, ::1] out) noexcept nogil:
    cdef double u[3]
    cdef double t[3]
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef Py_ssize_t k, i
    cdef double hh = 0.5 * h, h6 = h / 6.0
    for i in range(3):
        u[i] = u0[i]
        out[0, i] = u[i]
    for k in range(nsteps):
        f(u, k1)
        for i in range(3):
            t[i] = u[i] + hh * k1[i]
        f(t, k2)
        for i in range(3):
            t[i] = u[i] + hh * k2[i]
        f(t, k3)
        for i in range(3):
            t[i] = u[i] + h * k3[i]
        f(t, k4)
        for i in range(3):
            u[i] = u[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            out[k + 1, i] = u[i]
        if not (isfinite(u[0]) and isfinite(u[1]) and isfinite(u[2])):
            return k + 1
    return -1


def rk4_lorenz(u0, double h, Py_ssize_t nsteps, double[:, ::1] out):
    cdef double[::1] u = np.ascontiguousarray(u0, dtype=float)
    with nogil:
        r = _rk4_3(_lorenz, u, h, nsteps, out)
    return r


def rk4_thomas(u0, double h, Py_ssize_t nsteps, double[:, ::1] out):
    cdef double[::1] u = np.ascontiguousarray(u0, dtype=float)
    with nogil:
        r = _rk4_3(_thomas, u, h, nsteps, out)
    return r


def best_subset(A_in, b_in, masks_in, double inv_scale2, double lam2,
                double zero_tol, double tie_rtol):
    cdef double[:, ::1] A = np.ascontiguousarray(A_in, dtype=float)
    cdef double[::1] b = np.ascontiguousarray(b_in, dtype=float)
    cdef long long[::1] masks = np.ascontiguousarray(masks_in, dtype=np.int64)
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1], nmask = masks.shape[0]
    cdef double[:, ::1] G = np.ascontiguousarray(np.asarray(A).T @ np.asarray(A))
    cdef double[::1] c = np.asarray(A).T @ np.asarray(b)
    best_x_arr = np.zeros(n)
    cdef double[::1] best_x = best_x_arr
    cdef Py_ssize_t best_pos = -1
    cdef double best_F = 0.0

    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef double* L = <double*> malloc(n * n * sizeof(double))
    cdef double* y = <double*> malloc(n * sizeof(double))
    cdef double* x = <double*> malloc(n * sizeof(double))
    if idx == NULL or L == NULL or y == NULL or x == NULL:
        free(idx); free(L); free(y); free(x)
        raise MemoryError()

    cdef Py_ssize_t p, s, i, j, k, row
    cdef long long mask
    cdef double acc, r, rss, F, nnz
    cdef bint ok
    try:
        with nogil:
            for p in range(nmask):
                mask = masks[p]
                s = 0
                for j in range(n):
                    if (mask >> j) & 1:
                        idx[s] = j
                        s += 1
                # Cholesky of the s x s Gram block, row-major lower factor
                ok = True
                for i in range(s):
                    for j in range(i + 1):
                        acc = G[idx[i], idx[j]]
                        for k in range(j):
                            acc -= L[i * n + k] * L[j * n + k]
                        if i == j:
                            if acc <= 0.0:
                                ok = False
                                break
                            L[i * n + i] = sqrt(acc)
                        else:
                            L[i * n + j] = acc / L[j * n + j]
                    if not ok:
                        break
                if not ok:
                    continue
                for i in range(s):
                    acc = c[idx[i]]
                    for k in range(i):
                        acc -= L[i * n + k] * y[k]
                    y[i] = acc / L[i * n + i]
                for i in range(s - 1, -1, -1):
                    acc = y[i]
                    for k in range(i + 1, s):
                        acc -= L[k * n + i] * x[k]
                    x[i] = acc / L[i * n + i]
                rss = 0.0
                for row in range(m):
                    r = -b[row]
                    for i in range(s):
                        r += A[row, idx[i]] * x[i]
                    rss += r * r
                nnz = 0.0
                for i in range(s):
                    if fabs(x[i]) > zero_tol:
                        nnz += 1.0
                F = rss * inv_scale2 + lam2 * nnz
                if best_pos < 0 or F < best_F - tie_rtol * (best_F if best_F > 1.0 else 1.0):
                    best_pos = p
                    best_F = F
                    for j in range(n):
                        best_x[j] = 0.0
                    for i in range(s):
                        best_x[idx[i]] = x[i]
    finally:
        free(idx); free(L); free(y); free(x)
    return best_pos, best_F, best_x_arr
