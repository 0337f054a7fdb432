# cython: boundscheck=False, wraparound=False, cdivision=True
"""Typed-loop implementation of the cocycle kernels.

Same contract as the numpy module: positional encoding (pops, rows, cols) of
the cocycle matrix, per-step max-abs renormalization, log-scale accumulator.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, cos, fabs, floor, log, sin, sqrt

cnp.import_array()

ctypedef double complex dcomplex

DEF TWO_PI = 6.283185307179586476925287


cdef inline double _mod1(double x) noexcept:
    return x - floor(x)


cdef inline double _cabs2(dcomplex z) noexcept:
    return z.real * z.real + z.imag * z.imag


def cocycle_matrices(pops, rows, cols, int d, xi):
    xi = np.atleast_2d(np.asarray(xi, dtype=np.float64))
    cdef double[:, ::1] P = np.ascontiguousarray(pops, dtype=np.float64)
    cdef long[::1] R = np.ascontiguousarray(rows, dtype=np.int64)
    cdef long[::1] C = np.ascontiguousarray(cols, dtype=np.int64)
    cdef double[:, ::1] X = np.ascontiguousarray(xi)
    cdef Py_ssize_t m = X.shape[0], L = P.shape[0], dd = P.shape[1]
    out_arr = np.zeros((m, d, d), dtype=np.complex128)
    cdef dcomplex[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, k, j
    cdef double ph
    for i in range(m):
        for k in range(L):
            ph = 0.0
            for j in range(dd):
                ph += P[k, j] * X[i, j]
            ph *= -TWO_PI
            out[i, R[k], C[k]] += cos(ph) + 1j * sin(ph)
    return out_arr


def cocycle_products(pops, rows, cols, int d, st, xi, int n, bint want_traj=False):
    xi = np.atleast_2d(np.asarray(xi, dtype=np.float64))
    cdef double[:, ::1] P = np.ascontiguousarray(pops, dtype=np.float64)
    cdef long[::1] R = np.ascontiguousarray(rows, dtype=np.int64)
    cdef long[::1] C = np.ascontiguousarray(cols, dtype=np.int64)
    cdef double[:, ::1] ST = np.ascontiguousarray(st, dtype=np.float64)
    cdef double[:, ::1] X = np.ascontiguousarray(xi)
    cdef Py_ssize_t m = X.shape[0], L = P.shape[0]
    prod_arr = np.zeros((m, d, d), dtype=np.complex128)
    logscale_arr = np.zeros(m, dtype=np.float64)
    traj_arr = np.full((m, n), -np.inf) if want_traj else None
    cdef dcomplex[:, :, ::1] prod = prod_arr
    cdef double[::1] logscale = logscale_arr
    cdef double[:, ::1] traj = traj_arr if want_traj else np.empty((0, 0))
    M_arr = np.zeros((d, d), dtype=np.complex128)
    T_arr = np.zeros((d, d), dtype=np.complex128)
    cdef dcomplex[:, ::1] M = M_arr
    cdef dcomplex[:, ::1] T = T_arr
    cur_arr = np.zeros(d, dtype=np.float64)
    nxt_arr = np.zeros(d, dtype=np.float64)
    cdef double[::1] cur = cur_arr
    cdef double[::1] nxt = nxt_arr
    cdef Py_ssize_t i, t, k, j, a, b, c
    cdef double ph, scale, mag, fro2, mmax
    cdef dcomplex acc
    cdef bint dead
    for i in range(m):
        for j in range(d):
            cur[j] = _mod1(X[i, j])
            for a in range(d):
                prod[i, j, a] = 1.0 + 0.0j if j == a else 0.0
        dead = False
        for t in range(n):
            if dead:
                break
            for a in range(d):
                for b in range(d):
                    M[a, b] = 0.0
            for k in range(L):
                ph = 0.0
                for j in range(d):
                    ph += P[k, j] * cur[j]
                ph *= -TWO_PI
                M[R[k], C[k]] += cos(ph) + 1j * sin(ph)
            mmax = 0.0
            for a in range(d):
                for b in range(d):
                    mag = _cabs2(M[a, b])
                    if mag > mmax:
                        mmax = mag
            mmax = sqrt(mmax)
            if mmax < 1.0:
                mmax = 1.0
            scale = 0.0
            for a in range(d):
                for b in range(d):
                    acc = 0.0
                    for c in range(d):
                        acc += M[a, c] * prod[i, c, b]
                    T[a, b] = acc
                    mag = _cabs2(acc)
                    if mag > scale:
                        scale = mag
            scale = sqrt(scale)
            # exact-cancellation products leave only rounding noise
            if scale <= 1e-12 * mmax:
                logscale[i] = -INFINITY
                for a in range(d):
                    for b in range(d):
                        prod[i, a, b] = 0.0
                dead = True
                # remaining trajectory entries stay at -inf
                continue
            fro2 = 0.0
            for a in range(d):
                for b in range(d):
                    prod[i, a, b] = T[a, b] / scale
                    fro2 += _cabs2(prod[i, a, b])
            logscale[i] += log(scale)
            if want_traj:
                traj[i, t] = logscale[i] + 0.5 * log(fro2)
            for a in range(d):
                ph = 0.0
                for j in range(d):
                    ph += ST[a, j] * cur[j]
                nxt[a] = _mod1(ph)
            for a in range(d):
                cur[a] = nxt[a]
    return prod_arr, logscale_arr, traj_arr
