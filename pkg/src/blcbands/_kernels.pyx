# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: least-concave-majorant knots and interior upper envelope.

Semantics must match the pure-numpy twin in ``blcbands._kernels_py`` exactly;
see that module for the contract.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY


def concave_majorant_knots(x, y):
    """Knot indices of the least concave majorant of the points (x[i], y[i])."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t top = 0, k
    cdef cnp.int64_t i, j
    stack[0] = 0
    for k in range(1, n):
        while top >= 1:
            i = stack[top - 1]
            j = stack[top]
            # pop j when slope(i->j) <= slope(j->k); equality drops collinear
            if (yv[j] - yv[i]) * (xv[k] - xv[j]) <= (yv[k] - yv[j]) * (xv[j] - xv[i]):
                top -= 1
            else:
                break
        top += 1
        stack[top] = k
    return stack[:top + 1].copy()


def interior_upper_eval(grid, u, kx, ky, probes):
    """Tightest concave upper envelope between a majorant and a ceiling."""
    cdef double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[::1] kxv = np.ascontiguousarray(kx, dtype=np.float64)
    cdef double[::1] kyv = np.ascontiguousarray(ky, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(probes, dtype=np.float64)
    cdef Py_ssize_t m = g.shape[0], b = kxv.shape[0], p = pv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] beta_lo = np.full(m, INFINITY)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] beta_hi = np.full(m, -INFINITY)
    cdef double[::1] blo = beta_lo
    cdef double[::1] bhi = beta_hi
    cdef Py_ssize_t s, r, q
    cdef double dx, sl, z, best, cand

    # Best chord slope per ceiling point: smallest over knots to the left
    # (extension goes right), largest over knots to the right.
    for s in range(m):
        for r in range(b):
            dx = g[s] - kxv[r]
            if dx > 0:
                sl = (uv[s] - kyv[r]) / dx
                if sl < blo[s]:
                    blo[s] = sl
            elif dx < 0:
                sl = (uv[s] - kyv[r]) / dx
                if sl > bhi[s]:
                    bhi[s] = sl

    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(p)
    cdef double[::1] ov = out
    for q in range(p):
        best = INFINITY
        for s in range(m):
            z = pv[q] - g[s]
            if z >= 0 and blo[s] != INFINITY:
                cand = uv[s] + blo[s] * z
                if cand < best:
                    best = cand
            if z <= 0 and bhi[s] != -INFINITY:
                cand = uv[s] + bhi[s] * z
                if cand < best:
                    best = cand
        ov[q] = best
    return out
