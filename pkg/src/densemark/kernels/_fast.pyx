# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

Same contracts as densemark.kernels.pure; expressions are copied verbatim so
float64 results match the numpy backend bit for bit (the build disables fp
contraction for this reason). wing_values may differ from numpy in the last
ulp because it uses libm log.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log

cnp.import_array()

NAME = "fast"


def incircle_dets(cnp.ndarray points_in, cnp.ndarray triangles_in,
                  double px, double py):
    cdef const double[:, ::1] points = np.ascontiguousarray(points_in, dtype=np.float64)
    cdef const long long[:, ::1] tris = np.ascontiguousarray(triangles_in, dtype=np.int64)
    cdef Py_ssize_t t = tris.shape[0]
    out_arr = np.empty(t, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef Py_ssize_t ia, ib, ic
    cdef double adx, ady, bdx, bdy, cdx, cdy, alift, blift, clift
    for i in range(t):
        ia = <Py_ssize_t> tris[i, 0]
        ib = <Py_ssize_t> tris[i, 1]
        ic = <Py_ssize_t> tris[i, 2]
        adx = points[ia, 0] - px
        ady = points[ia, 1] - py
        bdx = points[ib, 0] - px
        bdy = points[ib, 1] - py
        cdx = points[ic, 0] - px
        cdy = points[ic, 1] - py
        alift = adx * adx + ady * ady
        blift = bdx * bdx + bdy * bdy
        clift = cdx * cdx + cdy * cdy
        out[i] = (adx * (bdy * clift - blift * cdy)
                  - ady * (bdx * clift - blift * cdx)
                  + alift * (bdx * cdy - bdy * cdx))
    return out_arr


def orient_dets(cnp.ndarray points_in, cnp.ndarray triangles_in):
    cdef const double[:, ::1] points = np.ascontiguousarray(points_in, dtype=np.float64)
    cdef const long long[:, ::1] tris = np.ascontiguousarray(triangles_in, dtype=np.int64)
    cdef Py_ssize_t t = tris.shape[0]
    out_arr = np.empty(t, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, ia, ib, ic
    for i in range(t):
        ia = <Py_ssize_t> tris[i, 0]
        ib = <Py_ssize_t> tris[i, 1]
        ic = <Py_ssize_t> tris[i, 2]
        out[i] = ((points[ib, 0] - points[ia, 0]) * (points[ic, 1] - points[ia, 1])
                  - (points[ib, 1] - points[ia, 1]) * (points[ic, 0] - points[ia, 0]))
    return out_arr


def nearest_vertices(cnp.ndarray queries_in, cnp.ndarray verts_in, chunk=64):
    # chunk is accepted for signature parity with the pure backend; the C
    # loop streams vertex rows and needs no chunking.
    cdef const double[:, ::1] queries = np.ascontiguousarray(queries_in, dtype=np.float64)
    cdef const double[:, ::1] verts = np.ascontiguousarray(verts_in, dtype=np.float64)
    cdef Py_ssize_t m = queries.shape[0]
    cdef Py_ssize_t n = verts.shape[0]
    out_arr = np.empty(m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, j, best
    cdef double qx, qy, du, dv, d2, best_d2
    for i in range(m):
        qx = queries[i, 0]
        qy = queries[i, 1]
        best = 0
        best_d2 = np.inf
        for j in range(n):
            du = verts[j, 0] - qx
            dv = verts[j, 1] - qy
            d2 = du * du + dv * dv
            if d2 < best_d2:  # strict: ties keep the lowest index
                best_d2 = d2
                best = j
        out[i] = best
    return out_arr


def wing_values(x_in, double w, double eps, double c):
    cdef const double[::1] x = np.ascontiguousarray(
        np.asarray(x_in, dtype=np.float64).ravel())
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double ax
    for i in range(n):
        ax = fabs(x[i])
        if ax < w:
            out[i] = w * log(1.0 + ax / eps)
        else:
            out[i] = ax - c
    return out_arr.reshape(np.shape(x_in))


def wing_grads(x_in, double w, double eps):
    cdef const double[::1] x = np.ascontiguousarray(
        np.asarray(x_in, dtype=np.float64).ravel())
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double v, ax, mag
    for i in range(n):
        v = x[i]
        ax = fabs(v)
        if ax < w:
            mag = w / (eps + ax)
        else:
            mag = 1.0
        if v > 0.0:
            out[i] = mag
        elif v < 0.0:
            out[i] = -mag
        else:
            out[i] = 0.0
    return out_arr.reshape(np.shape(x_in))
