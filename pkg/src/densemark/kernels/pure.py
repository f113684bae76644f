"""Pure numpy kernel backend.

These are the reference implementations of the hot inner loops: circumcircle
tests for the incremental triangulation, brute-force nearest-vertex snapping,
and the elementwise wing loss. The compiled backend in ``_fast`` mirrors the
floating-point expressions here term for term, so the algebraic kernels
(incircle, orient, nearest-vertex, wing gradient) return bit-identical
float64 results on either backend. ``wing_values`` goes through ``log``,
whose last-ulp rounding may differ between numpy's vectorized log and libm.
"""

import numpy as np

NAME = "pure"


def incircle_dets(points, triangles, px, py):
    """Incircle determinant of point (px,py) against each CCW triangle.

    Positive: strictly inside the circumcircle. Zero: cocircular.
    Negative: outside. ``points`` is (n,2) float64, ``triangles`` (t,3) int.
    """
    a = points[triangles[:, 0]]
    b = points[triangles[:, 1]]
    c = points[triangles[:, 2]]
    adx = a[:, 0] - px
    ady = a[:, 1] - py
    bdx = b[:, 0] - px
    bdy = b[:, 1] - py
    cdx = c[:, 0] - px
    cdy = c[:, 1] - py
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    return (adx * (bdy * clift - blift * cdy)
            - ady * (bdx * clift - blift * cdx)
            + alift * (bdx * cdy - bdy * cdx))


def orient_dets(points, triangles):
    """Twice the signed area of each triangle (positive = counter-clockwise)."""
    a = points[triangles[:, 0]]
    b = points[triangles[:, 1]]
    c = points[triangles[:, 2]]
    return ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
            - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def nearest_vertices(queries, verts, chunk=64):
    """Index of the nearest vertex (squared Euclidean) for each query point.

    Exhaustive scan; ties resolve to the lowest vertex index. ``queries`` is
    (m,2), ``verts`` (n,2), both float64. Returns int64 (m,).
    """
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    out = np.empty(len(queries), dtype=np.int64)
    for start in range(0, len(queries), chunk):
        q = queries[start:start + chunk]
        du = verts[np.newaxis, :, 0] - q[:, 0, np.newaxis]
        dv = verts[np.newaxis, :, 1] - q[:, 1, np.newaxis]
        d2 = du * du + dv * dv
        out[start:start + chunk] = np.argmin(d2, axis=1)
    return out


def wing_values(x, w, eps, c):
    """Elementwise wing loss: w*ln(1+|x|/eps) for |x| < w, else |x| - c."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    return np.where(ax < w, w * np.log(1.0 + ax / eps), ax - c)


def wing_grads(x, w, eps):
    """Elementwise wing derivative.

    sign(x)*w/(eps+|x|) on the log branch, sign(x) on the linear branch,
    0 at x = 0 (symmetric subgradient).
    """
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    mag = np.where(ax < w, w / (eps + ax), 1.0)
    return np.sign(x) * mag
