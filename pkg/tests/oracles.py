"""Independent reference implementations used as test oracles.

Everything here is deliberately written on a different code path from the
package: np.linalg.det instead of cofactor expansion, plain Python loops
instead of vectorized argmin, a closed-form AUC identity instead of the
knot integral. Keep it that way; an oracle that shares code with the thing
it checks proves nothing.
"""

import math

import numpy as np


def incircle_matrix_det(points, tri, d):
    """Incircle determinant via np.linalg.det (LU), not cofactor expansion."""
    rows = []
    for v in tri:
        dx = points[v][0] - points[d][0]
        dy = points[v][1] - points[d][1]
        rows.append([dx, dy, dx * dx + dy * dy])
    return float(np.linalg.det(np.asarray(rows)))


def empty_circumcircle_violation(points, triangles, rel_tol=1e-9):
    """Worst relative circumcircle violation over all (triangle, point).

    Returns (worst_relative_det, count_exceeding_rel_tol). The determinant
    is normalized by the product of its row norms so the measure is scale
    free; positive values mean a point sits inside a circumcircle.
    """
    pts = np.asarray(points, dtype=np.float64)
    tris = np.asarray(triangles, dtype=np.int64)
    n = len(pts)
    worst = -np.inf
    violations = 0
    for tri in tris:
        a, b, c = (pts[tri[0]], pts[tri[1]], pts[tri[2]])
        others = np.array([k for k in range(n) if k not in set(map(int, tri))])
        if len(others) == 0:
            continue
        d = pts[others]
        m = np.empty((len(others), 3, 3))
        for row, v in enumerate((a, b, c)):
            delta = v[np.newaxis, :] - d
            m[:, row, 0] = delta[:, 0]
            m[:, row, 1] = delta[:, 1]
            m[:, row, 2] = delta[:, 0] ** 2 + delta[:, 1] ** 2
        dets = np.linalg.det(m)
        norms = np.linalg.norm(m, axis=2).prod(axis=1)
        rel = dets / np.where(norms == 0.0, 1.0, norms)
        worst = max(worst, float(rel.max()))
        violations += int((rel > rel_tol).sum())
    return worst, violations


def triangulation_covers_points(points, triangles):
    """Every non-degenerate input point index appears in some triangle."""
    used = set(int(v) for tri in triangles for v in tri)
    return used == set(range(len(points)))


def linear_scan_nearest(queries, verts):
    """Nearest vertex per query by an explicit double loop."""
    out = []
    for q in np.atleast_2d(queries):
        best, best_d2 = 0, math.inf
        for j, v in enumerate(verts):
            d2 = (v[0] - q[0]) ** 2 + (v[1] - q[1]) ** 2
            if d2 < best_d2:
                best, best_d2 = j, d2
        out.append(best)
    return out


def naive_wing(x, w=15.0, eps=3.0):
    ax = abs(x)
    c = w - w * math.log(1.0 + w / eps)
    if ax < w:
        return w * math.log(1.0 + ax / eps)
    return ax - c


def naive_nme(pred, gt, d, mode="3d"):
    """Eq-by-the-book NME with explicit loops."""
    total = 0.0
    n = len(pred)
    for p, g in zip(pred, gt):
        if mode == "2d":
            dist = math.hypot(p[0] - g[0], p[1] - g[1])
        else:
            dist = math.sqrt((p[0] - g[0]) ** 2 + (p[1] - g[1]) ** 2
                             + (p[2] - g[2]) ** 2)
        total += dist / d
    return total / n


def naive_auc(nmes, cap):
    """AUC identity: mean over samples of (cap - min(nme, cap)) / cap."""
    vals = [min(float(v), cap) for v in nmes]
    return sum(cap - v for v in vals) / (cap * len(vals))


def central_difference(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)
