"""Incremental (Bowyer-Watson) Delaunay triangulation in the UV plane.

Determinism contract, relied on by the sampling regression fixtures:
points are inserted in index order, all predicates are plain float64
arithmetic (identical on both kernel backends), triangle tuples are
canonically rotated (lowest vertex first, orientation preserved) and the
triangle list is sorted. Exactly-cocircular quads are post-processed so the
kept diagonal is the one emanating from the lowest point index.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import GeometryError


class Point2(NamedTuple):
    """A point in the 2D sampling (UV) plane."""

    u: float
    v: float


def _orient2d(ax, ay, bx, by, cx, cy):
    # Same expression as kernels.orient_dets; > 0 means counter-clockwise.
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _incircle(pts, a, b, c, d):
    """Incircle determinant of point d against CCW triangle (a, b, c)."""
    px, py = pts[d]
    adx = pts[a][0] - px
    ady = pts[a][1] - py
    bdx = pts[b][0] - px
    bdy = pts[b][1] - py
    cdx = pts[c][0] - px
    cdy = pts[c][1] - py
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    return (adx * (bdy * clift - blift * cdy)
            - ady * (bdx * clift - blift * cdx)
            + alift * (bdx * cdy - bdy * cdx))


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Point array plus CCW triangle index triples (canonical order)."""

    points: np.ndarray     # (n, 2) float64
    triangles: np.ndarray  # (t, 3) int64, CCW, lowest index first, sorted

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        tris = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if len(tris) and (tris.min() < 0 or tris.max() >= len(pts)):
            raise GeometryError("triangle references invalid point index")
        if len(tris):
            areas = kernels.orient_dets(pts, tris)
            if not (areas > 0.0).all():
                raise GeometryError("triangulation contains a non-CCW or "
                                    "zero-area triangle")
        pts.setflags(write=False)
        tris.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "triangles", tris)


def _canonical(tri):
    a, b, c = tri
    if a <= b and a <= c:
        return (a, b, c)
    if b <= a and b <= c:
        return (b, c, a)
    return (c, a, b)


def _super_triangle(points):
    minx, miny = points.min(axis=0)
    maxx, maxy = points.max(axis=0)
    cx = (minx + maxx) / 2.0
    cy = (miny + maxy) / 2.0
    span = max(maxx - minx, maxy - miny, 1.0)
    scale = 1.0
    while scale < span:
        scale *= 2.0
    m = scale * 1048576.0  # power-of-two offset keeps small cases exact
    return np.array([[cx - m, cy - m],
                     [cx + m, cy - m],
                     [cx, cy + m]], dtype=np.float64)


def _prefer_lowest_diagonals(pts, tris):
    """Re-diagonalize exactly-cocircular quads toward the lowest point index.

    Only fires when the incircle determinant is exactly zero, so it is a
    no-op for points in general position. Each flip strictly lowers the
    flipped edge's smallest endpoint, which bounds the loop.
    """
    tris = [_canonical(t) for t in tris]
    changed = True
    while changed:
        changed = False
        edges = {}
        for pos, (a, b, c) in enumerate(tris):
            for e in ((a, b), (b, c), (c, a)):
                edges.setdefault((min(e), max(e)), []).append(pos)
        for edge in sorted(edges):
            owners = edges[edge]
            if len(owners) != 2:
                continue
            i, j = edge
            t1, t2 = tris[owners[0]], tris[owners[1]]
            k = next(v for v in t1 if v != i and v != j)
            l = next(v for v in t2 if v != i and v != j)
            if min(k, l) >= min(i, j):
                continue
            if _incircle(pts, *t1, l) != 0.0:
                continue
            ta = (i, k, l)
            tb = (k, j, l)
            if _orient2d(*pts[ta[0]], *pts[ta[1]], *pts[ta[2]]) < 0.0:
                ta = (ta[0], ta[2], ta[1])
            if _orient2d(*pts[tb[0]], *pts[tb[1]], *pts[tb[2]]) < 0.0:
                tb = (tb[0], tb[2], tb[1])
            tris[owners[0]] = _canonical(ta)
            tris[owners[1]] = _canonical(tb)
            changed = True
            break
    return tris


def delaunay(points):
    """Delaunay triangulation of 2D points.

    Requires >= 3 points, no exact duplicates, not all collinear.
    Cocircular ties keep the diagonal emanating from the lowest point index.
    """
    pts = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError(f"points must be (n,2), got {pts.shape}")
    if not np.isfinite(pts).all():
        raise GeometryError("points contain non-finite coordinates")
    n = len(pts)
    if n < 3:
        raise GeometryError(f"triangulation needs at least 3 points, got {n}")
    if len(np.unique(pts, axis=0)) != n:
        raise GeometryError("duplicate points in triangulation input")

    allpts = np.vstack([pts, _super_triangle(pts)])
    cap = max(64, 8 * n)
    tris = np.zeros((cap, 3), dtype=np.int64)
    alive = np.zeros(cap, dtype=bool)
    tris[0] = (n, n + 1, n + 2)
    alive[0] = True
    nrows = 1

    for p in range(n):
        px, py = float(pts[p, 0]), float(pts[p, 1])
        dets = kernels.incircle_dets(allpts, tris[:nrows], px, py)
        bad = np.flatnonzero(alive[:nrows] & (dets > 0.0))
        if len(bad) == 0:
            raise GeometryError(f"point {p} found no cavity (degenerate "
                                f"input near-duplicate?)")
        directed = set()
        ordered = []
        for row in bad:
            a, b, c = tris[row]
            for e in ((a, b), (b, c), (c, a)):
                directed.add((int(e[0]), int(e[1])))
                ordered.append((int(e[0]), int(e[1])))
        alive[bad] = False
        for a, b in ordered:
            if (b, a) in directed:
                continue  # interior to the cavity
            if _orient2d(allpts[a, 0], allpts[a, 1], allpts[b, 0],
                         allpts[b, 1], px, py) <= 0.0:
                raise GeometryError(f"degenerate cavity boundary at point {p}")
            if nrows == cap:
                cap *= 2
                grown = np.zeros((cap, 3), dtype=np.int64)
                grown[:nrows] = tris
                tris = grown
                grown_alive = np.zeros(cap, dtype=bool)
                grown_alive[:nrows] = alive
                alive = grown_alive
            tris[nrows] = (a, b, p)
            alive[nrows] = True
            nrows += 1

    final = [tuple(map(int, tris[r])) for r in np.flatnonzero(alive[:nrows])
             if max(tris[r]) < n]
    if not final:
        raise GeometryError("points are collinear; no triangulation exists")
    final = _prefer_lowest_diagonals(pts, final)
    final.sort()
    return Triangulation(pts, np.asarray(final, dtype=np.int64))


def centroids(tri):
    """Centroid of every triangle, in triangle order. Returns (t,2) float64."""
    pts = tri.points
    t = tri.triangles
    return (pts[t[:, 0]] + pts[t[:, 1]] + pts[t[:, 2]]) / 3.0
