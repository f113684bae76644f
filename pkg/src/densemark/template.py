"""Deterministic reference template and its 68-landmark table.

A stand-in for the license-encumbered 43867-vertex face template: vertices
sit on a 257x257 dyadic UV lattice restricted to an elliptical face region,
with a quadratic depth profile and nose bump. Everything is built from
exact lattice rationals and basic float64 arithmetic (no trig, no RNG), so
vertex order, positions and landmark indices are bit-identical across
platforms and sampling fixtures can be frozen.

Real templates are supplied at the CLI as OBJ or NPY pairs; this module
only backs tests, fixtures and the out-of-the-box demo flow.
"""

from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DomainError
from .geom import REFERENCE_VERTEX_COUNT, TemplateMesh
from .sampler import SamplerConfig, run_sampling, top_up_manual

_GRID = 256  # lattice denominator; grid has _GRID+1 samples per axis

# Stylized 68-point layout in UV (u right, v down, face centred on u=0.5):
# 0-16 jaw, 17-26 brows, 27-30 nose bridge (30 = tip), 31-35 nose base,
# 36-47 eyes, 48-59 outer mouth, 60-67 inner mouth.
LANDMARK68_UV = (
    (0.08, 0.35), (0.095, 0.46), (0.12, 0.56), (0.155, 0.65), (0.20, 0.73),
    (0.25, 0.80), (0.31, 0.86), (0.40, 0.905), (0.50, 0.92), (0.60, 0.905),
    (0.69, 0.86), (0.75, 0.80), (0.80, 0.73), (0.845, 0.65), (0.88, 0.56),
    (0.905, 0.46), (0.92, 0.35),
    (0.17, 0.30), (0.235, 0.27), (0.30, 0.26), (0.365, 0.27), (0.43, 0.295),
    (0.57, 0.295), (0.635, 0.27), (0.70, 0.26), (0.765, 0.27), (0.83, 0.30),
    (0.50, 0.33), (0.50, 0.40), (0.50, 0.47), (0.50, 0.54),
    (0.42, 0.60), (0.46, 0.615), (0.50, 0.625), (0.54, 0.615), (0.58, 0.60),
    (0.22, 0.36), (0.27, 0.335), (0.33, 0.335), (0.38, 0.36), (0.33, 0.385),
    (0.27, 0.385),
    (0.62, 0.36), (0.67, 0.335), (0.73, 0.335), (0.78, 0.36), (0.73, 0.385),
    (0.67, 0.385),
    (0.35, 0.72), (0.40, 0.695), (0.46, 0.68), (0.50, 0.685), (0.54, 0.68),
    (0.60, 0.695), (0.65, 0.72), (0.60, 0.755), (0.54, 0.775), (0.50, 0.78),
    (0.46, 0.775), (0.40, 0.755),
    (0.38, 0.72), (0.46, 0.71), (0.50, 0.715), (0.54, 0.71), (0.62, 0.72),
    (0.54, 0.735), (0.50, 0.74), (0.46, 0.735),
)


def _face_field(u, v):
    """Elliptical face field: < 1 inside the face region."""
    du = (u - 0.5) / 0.47
    dv = (v - 0.48) / 0.49
    return du * du + dv * dv


@lru_cache(maxsize=1)
def reference_template():
    """The 43867-vertex deterministic reference TemplateMesh."""
    side = _GRID + 1
    i = np.arange(side, dtype=np.float64)
    u = np.tile(i / float(_GRID), side)          # raster order: v-major
    v = np.repeat(i / float(_GRID), side)
    f = _face_field(u, v)

    k = REFERENCE_VERTEX_COUNT
    kth = np.partition(f, k - 1)[k - 1]
    selected = f < kth
    short = k - int(selected.sum())
    ties = np.flatnonzero(f == kth)
    selected[ties[:short]] = True

    su, sv, sf = u[selected], v[selected], f[selected]
    x = 16.0 + 224.0 * su
    y = 16.0 + 224.0 * sv
    qu = su - 0.5
    qv = sv - 0.54
    nose = qu * qu + qv * qv
    z = (96.0 * np.maximum(0.0, 1.0 - sf)
         + 24.0 * np.maximum(0.0, 1.0 - 48.0 * nose))
    return TemplateMesh(np.column_stack([x, y, z]),
                        np.column_stack([su, sv]))


@lru_cache(maxsize=1)
def reference_landmarks68():
    """Vertex indices of the 68 landmarks on the reference template."""
    mesh = reference_template()
    table = np.asarray(LANDMARK68_UV, dtype=np.float64)
    idx = kernels.nearest_vertices(table, mesh.uv)
    if len(np.unique(idx)) != 68:
        raise DomainError("reference 68-landmark table snapped onto "
                          "duplicate vertices")
    return idx


def load_landmarks68(path):
    """68-entry vertex-index table from JSON (either a list or {indices})."""
    import json

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        doc = doc["indices"]
    arr = np.asarray(doc, dtype=np.int64)
    if arr.shape != (68,):
        raise DomainError(f"landmark table must hold 68 indices, "
                          f"got shape {arr.shape}")
    return arr


def reference_keypoint_set(target=None, config=None):
    """Sampled keypoints on the reference template.

    With ``target`` (e.g. 520), tops the sampled set up via
    sampler.top_up_manual, standing in for the human rectification pass so
    downstream fixtures have a full-cardinality set.
    """
    mesh = reference_template()
    keys = run_sampling(mesh, reference_landmarks68(),
                        config or SamplerConfig())
    if target is None:
        return keys
    return top_up_manual(keys, mesh, target)
