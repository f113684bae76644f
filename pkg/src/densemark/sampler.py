"""Keypoint derivation: seeds -> iterated Delaunay centroids -> vertex snap.

The sampling plane is template UV space, so the derived vertex-index set is
subject- and pose-invariant. Seeds are given as ordinals into the 68-point
landmark schema and resolved to template vertices through a landmark table.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .delaunay import centroids, delaunay
from .errors import DomainError
from .geom import KeypointSet

DEDUP_TOL = 1e-9

# 17 jawline ordinals, the lower-lip midpoint as the 18th lower-face anchor,
# then the nose tip, in the standard 68-point ordering.
DEFAULT_SEED_INDICES_68 = tuple(range(17)) + (57, 30)
NOSE_TIP_68 = 30


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for the keypoint derivation run."""

    seed_indices68: tuple = DEFAULT_SEED_INDICES_68
    iterations: int = 3
    snap_dedup: bool = True

    def __post_init__(self):
        seeds = tuple(int(i) for i in self.seed_indices68)
        if len(seeds) != 19 or len(set(seeds)) != 19:
            raise DomainError("seed_indices68 must hold 19 unique ordinals")
        if not all(0 <= s < 68 for s in seeds):
            raise DomainError("seed ordinals must lie in [0,68)")
        if self.iterations < 1:
            raise DomainError("iterations must be >= 1")
        object.__setattr__(self, "seed_indices68", seeds)

    def seed_tags(self):
        return tuple("seed-nose" if s == NOSE_TIP_68 else "seed-jaw"
                     for s in self.seed_indices68)


@dataclass(frozen=True)
class SampledPoints:
    """UV points accumulated by iterate_sampling, with provenance tags."""

    points: np.ndarray  # (m, 2) float64
    tags: tuple         # m provenance strings

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "tags", tuple(self.tags))
        if len(self.points) != len(self.tags):
            raise DomainError("points/tags length mismatch")


def iterate_sampling(seeds, iterations, seed_tags=None):
    """Accumulate centroid points over repeated Delaunay rounds.

    Each round triangulates everything gathered so far and appends the
    centroid of every triangle; points landing within 1e-9 of an existing
    point are dropped. Returns the seeds plus all surviving centroids.
    """
    pts = np.ascontiguousarray(np.atleast_2d(seeds), dtype=np.float64)
    if iterations < 1:
        raise DomainError("iterations must be >= 1")
    if seed_tags is None:
        seed_tags = ("seed-jaw",) * len(pts)
    tags = list(seed_tags)
    if len(tags) != len(pts):
        raise DomainError("seed_tags length must match seeds")
    acc = [row for row in pts]
    for round_no in range(1, iterations + 1):
        tri = delaunay(np.asarray(acc))
        tag = f"centroid-iter{round_no}"
        for cand in centroids(tri):
            existing = np.asarray(acc)
            du = existing[:, 0] - cand[0]
            dv = existing[:, 1] - cand[1]
            if (du * du + dv * dv).min() <= DEDUP_TOL * DEDUP_TOL:
                continue
            acc.append(cand)
            tags.append(tag)
    return SampledPoints(np.asarray(acc), tuple(tags))


def snap_to_vertices(points, mesh, tags=None, dedup=True,
                     template_vertex_count=None):
    """Map sampling-plane points to their nearest template vertices.

    Nearest-neighbor ties go to the lowest vertex index. With ``dedup``,
    later points snapping onto an already-taken vertex are dropped (first
    occurrence wins, provenance kept). Returns a KeypointSet with an
    identity mirror table; see build_mirror_table.
    """
    if isinstance(points, SampledPoints):
        tags = points.tags if tags is None else tags
        points = points.points
    pts = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
    if len(pts) == 0:
        raise DomainError("cannot snap an empty point set")
    if tags is None:
        tags = ("manual",) * len(pts)
    if len(tags) != len(pts):
        raise DomainError("tags length must match points")
    snapped = kernels.nearest_vertices(pts, mesh.uv)
    if dedup:
        seen = set()
        keep_idx, keep_tags = [], []
        for i, vtx in enumerate(snapped):
            v = int(vtx)
            if v in seen:
                continue
            seen.add(v)
            keep_idx.append(v)
            keep_tags.append(tags[i])
        indices, out_tags = keep_idx, keep_tags
    else:
        indices, out_tags = [int(v) for v in snapped], list(tags)
    return KeypointSet(
        indices=np.asarray(indices, dtype=np.int64),
        provenance=tuple(out_tags),
        template_vertex_count=(template_vertex_count
                               if template_vertex_count is not None
                               else mesh.vertex_count),
    )


def build_mirror_table(keys, mesh):
    """Pair left/right symmetric keypoints via UV reflection about u = 1/2.

    Keypoint i's candidate partner is the keypoint nearest to (1-u, v).
    A pair is kept only when the match is mutual; everything else is
    self-mirrored, so the table is an involution by construction.
    """
    uv = mesh.uv[keys.indices]
    reflected = np.column_stack([1.0 - uv[:, 0], uv[:, 1]])
    nearest = kernels.nearest_vertices(reflected, uv)
    n = len(keys)
    mirror = np.arange(n, dtype=np.int64)
    for i in range(n):
        j = int(nearest[i])
        if int(nearest[j]) == i:
            mirror[i] = j
    return KeypointSet(
        indices=keys.indices,
        mirror=mirror,
        provenance=keys.provenance,
        template_vertex_count=keys.template_vertex_count,
        version=keys.version,
    )


def run_sampling(mesh, landmark68_indices, config=None):
    """Full derivation: 19 seeds, iterated centroids, snap, mirror table."""
    config = config or SamplerConfig()
    lm = np.ascontiguousarray(landmark68_indices, dtype=np.int64)
    if lm.shape != (68,):
        raise DomainError(f"landmark table must hold 68 vertex indices, "
                          f"got shape {lm.shape}")
    seed_vertices = lm[list(config.seed_indices68)]
    seeds = mesh.uv[seed_vertices]
    sampled = iterate_sampling(seeds, config.iterations,
                               seed_tags=config.seed_tags())
    keys = snap_to_vertices(sampled, mesh, dedup=config.snap_dedup)
    return build_mirror_table(keys, mesh)


def top_up_manual(keys, mesh, target):
    """Grow a keypoint set to ``target`` entries with evenly strided unused
    vertices tagged "manual".

    A deterministic stand-in for the human rectification pass; the editing
    UI can then move or replace these like any other manual point.
    """
    if target < len(keys):
        raise DomainError(f"target {target} below current count {len(keys)}")
    if target == len(keys):
        return keys
    needed = target - len(keys)
    taken = set(int(i) for i in keys.indices)
    pool = np.array([i for i in range(mesh.vertex_count) if i not in taken],
                    dtype=np.int64)
    if len(pool) < needed:
        raise DomainError(f"template has only {len(pool)} unused vertices, "
                          f"need {needed}")
    stride = len(pool) // needed
    extra = pool[::stride][:needed]
    merged = KeypointSet(
        indices=np.concatenate([keys.indices, extra]),
        provenance=keys.provenance + ("manual",) * needed,
        template_vertex_count=keys.template_vertex_count,
        version=keys.version,
    )
    return build_mirror_table(merged, mesh)


def merge_keep_manual(existing, fresh, mesh):
    """Re-run merge rule: manual entries always survive a sampler re-run.

    Keeps every manual-provenance entry of ``existing`` (in order), then
    appends fresh sampled entries that do not collide with them. The mirror
    table is rebuilt over the merged set and the version is advanced.
    """
    manual_idx = [int(v) for v, tag in zip(existing.indices,
                                           existing.provenance)
                  if tag == "manual"]
    manual_set = set(manual_idx)
    indices = list(manual_idx)
    tags = ["manual"] * len(manual_idx)
    for v, tag in zip(fresh.indices, fresh.provenance):
        v = int(v)
        if v in manual_set:
            continue
        indices.append(v)
        tags.append(tag)
    merged = KeypointSet(
        indices=np.asarray(indices, dtype=np.int64),
        provenance=tuple(tags),
        template_vertex_count=existing.template_vertex_count,
        version=existing.version + 1,
    )
    return build_mirror_table(merged, mesh)
