"""Domain types and primitive geometry shared by the whole toolchain.

Conventions, fixed once and tested:
  * UV coordinates live in [0,1]^2; u maps to grid columns, v to rows,
    origin at the top-left of the position map.
  * UV -> pixel uses round-half-up nearest pixel by default
    (row = floor(v*(H-1) + 0.5)); bilinear lookup is opt-in.
  * Position maps store (x, y, z) per pixel: x,y are image-plane pixel
    coordinates, z is depth in the same pixel scale (left-handed).
  * All types are immutable after construction; operations are pure.
"""

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateBoxError, DomainError, MaskedLookupError,
                     ParseError, ShapeError, ValidationError)
from . import kernels

REFERENCE_VERTEX_COUNT = 43867

KEYPOINT_SCHEMA_VERSION = 1

_PROVENANCE_RE = re.compile(r"^(seed-jaw|seed-nose|centroid-iter[0-9]+|manual)$")


def _readonly(arr):
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TemplateMesh:
    """Fixed face template: per-vertex 3D position plus UV coordinate.

    The vertex indices of this mesh are the universe every KeypointSet
    points into; the reference template has 43867 vertices.
    """

    vertices: np.ndarray  # (n, 3) float64, model units
    uv: np.ndarray        # (n, 2) float64 in [0,1]^2

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        uv = np.ascontiguousarray(self.uv, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ShapeError(f"vertices must be (n,3), got {v.shape}")
        if uv.ndim != 2 or uv.shape[1] != 2:
            raise ShapeError(f"uv must be (n,2), got {uv.shape}")
        if len(v) != len(uv):
            raise ShapeError(f"vertex/uv count mismatch: {len(v)} vs {len(uv)}")
        if not np.isfinite(v).all() or not np.isfinite(uv).all():
            raise DomainError("mesh contains non-finite coordinates")
        if uv.min() < 0.0 or uv.max() > 1.0:
            raise DomainError("uv coordinates must lie in [0,1]")
        object.__setattr__(self, "vertices", _readonly(v))
        object.__setattr__(self, "uv", _readonly(uv))

    @property
    def vertex_count(self):
        return len(self.vertices)


@dataclass(frozen=True, eq=False)
class UVPositionMap:
    """H x W grid of Pos(u,v) = (x,y,z) triples, optionally masked.

    ``mask`` is a boolean validity grid (True = face pixel). A missing mask
    means every pixel is valid. Masked pixels are excluded from lookups and
    statistics.
    """

    data: np.ndarray            # (H, W, 3) float32
    mask: np.ndarray = None     # (H, W) bool or None

    def __post_init__(self):
        d = np.ascontiguousarray(self.data, dtype=np.float32)
        if d.ndim != 3 or d.shape[2] != 3:
            raise ShapeError(f"position map must be (H,W,3), got {d.shape}")
        if not np.isfinite(d).all():
            raise DomainError("position map contains non-finite values")
        object.__setattr__(self, "data", _readonly(d))
        if self.mask is not None:
            m = np.ascontiguousarray(self.mask).astype(bool)
            if m.shape != d.shape[:2]:
                raise ShapeError(f"mask shape {m.shape} does not match "
                                 f"map {d.shape[:2]}")
            object.__setattr__(self, "mask", _readonly(m))

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


def schema_for(n):
    """Canonical landmark schema name for a point count."""
    return {68: "L68", 21: "L21", 520: "D520"}.get(n, f"custom({n})")


def _schema_count(schema):
    named = {"L68": 68, "L21": 21, "D520": 520}
    if schema in named:
        return named[schema]
    m = re.fullmatch(r"custom\((\d+)\)", schema)
    if not m:
        raise ShapeError(f"unknown landmark schema {schema!r}")
    return int(m.group(1))


@dataclass(frozen=True, eq=False)
class LandmarkSet:
    """Ordered 3D landmark positions (pixel units) under a named schema."""

    points: np.ndarray  # (N, 3) float64
    schema: str = None

    def __post_init__(self):
        p = np.ascontiguousarray(self.points, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ShapeError(f"landmarks must be (N,3), got {p.shape}")
        if not np.isfinite(p).all():
            raise DomainError("landmarks contain non-finite coordinates")
        schema = self.schema or schema_for(len(p))
        if _schema_count(schema) != len(p):
            raise ShapeError(f"schema {schema} expects {_schema_count(schema)} "
                             f"points, got {len(p)}")
        object.__setattr__(self, "points", _readonly(p))
        object.__setattr__(self, "schema", schema)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class KeypointSet:
    """Ordered template-vertex indices with mirror pairing and provenance.

    ``mirror`` is an involution over keypoint ordinals pairing left/right
    symmetric points (self-pairs sit on the symmetry line). ``provenance``
    tags each entry with how it was produced (seed-jaw, seed-nose,
    centroid-iterK, manual).
    """

    indices: np.ndarray                  # (N,) int64, unique
    mirror: np.ndarray = None            # (N,) int64 involution, default identity
    provenance: tuple = None             # N tags, default "manual"
    template_vertex_count: int = REFERENCE_VERTEX_COUNT
    version: int = 1

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int64)
        if idx.ndim != 1:
            raise ShapeError(f"indices must be 1-d, got shape {idx.shape}")
        n = len(idx)
        mirror = self.mirror
        if mirror is None:
            mirror = np.arange(n, dtype=np.int64)
        mirror = np.ascontiguousarray(mirror, dtype=np.int64)
        prov = self.provenance
        if prov is None:
            prov = ("manual",) * n
        prov = tuple(prov)
        self._validate(idx, mirror, prov, self.template_vertex_count)
        object.__setattr__(self, "indices", _readonly(idx))
        object.__setattr__(self, "mirror", _readonly(mirror))
        object.__setattr__(self, "provenance", prov)

    @staticmethod
    def _validate(idx, mirror, prov, vertex_count):
        n = len(idx)
        if len(np.unique(idx)) != n:
            raise ValidationError("keypoint indices must be unique",
                                  invariant="indices unique")
        if n and (idx.min() < 0 or idx.max() >= vertex_count):
            raise ValidationError(
                f"keypoint indices must lie in [0,{vertex_count})",
                invariant="indices in range")
        if mirror.shape != (n,):
            raise ValidationError("mirror table length must match indices",
                                  invariant="mirror length")
        if n and (mirror.min() < 0 or mirror.max() >= n):
            raise ValidationError("mirror entries must be keypoint ordinals",
                                  invariant="mirror in range")
        if not np.array_equal(mirror[mirror], np.arange(n)):
            raise ValidationError("mirror table must be an involution",
                                  invariant="mirror involution")
        if len(prov) != n:
            raise ValidationError("provenance length must match indices",
                                  invariant="provenance length")
        for tag in prov:
            if not _PROVENANCE_RE.match(tag):
                raise ValidationError(f"unknown provenance tag {tag!r}",
                                      invariant="provenance tag")

    def __len__(self):
        return len(self.indices)

    def to_json_dict(self):
        return {
            "version": int(self.version),
            "schemaVersion": KEYPOINT_SCHEMA_VERSION,
            "templateVertexCount": int(self.template_vertex_count),
            "indices": [int(i) for i in self.indices],
            "mirror": [int(i) for i in self.mirror],
            "provenance": list(self.provenance),
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json_dict(cls, doc):
        try:
            return cls(
                indices=np.asarray(doc["indices"], dtype=np.int64),
                mirror=np.asarray(doc["mirror"], dtype=np.int64),
                provenance=tuple(doc["provenance"]),
                template_vertex_count=int(doc["templateVertexCount"]),
                version=int(doc.get("version", 1)),
            )
        except KeyError as exc:
            raise ParseError(f"keypoint set JSON missing field {exc}") from exc

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"keypoint set is not valid JSON: {exc}") from exc
        return cls.from_json_dict(doc)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return cls.from_json(fh.read())
        except OSError as exc:
            raise ParseError(f"cannot read keypoint set {path}: {exc}") from exc


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box; h/w strictly positive."""

    x0: float
    y0: float
    h: float
    w: float

    def __post_init__(self):
        if not (self.h > 0 and self.w > 0):
            raise DegenerateBoxError(f"box must have positive extent, "
                                     f"got h={self.h}, w={self.w}")

    @property
    def d(self):
        """Normalization factor sqrt(h*w)."""
        return float(np.sqrt(self.h * self.w))


def _pixel_coords(uv, height, width):
    """Round-half-up mapping of uv in [0,1]^2 to (row, col)."""
    u, v = float(uv[0]), float(uv[1])
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise DomainError(f"uv out of range [0,1]: ({u}, {v})")
    row = int(np.floor(v * (height - 1) + 0.5))
    col = int(np.floor(u * (width - 1) + 0.5))
    return row, col


def lookup_position_map(pmap, uv, mode="nearest"):
    """3D position stored at a UV coordinate.

    nearest mode returns the grid triple at (row, col) =
    (round(v*(H-1)), round(u*(W-1))) with round-half-up; bilinear mode
    interpolates the four surrounding pixels. Raises DomainError for uv
    outside [0,1]^2 and MaskedLookupError when a contributing pixel is
    masked out.
    """
    if mode == "nearest":
        row, col = _pixel_coords(uv, pmap.height, pmap.width)
        if pmap.mask is not None and not pmap.mask[row, col]:
            raise MaskedLookupError(f"pixel ({row},{col}) is masked")
        return pmap.data[row, col].astype(np.float64)
    if mode == "bilinear":
        return _bilinear_lookup(pmap, uv)
    raise DomainError(f"unknown lookup mode {mode!r}")


def _bilinear_lookup(pmap, uv):
    u, v = float(uv[0]), float(uv[1])
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise DomainError(f"uv out of range [0,1]: ({u}, {v})")
    y = v * (pmap.height - 1)
    x = u * (pmap.width - 1)
    r0, c0 = int(np.floor(y)), int(np.floor(x))
    r1, c1 = min(r0 + 1, pmap.height - 1), min(c0 + 1, pmap.width - 1)
    fy, fx = y - r0, x - c0
    acc = np.zeros(3, dtype=np.float64)
    for r, c, wgt in ((r0, c0, (1 - fy) * (1 - fx)), (r0, c1, (1 - fy) * fx),
                      (r1, c0, fy * (1 - fx)), (r1, c1, fy * fx)):
        if wgt == 0.0:
            continue
        if pmap.mask is not None and not pmap.mask[r, c]:
            raise MaskedLookupError(f"pixel ({r},{c}) is masked")
        acc += wgt * pmap.data[r, c].astype(np.float64)
    return acc


def extract_landmarks(pmap, mesh, keys, mode="nearest"):
    """Landmark set read off a position map at the keypoints' template UVs.

    result.points[i] == lookup_position_map(pmap, mesh.uv[keys.indices[i]]).
    Lookup errors are re-raised naming the offending keypoint ordinal and
    vertex index.
    """
    if len(keys) and int(keys.indices.max()) >= mesh.vertex_count:
        raise DomainError("keypoint indices exceed mesh vertex count")
    if keys.template_vertex_count != mesh.vertex_count:
        raise DomainError(
            f"keypoint set targets a {keys.template_vertex_count}-vertex "
            f"template, mesh has {mesh.vertex_count}")
    uvs = mesh.uv[keys.indices]
    if mode == "nearest":
        rows = np.floor(uvs[:, 1] * (pmap.height - 1) + 0.5).astype(np.intp)
        cols = np.floor(uvs[:, 0] * (pmap.width - 1) + 0.5).astype(np.intp)
        if pmap.mask is not None:
            bad = ~pmap.mask[rows, cols]
            if bad.any():
                k = int(np.flatnonzero(bad)[0])
                raise MaskedLookupError(
                    f"keypoint {k} (vertex {int(keys.indices[k])}) reads a "
                    f"masked pixel")
        pts = pmap.data[rows, cols].astype(np.float64)
    else:
        pts = np.empty((len(keys), 3), dtype=np.float64)
        for k, uv in enumerate(uvs):
            try:
                pts[k] = lookup_position_map(pmap, uv, mode=mode)
            except MaskedLookupError as exc:
                raise MaskedLookupError(
                    f"keypoint {k} (vertex {int(keys.indices[k])}): {exc}"
                ) from exc
    return LandmarkSet(pts, schema_for(len(keys)))


def landmark_bounding_box(landmarks):
    """Tight axis-aligned box over the (x,y) projection of a landmark set."""
    pts = landmarks.points
    if len(pts) < 2:
        raise DomainError("bounding box needs at least 2 landmarks")
    x0, y0 = pts[:, 0].min(), pts[:, 1].min()
    w = pts[:, 0].max() - x0
    h = pts[:, 1].max() - y0
    if h == 0.0 or w == 0.0:
        raise DegenerateBoxError(f"landmark box degenerate: h={h}, w={w}")
    return BoundingBox(x0=float(x0), y0=float(y0), h=float(h), w=float(w))


def snap_uv_to_vertices(uvs, mesh):
    """Nearest template vertex for each UV point (lowest index wins ties)."""
    pts = np.ascontiguousarray(np.atleast_2d(uvs), dtype=np.float64)
    return kernels.nearest_vertices(pts, mesh.uv)
