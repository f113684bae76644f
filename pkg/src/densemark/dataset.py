"""Dataset ingestion, horizontal-flip augmentation, manifest building.

A dataset directory pairs files by name: <id>.jpg (or .png) with <id>.npy
(the position map), optionally <id>.meta.json carrying yaw and a bounding
box and <id>.mask.npy marking valid pixels. The build extracts 68- and
520-point ground truth per pair, optionally adds a flipped twin per record,
and writes landmark tensors plus a manifest.jsonl (one record per line,
sorted by id, originals before their flips) with build stats in a sidecar
manifest.meta.json. Images are referenced, never decoded.
"""

import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import npyio
from .errors import DomainError, EmptyDatasetError, ParseError
from .geom import BoundingBox, KeypointSet, LandmarkSet, UVPositionMap, \
    extract_landmarks

FLIP_SUFFIX = "_flip"
IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png")


@dataclass(frozen=True)
class SampleRecord:
    """One dataset entry; landmark tensors live in memory, files on disk."""

    id: str
    image_path: str
    posmap_path: str
    yaw: float                 # signed degrees, or None when unknown
    landmarks68: LandmarkSet
    landmarks520: LandmarkSet
    flipped: bool = False
    bbox: BoundingBox = None
    posmap: UVPositionMap = None  # carried during builds, not serialized

    def __post_init__(self):
        if len(self.landmarks68) != 68:
            raise DomainError("landmarks68 must hold 68 points")
        if len(self.landmarks520) != 520:
            raise DomainError("landmarks520 must hold 520 points")
        if self.yaw is not None and not -180.0 <= self.yaw <= 180.0:
            raise DomainError(f"yaw {self.yaw} outside [-180,180]")


def ingest_sample(image_path, posmap_path, yaw, mesh, keys520, keys68,
                  sample_id=None, bbox=None):
    """Build an unflipped SampleRecord by extracting both landmark sets."""
    if len(keys520) != 520:
        raise DomainError(f"keypoint set must hold 520 indices, "
                          f"got {len(keys520)}")
    if len(keys68) != 68:
        raise DomainError(f"68-point keypoint set must hold 68 indices, "
                          f"got {len(keys68)}")
    pmap = npyio.load_position_map(posmap_path)
    sid = sample_id if sample_id is not None else \
        os.path.splitext(os.path.basename(posmap_path))[0]
    return SampleRecord(
        id=sid,
        image_path=str(image_path),
        posmap_path=str(posmap_path),
        yaw=yaw,
        landmarks68=extract_landmarks(pmap, mesh, keys68),
        landmarks520=extract_landmarks(pmap, mesh, keys520),
        flipped=False,
        bbox=bbox,
        posmap=pmap,
    )


def _flip_points(points, mirror, image_width):
    out = points[np.asarray(mirror, dtype=np.int64)].copy()
    out[:, 0] = (image_width - 1.0) - out[:, 0]
    return out


def _flip_posmap(pmap, image_width):
    data = pmap.data[:, ::-1, :].copy()
    data[:, :, 0] = np.float32(image_width - 1) - data[:, :, 0]
    mask = None if pmap.mask is None else pmap.mask[:, ::-1].copy()
    return UVPositionMap(data, mask)


def mirror_record(record, image_width, keys520, keys68):
    """The flip transform: self-inverse on every field.

    Position-map columns are reversed and the x channel reflected to
    (image_width-1) - x; landmark lists are permuted by the mirror tables so
    ordinal i keeps its semantic identity; yaw is negated; the id gains or
    loses the _flip suffix. Applying it twice restores the record bit for
    bit (for pixel-grid coordinate data).
    """
    flipping = not record.flipped
    new_id = record.id + FLIP_SUFFIX if flipping else \
        record.id.removesuffix(FLIP_SUFFIX)
    bbox = record.bbox
    if bbox is not None:
        bbox = BoundingBox(x0=(image_width - 1.0) - bbox.x0 - bbox.w,
                           y0=bbox.y0, h=bbox.h, w=bbox.w)
    return replace(
        record,
        id=new_id,
        yaw=None if record.yaw is None else -record.yaw,
        landmarks68=LandmarkSet(
            _flip_points(record.landmarks68.points, keys68.mirror,
                         image_width), "L68"),
        landmarks520=LandmarkSet(
            _flip_points(record.landmarks520.points, keys520.mirror,
                         image_width), "D520"),
        flipped=flipping,
        bbox=bbox,
        posmap=None if record.posmap is None else
        _flip_posmap(record.posmap, image_width),
    )


def flip_sample(record, image_width, keys520, keys68):
    """Augmentation flip; refuses records that are already flipped."""
    if record.flipped:
        raise DomainError(f"record {record.id} is already flipped")
    return mirror_record(record, image_width, keys520, keys68)


def _read_meta(path):
    if not os.path.exists(path):
        return None, None, None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"bad metadata file {path}: {exc}") from exc
    yaw = doc.get("yaw")
    bbox = None
    if "bbox" in doc and doc["bbox"] is not None:
        b = doc["bbox"]
        bbox = BoundingBox(x0=float(b["x0"]), y0=float(b["y0"]),
                           h=float(b["h"]), w=float(b["w"]))
    width = doc.get("imageWidth")
    return (None if yaw is None else float(yaw)), bbox, \
        (None if width is None else int(width))


def discover_pairs(input_dir):
    """(id, image, posmap, meta) tuples, sorted by id; orphans to stderr."""
    entries = sorted(os.listdir(input_dir))
    stems = {}
    for name in entries:
        stem, ext = os.path.splitext(name)
        if ext == ".npy" and not stem.endswith(".mask"):
            stems.setdefault(stem, {})["posmap"] = os.path.join(input_dir, name)
        elif ext.lower() in IMAGE_EXTENSIONS:
            stems.setdefault(stem, {})["image"] = os.path.join(input_dir, name)
    pairs = []
    for stem in sorted(stems):
        have = stems[stem]
        if "posmap" in have and "image" in have:
            meta = os.path.join(input_dir, stem + ".meta.json")
            pairs.append((stem, have["image"], have["posmap"],
                          meta if os.path.exists(meta) else None))
        else:
            missing = "image" if "posmap" in have else "position map"
            print(f"warning: {stem}: missing {missing}, skipped",
                  file=sys.stderr)
    return pairs


def _record_json(record, out_dir, lmk68, lmk520, posmap_path):
    def rel(p):
        return os.path.relpath(p, out_dir)

    return {
        "id": record.id,
        "image": rel(record.image_path),
        "posmap": rel(posmap_path),
        "yaw": record.yaw,
        "flipped": record.flipped,
        "lmk68": rel(lmk68),
        "lmk520": rel(lmk520),
        "bbox": None if record.bbox is None else
        [record.bbox.x0, record.bbox.y0, record.bbox.h, record.bbox.w],
    }


def build_dataset(input_dir, keys520, mesh, keys68, out_dir, augment=False,
                  image_width=None, bins=((0.0, 30.0), (30.0, 60.0),
                                          (60.0, 90.0))):
    """Build landmark files and manifest.jsonl from an input directory.

    The flip reflection needs the image's pixel width; per sample it comes
    from meta "imageWidth", else the ``image_width`` argument, else the
    position-map width (right for maps whose x,y live on the map's own
    grid). Returns the manifest path.
    """
    pairs = discover_pairs(input_dir)
    if not pairs:
        raise EmptyDatasetError(f"no image/position-map pairs in {input_dir}")
    os.makedirs(out_dir, exist_ok=True)

    rows = []
    bin_counts = [0] * len(bins)
    null_yaw = 0
    for stem, image, posmap, meta in pairs:
        yaw, bbox, meta_width = _read_meta(meta) if meta \
            else (None, None, None)
        record = ingest_sample(image, posmap, yaw, mesh, keys520, keys68,
                               sample_id=stem, bbox=bbox)
        variants = [record]
        if augment:
            width = meta_width if meta_width is not None else (
                image_width if image_width is not None
                else record.posmap.width)
            variants.append(flip_sample(record, width, keys520, keys68))
        for rec in variants:
            lmk68 = os.path.join(out_dir, rec.id + ".lmk68.npy")
            lmk520 = os.path.join(out_dir, rec.id + ".lmk520.npy")
            npyio.save_landmarks(lmk68, rec.landmarks68.points)
            npyio.save_landmarks(lmk520, rec.landmarks520.points)
            if rec.flipped:
                pm_path = os.path.join(out_dir, rec.id + ".npy")
                npyio.save_position_map(pm_path, rec.posmap)
            else:
                pm_path = rec.posmap_path
            rows.append(_record_json(rec, out_dir, lmk68, lmk520, pm_path))
            if rec.yaw is None:
                null_yaw += 1
            else:
                for b, (lo, hi) in enumerate(bins):
                    ay = abs(rec.yaw)
                    if lo <= ay < hi or (b == len(bins) - 1 and ay == hi):
                        bin_counts[b] += 1
                        break

    rows.sort(key=lambda r: r["id"])
    manifest = os.path.join(out_dir, "manifest.jsonl")
    with open(manifest, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    meta_doc = {
        "keypointSetVersion": str(keys520.version),
        "records": len(rows),
        "stats": {
            "yawBins": [{"lo": lo, "hi": hi, "count": c}
                        for (lo, hi), c in zip(bins, bin_counts)],
            "nullYaw": null_yaw,
        },
    }
    with open(os.path.join(out_dir, "manifest.meta.json"), "w",
              encoding="utf-8") as fh:
        json.dump(meta_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_manifest(path):
    """Manifest records as dicts, in file order."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{line_no}: bad manifest line: "
                                 f"{exc}") from exc
    return records
