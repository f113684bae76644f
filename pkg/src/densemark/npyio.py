"""NPY file I/O for position maps and landmark tensors.

On disk everything is NPY v1.0 with little-endian float32 payloads:
position maps are (H, W, 3), landmark files (N, 3). A position map's
validity mask, when present, lives in a sibling ``<stem>.mask.npy`` holding
uint8 (nonzero = valid face pixel).
"""

import os

import numpy as np

from .errors import ParseError, ShapeError
from .geom import UVPositionMap


def _load_npy(path):
    try:
        return np.load(path, allow_pickle=False)
    except FileNotFoundError as exc:
        raise ParseError(f"file not found: {path}") from exc
    except (ValueError, OSError, EOFError) as exc:
        raise ParseError(f"malformed NPY file {path}: {exc}") from exc


def _save_npy(path, arr):
    np.save(path, np.ascontiguousarray(arr, dtype="<f4"))


def _as_float32(arr, path):
    if arr.dtype.kind != "f":
        raise ParseError(f"{path}: expected float data, got dtype {arr.dtype}")
    return arr.astype("<f4", copy=False)


def mask_path_for(posmap_path):
    stem, ext = os.path.splitext(str(posmap_path))
    return stem + ".mask" + ext


def load_position_map(path, mask_path=None):
    """Read a (H,W,3) position map, picking up a sibling mask if present."""
    arr = _as_float32(_load_npy(path), path)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"{path}: position map must be (H,W,3), "
                         f"got {arr.shape}")
    if mask_path is None:
        candidate = mask_path_for(path)
        mask_path = candidate if os.path.exists(candidate) else None
    mask = None
    if mask_path is not None:
        mask = _load_npy(mask_path).astype(bool)
    return UVPositionMap(arr, mask)


def save_position_map(path, pmap):
    _save_npy(path, pmap.data)
    if pmap.mask is not None:
        np.save(mask_path_for(path), pmap.mask.astype(np.uint8))


def load_landmarks(path, expected_n=None):
    """Read a (N,3) float32 landmark tensor as float64."""
    arr = _as_float32(_load_npy(path), path)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ShapeError(f"{path}: landmarks must be (N,3), got {arr.shape}")
    if expected_n is not None and arr.shape[0] != expected_n:
        raise ShapeError(f"{path}: expected {expected_n} landmarks, "
                         f"got {arr.shape[0]}")
    return arr.astype(np.float64)


def save_landmarks(path, points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ShapeError(f"landmarks must be (N,3), got {pts.shape}")
    _save_npy(path, pts)
