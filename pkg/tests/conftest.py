import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))  # make oracles importable

from densemark.geom import KeypointSet, TemplateMesh, UVPositionMap
from densemark.template import (reference_keypoint_set, reference_landmarks68,
                                reference_template)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(*parts):
    return os.path.join(DATA_DIR, *parts)


@pytest.fixture(scope="session")
def ref_mesh():
    return reference_template()


@pytest.fixture(scope="session")
def ref_landmarks68():
    return reference_landmarks68()


@pytest.fixture(scope="session")
def ref_keys520(ref_mesh):
    return reference_keypoint_set(target=520)


@pytest.fixture(scope="session")
def frozen_sampling():
    with open(data_path("reference_sampling.json")) as fh:
        return json.load(fh)


@pytest.fixture
def small_mesh():
    """3x3 UV lattice mesh, 9 vertices, positions on a 0..255 pixel frame."""
    uv = np.array([[u, v] for v in (0.0, 0.5, 1.0) for u in (0.0, 0.5, 1.0)])
    verts = np.column_stack([uv[:, 0] * 255.0, uv[:, 1] * 255.0,
                             np.zeros(len(uv))])
    return TemplateMesh(verts, uv)


def grid_quantize(arr):
    """Snap float data to the 1/256 pixel grid (keeps flips bit-exact)."""
    return np.round(np.asarray(arr, dtype=np.float64) * 256.0) / 256.0


def make_posmap(h=8, w=8, seed=0, masked=()):
    """Random grid-quantized position map; ``masked`` pixels marked invalid."""
    rng = np.random.default_rng(seed)
    data = grid_quantize(rng.uniform(0.0, 255.0, size=(h, w, 3)))
    mask = None
    if masked:
        mask = np.ones((h, w), dtype=bool)
        for r, c in masked:
            mask[r, c] = False
    return UVPositionMap(data.astype(np.float32), mask)


def constant_posmap(h, w, triple):
    data = np.broadcast_to(np.asarray(triple, dtype=np.float32),
                           (h, w, 3)).copy()
    return UVPositionMap(data)


def ramp_posmap(h, w):
    """data[r][c] == (c, r, 0)."""
    cols = np.tile(np.arange(w, dtype=np.float32), (h, 1))
    rows = np.tile(np.arange(h, dtype=np.float32)[:, None], (1, w))
    return UVPositionMap(np.stack([cols, rows, np.zeros((h, w),
                                                        dtype=np.float32)],
                                  axis=2))


def keyset(indices, vertex_count, mirror=None, provenance=None):
    return KeypointSet(indices=np.asarray(indices, dtype=np.int64),
                       mirror=mirror, provenance=provenance,
                       template_vertex_count=vertex_count)
