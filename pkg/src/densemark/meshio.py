"""Template mesh loading: OBJ with per-vertex texture coordinates, an NPY
pair (vertices, uvs), or the built-in reference template.

Accepted --template forms:
  mesh.obj                      OBJ; requires one vt per v, in order
  vertices.npy,uvs.npy          explicit NPY pair
  some/dir                      directory holding vertices.npy + uvs.npy
  reference                     the deterministic built-in template
"""

import os

import numpy as np

from .errors import DomainError, ParseError
from .geom import TemplateMesh
from .npyio import _load_npy


def load_obj(path):
    vertices, uvs = [], []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "v":
                    if len(parts) < 4:
                        raise ParseError(f"{path}:{line_no}: short v line")
                    vertices.append([float(x) for x in parts[1:4]])
                elif parts[0] == "vt":
                    if len(parts) < 3:
                        raise ParseError(f"{path}:{line_no}: short vt line")
                    uvs.append([float(parts[1]), float(parts[2])])
    except OSError as exc:
        raise ParseError(f"cannot read OBJ {path}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"bad number in OBJ {path}: {exc}") from exc
    if not vertices:
        raise ParseError(f"{path}: no vertices found")
    if len(uvs) != len(vertices):
        raise ParseError(
            f"{path}: need one vt per v in order ({len(vertices)} v, "
            f"{len(uvs)} vt); re-export with per-vertex texture coordinates")
    return TemplateMesh(np.asarray(vertices, dtype=np.float64),
                        np.asarray(uvs, dtype=np.float64))


def load_npy_pair(vertices_path, uvs_path):
    return TemplateMesh(
        np.asarray(_load_npy(vertices_path), dtype=np.float64),
        np.asarray(_load_npy(uvs_path), dtype=np.float64))


def save_obj(path, mesh):
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, z in mesh.vertices:
            fh.write(f"v {x!r} {y!r} {z!r}\n")
        for u, v in mesh.uv:
            fh.write(f"vt {u!r} {v!r}\n")


def load_template(spec):
    """Resolve a --template argument to a TemplateMesh."""
    spec = str(spec)
    if spec == "reference":
        from .template import reference_template
        return reference_template()
    if "," in spec:
        vpath, upath = (s.strip() for s in spec.split(",", 1))
        return load_npy_pair(vpath, upath)
    if os.path.isdir(spec):
        return load_npy_pair(os.path.join(spec, "vertices.npy"),
                             os.path.join(spec, "uvs.npy"))
    if spec.endswith(".obj"):
        if not os.path.exists(spec):
            raise DomainError(f"template file not found: {spec}")
        return load_obj(spec)
    raise DomainError(f"cannot interpret template {spec!r}: expected an "
                      f".obj file, 'vertices.npy,uvs.npy', a directory, "
                      f"or 'reference'")
