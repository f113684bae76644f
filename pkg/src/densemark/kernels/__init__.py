"""Kernel backend dispatch.

Two interchangeable backends implement the hot loops: ``pure`` (numpy) and
``fast`` (Cython extension, built at install time when a compiler is
available). Selection happens once at import:

  DENSEMARK_BACKEND=auto   compiled if present, else pure (default)
  DENSEMARK_BACKEND=fast   require the compiled extension
  DENSEMARK_BACKEND=pure   force numpy

The algebraic kernels return bit-identical results on both backends, so the
choice never changes sampling output. ``benchmarks/bench_kernels.py``
compares their throughput.
"""

import importlib
import os

from . import pure

_REQUESTED = os.environ.get("DENSEMARK_BACKEND", "auto").lower()
if _REQUESTED not in ("auto", "fast", "pure"):
    raise ImportError(f"DENSEMARK_BACKEND must be auto, fast or pure, "
                      f"got {_REQUESTED!r}")


def _import_fast():
    return importlib.import_module("densemark.kernels._fast")


_impl = pure
if _REQUESTED in ("auto", "fast"):
    try:
        _impl = _import_fast()
    except ImportError:
        if _REQUESTED == "fast":
            raise ImportError(
                "DENSEMARK_BACKEND=fast but the compiled extension is not "
                "available; reinstall with a C toolchain or use pure")

BACKEND = _impl.NAME

incircle_dets = _impl.incircle_dets
orient_dets = _impl.orient_dets
nearest_vertices = _impl.nearest_vertices
wing_values = _impl.wing_values
wing_grads = _impl.wing_grads


def available_backends():
    """Names of backends importable in this installation."""
    names = ["pure"]
    try:
        _import_fast()
        names.append("fast")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Fetch a backend module by name (for benchmarks and equivalence tests)."""
    if name == "pure":
        return pure
    if name == "fast":
        return _import_fast()
    raise ValueError(f"unknown backend {name!r}")
