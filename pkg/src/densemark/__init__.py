"""densemark: dense 3D facial-landmark ground-truth tooling.

Subpackages/modules map onto the pipeline: geom (types + UV lookups),
delaunay + sampler (keypoint derivation), dataset (manifest builds with
flip augmentation), losses + trainer (wing/hybrid kernels and their
desk-scale verification), evaluator (NME/CED/AUC + tables), cli + server
(entry points), kernels (pure/compiled backend dispatch).
"""

__version__ = "0.1.0"

from .errors import DensemarkError  # noqa: F401
