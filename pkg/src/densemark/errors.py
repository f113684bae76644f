"""Exception hierarchy. Every densemark-raised error derives from DensemarkError."""


class DensemarkError(Exception):
    """Base class; CLI maps these to exit code 1."""


class DomainError(DensemarkError):
    """Input outside an operation's documented domain."""


class MaskedLookupError(DomainError):
    """Position-map lookup hit a pixel marked non-face by the validity mask."""


class DegenerateBoxError(DomainError):
    """Landmark bounding box collapsed to zero height or width."""


class GeometryError(DensemarkError):
    """Triangulation input is unusable: too few points, collinear, or duplicated."""


class ShapeError(DensemarkError):
    """Array shape or landmark-schema mismatch."""


class ParseError(DensemarkError):
    """A file could not be parsed (NPY, OBJ, JSON)."""


class ValidationError(DensemarkError):
    """A keypoint-set invariant was violated. `invariant` names which one."""

    def __init__(self, message, invariant=None):
        super().__init__(message)
        self.invariant = invariant or message


class StaleVersionError(ValidationError):
    """Optimistic-concurrency failure: the stored set moved on since the client read it."""


class EmptyDatasetError(DensemarkError):
    """Dataset build found no usable image/position-map pairs."""


class DivergenceError(DensemarkError):
    """Training loss exceeded the divergence ceiling."""

    def __init__(self, message, lr=None):
        super().__init__(message)
        self.lr = lr
