"""
Geometry Core Module

Dimension-generic vectors, hyperplanes, halfspaces and similarity
transformations x -> scale * rotation @ x + translation, with the fixed-point
algebra the tiling constructions are built on.

Vectors are plain float64 numpy arrays checked by `as_vector`; every other
type is an immutable value.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import scipy.linalg
import structlog

from simtile.config import DEFAULT_TOLERANCE, ORTHOGONALITY_TOLERANCE, UNIT_TOLERANCE
from simtile.errors import (
    DimensionMismatch,
    InvalidGeometry,
    NoUniqueFixedPoint,
    NotFoundWithinBudget,
    NumericalFailure,
    PreconditionError,
)

logger = structlog.get_logger(__name__)

ArrayLike = Union[Sequence[float], np.ndarray]

# Compositions between two polar re-orthonormalizations of the rotation part
REORTHONORMALIZE_EVERY = 64

# Relative singular value below which (I - scale * rotation) counts as singular
SINGULAR_RATIO = 1e-12

# Allowed |f(x) - x| per unit of (1 + |x|) at a computed fixed point
FIXED_POINT_RESIDUAL = 1e-9


def as_vector(coords: ArrayLike, dim: Optional[int] = None) -> np.ndarray:
    """
    Convert coordinates to a validated vector

    Args:
        coords: Sequence of real coordinates
        dim: Expected dimension, if known

    Returns:
        1-D float64 array with finite entries
    """
    vec = np.array(coords, dtype=np.float64).reshape(-1)
    if vec.size < 1:
        raise InvalidGeometry("a vector needs at least one coordinate")
    if not np.all(np.isfinite(vec)):
        raise InvalidGeometry(f"vector has non-finite coordinates: {vec.tolist()}")
    if dim is not None and vec.size != dim:
        raise DimensionMismatch(f"expected a {dim}-vector, got {vec.size} coordinates")
    return vec


def as_points(points: ArrayLike, dim: int) -> np.ndarray:
    """Return points as a (m, dim) float64 array; a single point becomes m = 1."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatch(f"expected points of dimension {dim}, got shape {arr.shape}")
    return arr


def plain(values: ArrayLike) -> Any:
    """Nested lists of floats with negative zeros normalized, for documents."""
    return (np.asarray(values, dtype=np.float64) + 0.0).tolist()


def basis_vector(dim: int, index: int) -> np.ndarray:
    """Standard basis vector e_{index} (0-based) of R^dim."""
    vec = np.zeros(dim)
    vec[index] = 1.0
    return vec


def nested_close(a: Any, b: Any, tol: float = 1e-12) -> bool:
    """
    Compare two nested dict/list documents, numbers within an absolute tolerance

    Args:
        a: First document
        b: Second document
        tol: Absolute tolerance for numeric leaves

    Returns:
        True if both documents have the same structure and close numbers
    """
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(nested_close(a[k], b[k], tol) for k in a)
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(nested_close(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(float(a) - float(b)) <= tol
    return a == b


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The set {x : normal . x = offset} with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = as_vector(self.normal)
        if abs(np.linalg.norm(normal) - 1.0) > UNIT_TOLERANCE:
            raise InvalidGeometry(f"normal must have unit length, got norm {np.linalg.norm(normal)!r}")
        if not np.isfinite(self.offset):
            raise InvalidGeometry("offset must be finite")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal: ArrayLike, offset: float) -> "Hyperplane":
        """Build from an arbitrary nonzero normal, rescaling normal and offset together."""
        normal = as_vector(normal)
        norm = np.linalg.norm(normal)
        if norm == 0.0:
            raise InvalidGeometry("normal must be nonzero")
        return cls(normal / norm, float(offset) / norm)

    @property
    def dim(self) -> int:
        return int(self.normal.size)

    def signed_distance(self, points: ArrayLike) -> np.ndarray:
        """normal . x - offset for each point."""
        return as_points(points, self.dim) @ self.normal - self.offset

    def project(self, point: ArrayLike) -> np.ndarray:
        point = as_vector(point, self.dim)
        return point - (point @ self.normal - self.offset) * self.normal

    def to_dict(self) -> Dict[str, Any]:
        return {"normal": plain(self.normal), "offset": self.offset + 0.0}


@dataclass(frozen=True, eq=False)
class Halfspace(Hyperplane):
    """The set {x : normal . x <= offset} with a unit normal."""

    def contains(self, points: ArrayLike, tol: float = DEFAULT_TOLERANCE) -> np.ndarray:
        return self.signed_distance(points) <= tol

    @property
    def boundary(self) -> Hyperplane:
        return Hyperplane(self.normal, self.offset)


def _check_orthogonal(matrix: np.ndarray) -> None:
    gram = matrix.T @ matrix
    drift = np.max(np.abs(gram - np.eye(matrix.shape[0])))
    if drift > ORTHOGONALITY_TOLERANCE:
        raise InvalidGeometry(f"rotation is not orthogonal (max |R^T R - I| = {drift:.3e})")


@dataclass(frozen=True, eq=False)
class Similarity:
    """
    Similarity transformation x -> scale * rotation @ x + translation

    `rotation` is any orthogonal matrix (reflections included). `depth` counts
    compositions since the rotation part was last re-orthonormalized.
    """

    scale: float
    rotation: np.ndarray
    translation: np.ndarray
    depth: int = field(default=0, compare=False)

    def __post_init__(self):
        scale = float(self.scale)
        if not np.isfinite(scale) or scale <= 0.0:
            raise InvalidGeometry(f"similarity scale must be positive, got {self.scale!r}")
        translation = as_vector(self.translation)
        rotation = np.array(self.rotation, dtype=np.float64)
        if rotation.shape != (translation.size, translation.size):
            raise DimensionMismatch(
                f"rotation shape {rotation.shape} does not match translation dimension {translation.size}"
            )
        if not np.all(np.isfinite(rotation)):
            raise InvalidGeometry("rotation has non-finite entries")
        _check_orthogonal(rotation)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls, dim: int) -> "Similarity":
        return cls(1.0, np.eye(dim), np.zeros(dim))

    @classmethod
    def homothety(cls, scale: float, center: ArrayLike) -> "Similarity":
        """x -> scale * (x - center) + center."""
        center = as_vector(center)
        return cls(scale, np.eye(center.size), (1.0 - float(scale)) * center)

    @classmethod
    def about(cls, scale: float, rotation: ArrayLike, center: ArrayLike) -> "Similarity":
        """x -> scale * rotation @ (x - center) + center, fixing `center`."""
        center = as_vector(center)
        rotation = np.asarray(rotation, dtype=np.float64)
        return cls(scale, rotation, center - float(scale) * (rotation @ center))

    @property
    def dim(self) -> int:
        return int(self.translation.size)

    @property
    def linear(self) -> np.ndarray:
        return self.scale * self.rotation

    @property
    def is_homothety(self) -> bool:
        return bool(np.max(np.abs(self.rotation - np.eye(self.dim))) <= ORTHOGONALITY_TOLERANCE)

    def apply(self, points: ArrayLike) -> np.ndarray:
        """Map a point (shape (n,)) or a point array (shape (m, n))."""
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            return self.linear @ as_vector(arr, self.dim) + self.translation
        return as_points(arr, self.dim) @ self.linear.T + self.translation

    __call__ = apply

    def apply_inverse(self, points: ArrayLike) -> np.ndarray:
        """Map through the inverse without building it."""
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            return self.rotation.T @ (as_vector(arr, self.dim) - self.translation) / self.scale
        return (as_points(arr, self.dim) - self.translation) @ self.rotation / self.scale

    def to_dict(self) -> Dict[str, Any]:
        """Serialize; an exact identity rotation is abbreviated as "I"."""
        rotation: Any = "I" if np.array_equal(self.rotation, np.eye(self.dim)) else plain(self.rotation)
        return {"scale": self.scale, "rotation": rotation, "translation": plain(self.translation)}


def _check_same_dim(*dims: int) -> None:
    if len(set(dims)) > 1:
        raise DimensionMismatch(f"dimension mismatch: {dims}")


def compose(f: Similarity, g: Similarity) -> Similarity:
    """
    Compose two similarities

    Args:
        f: Outer map
        g: Inner map

    Returns:
        The similarity f o g (apply g first)
    """
    _check_same_dim(f.dim, g.dim)
    rotation = f.rotation @ g.rotation
    depth = f.depth + g.depth + 1
    if depth >= REORTHONORMALIZE_EVERY:
        rotation, _ = scipy.linalg.polar(rotation)
        depth = 0
    return Similarity(
        scale=f.scale * g.scale,
        rotation=rotation,
        translation=f.scale * (f.rotation @ g.translation) + f.translation,
        depth=depth,
    )


def invert(f: Similarity) -> Similarity:
    """Inverse similarity: scale 1/s, rotation R^T, translation -R^T t / s."""
    return Similarity(
        scale=1.0 / f.scale,
        rotation=f.rotation.T,
        translation=-(f.rotation.T @ f.translation) / f.scale,
        depth=f.depth,
    )


def power(f: Similarity, exponent: int) -> Similarity:
    """f composed with itself `exponent` times (exponent >= 0)."""
    if exponent < 0:
        return power(invert(f), -exponent)
    result = Similarity.identity(f.dim)
    for _ in range(exponent):
        result = compose(result, f)
    return result


def fixed_point_condition(f: Similarity) -> float:
    """Condition number of I - scale * rotation (inf when singular)."""
    sigma = np.linalg.svd(np.eye(f.dim) - f.linear, compute_uv=False)
    if sigma[-1] == 0.0:
        return float("inf")
    return float(sigma[0] / sigma[-1])


def fixed_point(f: Similarity) -> np.ndarray:
    """
    Unique fixed point of a similarity

    Solves (I - scale * rotation) x = translation by LU with partial pivoting.

    Args:
        f: The similarity

    Returns:
        The point x with f(x) = x

    Raises:
        NoUniqueFixedPoint: if the system is singular (translations, isometries
            with an invariant direction)
        NumericalFailure: if the solution misses the residual bound
    """
    system = np.eye(f.dim) - f.linear
    sigma = np.linalg.svd(system, compute_uv=False)
    if sigma[0] == 0.0 or sigma[-1] < SINGULAR_RATIO * sigma[0]:
        raise NoUniqueFixedPoint(
            f"similarity with scale {f.scale} has no unique fixed point "
            f"(singular values {sigma.min():.3e}..{sigma.max():.3e})"
        )
    point = np.linalg.solve(system, f.translation)
    check_fixed_point(f, point)
    logger.debug("fixed_point", condition=float(sigma[0] / sigma[-1]))
    return point


def check_fixed_point(f: Similarity, point: np.ndarray) -> float:
    """
    Residual |f(x) - x| of a candidate fixed point

    Raises:
        NumericalFailure: if the residual exceeds 1e-9 * (1 + |x|)
    """
    residual = float(np.linalg.norm(f.apply(point) - point))
    if residual > FIXED_POINT_RESIDUAL * (1.0 + float(np.linalg.norm(point))):
        raise NumericalFailure(f"fixed point residual {residual:.3e} at |x| = {np.linalg.norm(point):.3e}")
    return residual


def power_near_identity(rotation: ArrayLike, delta: float, k_max: int) -> int:
    """
    Smallest power of an orthogonal matrix that is close to the identity

    Args:
        rotation: Orthogonal matrix M
        delta: Entrywise tolerance, ||M^k - I||_max < delta
        k_max: Largest power to try

    Returns:
        The smallest k in 1..k_max meeting the bound

    Raises:
        NotFoundWithinBudget: if no k <= k_max qualifies
    """
    matrix = np.asarray(rotation, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"rotation must be square, got shape {matrix.shape}")
    _check_orthogonal(matrix)
    if delta <= 0 or k_max < 1:
        raise PreconditionError("power_near_identity needs delta > 0 and k_max >= 1")
    identity = np.eye(matrix.shape[0])
    current = identity.copy()
    for k in range(1, k_max + 1):
        current = current @ matrix
        if k % REORTHONORMALIZE_EVERY == 0:
            current, _ = scipy.linalg.polar(current)
        if np.max(np.abs(current - identity)) < delta:
            return k
    raise NotFoundWithinBudget(f"no power k <= {k_max} with ||M^k - I|| < {delta}", budget=k_max)


def rotation_2d(angle: float) -> np.ndarray:
    """Counter-clockwise rotation of the plane by `angle` radians."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def similarity_close(f: Similarity, g: Similarity, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Parameter-wise comparison of two similarities."""
    return (
        f.dim == g.dim
        and abs(f.scale - g.scale) <= tol
        and bool(np.max(np.abs(f.rotation - g.rotation)) <= tol)
        and bool(np.max(np.abs(f.translation - g.translation)) <= tol)
    )
