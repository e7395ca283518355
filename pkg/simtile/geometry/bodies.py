"""
Bodies Module

Convex bodies given by constraint oracles: polytopes in halfspace form, the
cone-spindle family, similarity images, and the two derived variants produced
by the tiling calculus (intersections and hyperplane sections).

Every body is the set {x : g_j(x) <= 0 for all j}. `constraint_values`
evaluates the g_j, so membership, sampling and the meet all share one code
path.
"""

from abc import ABC, abstractmethod
from enum import IntEnum
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, HalfspaceIntersection

from simtile.config import CHUNK_SIZE, DEFAULT_INTERIOR_SAMPLES, DEFAULT_TOLERANCE
from simtile.errors import DimensionMismatch, InvalidGeometry, PreconditionError
from simtile.geometry.charts import SliceChart
from simtile.geometry.core import (
    ArrayLike,
    Halfspace,
    Similarity,
    as_points,
    as_vector,
    basis_vector,
    nested_close,
)
from simtile.geometry.sampling import (
    INTERIOR_STREAM,
    SUPPORT_STREAM,
    VOLUME_STREAM,
    map_chunks,
    quasi_uniform_directions,
    stream,
    sum_counts,
    uniform_box,
)

logger = structlog.get_logger(__name__)

# Brute-force vertex enumeration limits
VERTEX_DIM_LIMIT = 6
VERTEX_COMBINATION_LIMIT = 200_000

# Smallest Chebyshev radius of a body with nonempty interior
MIN_INRADIUS = 1e-9

# Relative change of the cluster count under direction doubling that still counts as saturated
SATURATION_CHANGE = 0.05

# Deterministic seed for internal oracle searches
ORACLE_SEED = 0


class Location(IntEnum):
    """Position of a point relative to a body."""

    INSIDE = -1
    BOUNDARY = 0
    OUTSIDE = 1

    def __str__(self) -> str:
        return self.name.lower()


class VolumeEstimate(BaseModel):
    """Hit-or-miss volume with its binomial standard error."""

    value: float
    std_error: float
    samples: int


class ExtremalEstimate(BaseModel):
    """Support-witness cluster counts under direction refinement."""

    directions_sampled: int
    clusters: int
    refined_clusters: int
    saturated: bool
    delta: float = Field(gt=0)


def _classify(violation: np.ndarray, tol: float) -> np.ndarray:
    return np.where(violation < -tol, Location.INSIDE, np.where(violation > tol, Location.OUTSIDE, Location.BOUNDARY))


class Body(ABC):
    """Compact convex set with nonempty interior, described by constraint functions."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    @abstractmethod
    def constraint_values(self, points: np.ndarray) -> np.ndarray:
        """(m, k) constraint values g_j(x); the body is where all are <= 0."""

    @abstractmethod
    def support(self, direction: np.ndarray) -> Tuple[float, np.ndarray]:
        """max over the body of direction . x, with a maximizer."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Serializable tagged document."""

    def violation(self, points: ArrayLike) -> np.ndarray:
        """Largest constraint value per point (negative inside)."""
        return self.constraint_values(as_points(points, self.dim)).max(axis=1)

    def classify(self, points: ArrayLike, tol: float = DEFAULT_TOLERANCE) -> np.ndarray:
        """Location code per point."""
        return _classify(self.violation(points), tol)

    def contains(self, points: ArrayLike, tol: float = DEFAULT_TOLERANCE) -> np.ndarray:
        """Closed membership (Inside or Boundary) per point."""
        return self.violation(points) <= tol

    def support_many(self, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        values = np.empty(len(directions))
        witnesses = np.empty((len(directions), self.dim))
        for row, direction in enumerate(directions):
            values[row], witnesses[row] = self.support(direction)
        return values, witnesses

    @cached_property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box (lo, hi) containing the body."""
        eye = np.eye(self.dim)
        hi = np.array([self.support(eye[i])[0] for i in range(self.dim)])
        lo = np.array([-self.support(-eye[i])[0] for i in range(self.dim)])
        return lo, hi

    @cached_property
    def interior_point(self) -> np.ndarray:
        return find_interior_point(self)[0]

    def farthest_distance(self, center: np.ndarray) -> float:
        """Largest distance from `center` to a point of the body."""
        polytope = to_polytope(self)
        if polytope is not None:
            return polytope.farthest_distance(center)
        return _oracle_farthest_distance(self, center)

    def polytope_form(self) -> Optional["Polytope"]:
        """Exact halfspace representation, when the body is a polytope."""
        return None

    @cached_property
    def _feasible_cloud(self) -> np.ndarray:
        lo, hi = self.bounding_box
        points = uniform_box(stream(ORACLE_SEED, INTERIOR_STREAM), lo, hi, DEFAULT_INTERIOR_SAMPLES)
        return points[self.violation(points) <= 0.0]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class Polytope(Body):
    """
    Bounded polytope {x : A x <= b} with unit-length rows of A

    Construction checks a positive Chebyshev radius (nonempty interior) and
    a finite support in every coordinate direction (boundedness).
    """

    def __init__(self, halfspaces: Sequence[Halfspace], validate: bool = True):
        if not halfspaces:
            raise InvalidGeometry("a polytope needs at least one halfspace")
        dims = {h.dim for h in halfspaces}
        if len(dims) != 1:
            raise DimensionMismatch(f"halfspaces of mixed dimensions {sorted(dims)}")
        A = np.array([h.normal for h in halfspaces])
        b = np.array([h.offset for h in halfspaces])
        self._init_arrays(A, b, validate)

    @classmethod
    def from_arrays(cls, A: ArrayLike, b: ArrayLike, validate: bool = True) -> "Polytope":
        """Build from an arbitrary system A x <= b; rows are rescaled to unit normals."""
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        b = np.asarray(b, dtype=np.float64).reshape(-1)
        if A.shape[0] != b.size:
            raise DimensionMismatch(f"{A.shape[0]} normals but {b.size} offsets")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0.0):
            raise InvalidGeometry("one of the rows of A is a zero vector")
        polytope = cls.__new__(cls)
        polytope._init_arrays(A / norms[:, None], b / norms, validate)
        return polytope

    @classmethod
    def box(cls, lo: ArrayLike, hi: ArrayLike) -> "Polytope":
        lo, hi = as_vector(lo), as_vector(hi)
        if lo.size != hi.size:
            raise DimensionMismatch("box corners differ in dimension")
        eye = np.eye(lo.size)
        return cls.from_arrays(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))

    @classmethod
    def from_vertices(cls, points: ArrayLike) -> "Polytope":
        """Convex hull of a point cloud in halfspace form."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if points.shape[1] == 1:
            return cls.box(points.min(axis=0), points.max(axis=0))
        try:
            hull = ConvexHull(points)
        except Exception as exc:
            raise InvalidGeometry(f"points do not span a full-dimensional hull: {exc}") from exc
        # Triangulated facets repeat their plane
        equations = np.unique(np.round(hull.equations, 12), axis=0)
        return cls.from_arrays(equations[:, :-1], -equations[:, -1])

    def _init_arrays(self, A: np.ndarray, b: np.ndarray, validate: bool) -> None:
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidGeometry("halfspace data must be finite")
        self.A = A
        self.b = b
        self.A.setflags(write=False)
        self.b.setflags(write=False)
        if validate:
            center, radius = self.chebyshev_ball()
            if center is None or radius <= MIN_INRADIUS:
                raise InvalidGeometry("polytope has empty interior")
            self._check_bounded()

    @property
    def dim(self) -> int:
        return int(self.A.shape[1])

    @property
    def halfspaces(self) -> List[Halfspace]:
        return [Halfspace(normal, offset) for normal, offset in zip(self.A, self.b)]

    def constraint_values(self, points: np.ndarray) -> np.ndarray:
        return points @ self.A.T - self.b

    def chebyshev_ball(self) -> Tuple[Optional[np.ndarray], float]:
        """
        Largest inscribed ball

        Returns:
            (center, radius); center is None when the system is infeasible
        """
        if getattr(self, "_cheby", None) is not None:
            return self._cheby
        n = self.dim
        cost = np.zeros(n + 1)
        cost[-1] = -1.0
        G = np.hstack([self.A, np.ones((self.A.shape[0], 1))])
        result = linprog(cost, A_ub=G, b_ub=self.b, bounds=[(None, None)] * n + [(0, None)], method="highs")
        if result.status == 3:
            raise InvalidGeometry("polytope is unbounded")
        if result.status != 0:
            self._cheby = (None, 0.0)
        else:
            self._cheby = (result.x[:n], float(result.x[-1]))
        return self._cheby

    def _check_bounded(self) -> None:
        for direction in np.vstack([np.eye(self.dim), -np.eye(self.dim)]):
            result = linprog(-direction, A_ub=self.A, b_ub=self.b, bounds=[(None, None)] * self.dim, method="highs")
            if result.status == 3:
                raise InvalidGeometry(f"polytope is unbounded in direction {direction.tolist()}")

    @cached_property
    def interior_point(self) -> np.ndarray:
        center, _ = self.chebyshev_ball()
        if center is None:
            raise InvalidGeometry("polytope is empty")
        return center

    @cached_property
    def vertices(self) -> np.ndarray:
        """Vertex set, deduplicated within 1e-9."""
        m, n = self.A.shape
        if n == 1 or (n <= VERTEX_DIM_LIMIT and comb(m, n) <= VERTEX_COMBINATION_LIMIT):
            candidates = self._brute_force_vertices()
        else:
            halfspaces = np.hstack([self.A, -self.b[:, None]])
            candidates = HalfspaceIntersection(halfspaces, self.interior_point).intersections
        return _dedupe_points(candidates, 1e-9)

    def _brute_force_vertices(self) -> np.ndarray:
        m, n = self.A.shape
        index = np.array(list(combinations(range(m), n)), dtype=np.intp).reshape(-1, n)
        matrices = self.A[index]
        regular = np.abs(np.linalg.det(matrices)) > 1e-12
        matrices, index = matrices[regular], index[regular]
        if len(index) == 0:
            return np.empty((0, n))
        points = np.linalg.solve(matrices, self.b[index][..., None])[..., 0]
        slack = 1e-9 * (1.0 + np.abs(self.b))
        feasible = np.all(points @ self.A.T <= self.b + slack, axis=1)
        return points[feasible]

    def support(self, direction: np.ndarray) -> Tuple[float, np.ndarray]:
        if self.dim <= VERTEX_DIM_LIMIT:
            values = self.vertices @ direction
            best = int(np.argmax(values))
            return float(values[best]), self.vertices[best].copy()
        result = linprog(-direction, A_ub=self.A, b_ub=self.b, bounds=[(None, None)] * self.dim, method="highs")
        return float(-result.fun), result.x

    def support_many(self, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.dim > VERTEX_DIM_LIMIT:
            return super().support_many(directions)
        values = directions @ self.vertices.T
        best = np.argmax(values, axis=1)
        return values[np.arange(len(directions)), best], self.vertices[best]

    @cached_property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return _polytope_box(self)

    def farthest_distance(self, center: np.ndarray) -> float:
        return float(np.max(np.linalg.norm(self.vertices - center, axis=1)))

    def polytope_form(self) -> "Polytope":
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "polytope", "halfspaces": [h.to_dict() for h in self.halfspaces]}


class ConeSpindle(Body):
    """
    {x : sqrt(x1^2 + x2^2) + sum_{i>=3} x_i <= 1, x_i >= 0 for i >= 3}

    The convex hull of the unit disk in the x1x2-plane and the basis points
    e_3..e_n. ConeSpindle(2) is the unit disk.
    """

    def __init__(self, dim: int):
        if int(dim) != dim or dim < 2:
            raise InvalidGeometry(f"cone spindle dimension must be an integer >= 2, got {dim!r}")
        self._dim = int(dim)

    @property
    def dim(self) -> int:
        return self._dim

    def constraint_values(self, points: np.ndarray) -> np.ndarray:
        radial = np.hypot(points[:, 0], points[:, 1])
        tips = points[:, 2:]
        cone = radial + tips.sum(axis=1) - 1.0
        return np.column_stack([cone, -tips])

    def support(self, direction: np.ndarray) -> Tuple[float, np.ndarray]:
        radial = float(np.hypot(direction[0], direction[1]))
        witness = np.zeros(self.dim)
        if radial > 0.0:
            witness[:2] = direction[:2] / radial
        else:
            witness[0] = 1.0
        value = radial
        if self.dim > 2:
            tip = int(np.argmax(direction[2:]))
            # The disk wins ties
            if direction[2 + tip] > value:
                value = float(direction[2 + tip])
                witness = basis_vector(self.dim, 2 + tip)
        return value, witness

    @cached_property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.zeros(self.dim)
        hi = np.ones(self.dim)
        lo[:2] = -1.0
        return lo, hi

    @cached_property
    def interior_point(self) -> np.ndarray:
        point = np.zeros(self.dim)
        point[2:] = 1.0 / (2.0 * (self.dim - 1))
        return point

    def farthest_distance(self, center: np.ndarray) -> float:
        center = as_vector(center, self.dim)
        tail = float(np.sum(center[2:] ** 2))
        rim = np.sqrt((1.0 + np.hypot(center[0], center[1])) ** 2 + tail)
        if self.dim == 2:
            return float(rim)
        tips = np.eye(self.dim)[2:]
        return float(max(rim, np.max(np.linalg.norm(tips - center, axis=1))))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "cone_spindle", "dim": self.dim}


class Image(Body):
    """The image map(base) of a body under a similarity."""

    def __init__(self, map: Similarity, base: Body):
        if map.dim != base.dim:
            raise DimensionMismatch(f"map dimension {map.dim} does not match body dimension {base.dim}")
        self.map = map
        self.base = base

    @property
    def dim(self) -> int:
        return self.base.dim

    def constraint_values(self, points: np.ndarray) -> np.ndarray:
        return self.base.constraint_values(np.atleast_2d(self.map.apply_inverse(points)))

    def support(self, direction: np.ndarray) -> Tuple[float, np.ndarray]:
        value, witness = self.base.support(self.map.rotation.T @ direction)
        return self.map.scale * value + float(direction @ self.map.translation), self.map.apply(witness)

    @cached_property
    def interior_point(self) -> np.ndarray:
        return self.map.apply(self.base.interior_point)

    def farthest_distance(self, center: np.ndarray) -> float:
        return self.map.scale * self.base.farthest_distance(self.map.apply_inverse(as_vector(center, self.dim)))

    @cached_property
    def _polytope(self) -> Optional["Polytope"]:
        base = to_polytope(self.base)
        if base is None:
            return None
        A = base.A @ self.map.rotation.T
        b = self.map.scale * base.b + A @ self.map.translation
        return Polytope.from_arrays(A, b, validate=False)

    def polytope_form(self) -> Optional["Polytope"]:
        return self._polytope

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "image", "map": self.map.to_dict(), "base": self.base.to_dict()}


class Intersection(Body):
    """Conjunction of bodies and halfspaces."""

    def __init__(self, parts: Sequence[Body], halfspaces: Sequence[Halfspace] = ()):
        if not parts:
            raise InvalidGeometry("an intersection needs at least one body")
        dims = {part.dim for part in parts} | {h.dim for h in halfspaces}
        if len(dims) != 1:
            raise DimensionMismatch(f"intersection of mixed dimensions {sorted(dims)}")
        self.parts = list(parts)
        self.halfspaces = list(halfspaces)
        self._A = np.array([h.normal for h in self.halfspaces]).reshape(-1, self.parts[0].dim)
        self._b = np.array([h.offset for h in self.halfspaces])

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def constraint_values(self, points: np.ndarray) -> np.ndarray:
        columns = [part.constraint_values(points) for part in self.parts]
        if self.halfspaces:
            columns.append(points @ self._A.T - self._b)
        return np.hstack(columns)

    @cached_property
    def _polytope(self) -> Optional["Polytope"]:
        forms = [to_polytope(part) for part in self.parts]
        if any(form is None for form in forms):
            return None
        A = np.vstack([form.A for form in forms] + [self._A])
        b = np.concatenate([form.b for form in forms] + [self._b])
        return Polytope.from_arrays(A, b, validate=False)

    def polytope_form(self) -> Optional["Polytope"]:
        return self._polytope

    @cached_property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._polytope is not None:
            return _polytope_box(self._polytope)
        lo = np.max([part.bounding_box[0] for part in self.parts], axis=0)
        hi = np.min([part.bounding_box[1] for part in self.parts], axis=0)
        for h in self.halfspaces:
            axis = int(np.argmax(np.abs(h.normal)))
            if abs(abs(h.normal[axis]) - 1.0) <= 1e-12:
                if h.normal[axis] > 0:
                    hi[axis] = min(hi[axis], h.offset)
                else:
                    lo[axis] = max(lo[axis], -h.offset)
        return lo, hi

    @cached_property
    def interior_point(self) -> np.ndarray:
        if self._polytope is not None:
            center, radius = self._polytope.chebyshev_ball()
            if center is None or radius <= MIN_INRADIUS:
                raise InvalidGeometry("intersection has empty interior")
            return center
        return find_interior_point(self)[0]

    def support(self, direction: np.ndarray) -> Tuple[float, np.ndarray]:
        if self._polytope is not None:
            return self._polytope.support(direction)
        return _oracle_support(self, direction)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "intersection",
            "parts": [part.to_dict() for part in self.parts],
            "halfspaces": [h.to_dict() for h in self.halfspaces],
        }


class Section(Body):
    """The slice {y : chart.to_ambient(y) in base} in chart coordinates."""

    def __init__(self, base: Body, chart: SliceChart):
        if base.dim != chart.ambient_dim:
            raise DimensionMismatch(f"chart of R^{chart.ambient_dim} cannot slice a body of dimension {base.dim}")
        self.base = base
        self.chart = chart

    @property
    def dim(self) -> int:
        return self.chart.dim

    def constraint_values(self, points: np.ndarray) -> np.ndarray:
        return self.base.constraint_values(np.atleast_2d(self.chart.to_ambient(points)))

    @cached_property
    def _polytope(self) -> Optional["Polytope"]:
        base = to_polytope(self.base)
        if base is None:
            return None
        A, b = self.chart.slice_halfspaces(base.A, base.b)
        if len(b) == 0:
            raise InvalidGeometry("section of a polytope by a hyperplane parallel to all its facets")
        return Polytope.from_arrays(A, b, validate=False)

    def polytope_form(self) -> Optional["Polytope"]:
        return self._polytope

    @cached_property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._polytope is not None:
            return _polytope_box(self._polytope)
        lo, hi = self.base.bounding_box
        center = (lo + hi) / 2.0
        radius = self.base.farthest_distance(center)
        offset = float(self.chart.hyperplane.signed_distance(center)[0])
        reach = np.sqrt(max(radius**2 - offset**2, 0.0))
        middle = self.chart.to_chart(center)
        return middle - reach, middle + reach

    @cached_property
    def interior_point(self) -> np.ndarray:
        if self._polytope is not None:
            center, radius = self._polytope.chebyshev_ball()
            if center is None or radius <= MIN_INRADIUS:
                raise InvalidGeometry("section has empty relative interior")
            return center
        return find_interior_point(self)[0]

    def support(self, direction: np.ndarray) -> Tuple[float, np.ndarray]:
        if self._polytope is not None:
            return self._polytope.support(direction)
        return _oracle_support(self, direction)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "section", "base": self.base.to_dict(), "chart": self.chart.to_dict()}


def _polytope_box(polytope: Polytope) -> Tuple[np.ndarray, np.ndarray]:
    vertices = polytope.vertices
    if len(vertices) == 0:
        raise InvalidGeometry("polytope is empty")
    return vertices.min(axis=0), vertices.max(axis=0)


def _dedupe_points(points: np.ndarray, tol: float) -> np.ndarray:
    kept: List[np.ndarray] = []
    for point in points:
        if not any(np.max(np.abs(point - other)) <= tol for other in kept):
            kept.append(point)
    if not kept:
        return np.empty((0, points.shape[1]))
    return np.array(kept)


def _oracle_support(body: Body, direction: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Support of an oracle body by SLSQP ascent

    Starts from the best sampled feasible point; an infeasible optimum is
    pulled back along the segment to the start until it is feasible.
    """
    cloud = body._feasible_cloud
    start = cloud[int(np.argmax(cloud @ direction))] if len(cloud) else body.interior_point
    result = minimize(
        lambda x: -float(direction @ x),
        start,
        jac=lambda x: -direction,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": lambda x: -body.constraint_values(x[None, :])[0]}],
        options={"maxiter": 200, "ftol": 1e-12},
    )
    candidate = result.x
    if body.violation(candidate)[0] > DEFAULT_TOLERANCE:
        low, high = 0.0, 1.0
        for _ in range(60):
            mid = (low + high) / 2.0
            if body.violation(start + mid * (candidate - start))[0] <= DEFAULT_TOLERANCE:
                low = mid
            else:
                high = mid
        candidate = start + low * (candidate - start)
    if float(direction @ candidate) < float(direction @ start):
        candidate = start
    return float(direction @ candidate), candidate


def _oracle_farthest_distance(body: Body, center: np.ndarray) -> float:
    center = as_vector(center, body.dim)
    directions = quasi_uniform_directions(body.dim, 64 * body.dim, ORACLE_SEED)
    _, witnesses = body.support_many(directions)
    distances = np.linalg.norm(witnesses - center, axis=1)
    best = witnesses[np.argsort(distances)[-3:]]
    farthest = float(distances.max())
    for start in best:
        result = minimize(
            lambda x: -float(np.sum((x - center) ** 2)),
            start,
            method="SLSQP",
            constraints=[{"type": "ineq", "fun": lambda x: -body.constraint_values(x[None, :])[0]}],
            options={"maxiter": 200, "ftol": 1e-12},
        )
        if body.violation(result.x)[0] <= DEFAULT_TOLERANCE:
            farthest = max(farthest, float(np.linalg.norm(result.x - center)))
    return farthest


def to_polytope(body: Body) -> Optional[Polytope]:
    """Exact halfspace form of a body that is a polytope in disguise, else None."""
    return body.polytope_form()


def bodies_equal(a: Body, b: Body, tol: float = 1e-12) -> bool:
    """Structural equality of two body documents, numbers within `tol`."""
    return nested_close(a.to_dict(), b.to_dict(), tol)


def membership(body: Body, point: ArrayLike, tol: float = DEFAULT_TOLERANCE) -> Location:
    """
    Locate a point relative to a body

    Args:
        body: The body
        point: Point of the same dimension
        tol: Symmetric boundary band

    Returns:
        INSIDE when every constraint has slack > tol, OUTSIDE when one is
        violated by more than tol, BOUNDARY otherwise
    """
    point = as_vector(point, body.dim)
    return Location(int(body.classify(point, tol)[0]))


def support(body: Body, direction: ArrayLike) -> Tuple[float, np.ndarray]:
    """
    Support value and witness in a unit direction

    Args:
        body: The body
        direction: Unit vector

    Returns:
        (max of direction . x over the body, a maximizer)
    """
    direction = as_vector(direction, body.dim)
    if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
        raise PreconditionError("support direction must be a unit vector")
    return body.support(direction)


def volume(
    body: Body,
    samples: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
    progress: bool = False,
    tol: float = DEFAULT_TOLERANCE,
) -> VolumeEstimate:
    """
    Hit-or-miss volume over the bounding box

    Args:
        body: The body
        samples: Number of uniform box samples
        seed: Stream seed
        workers: Threads for the chunked sample loop
        chunk_size: Samples per chunk
        progress: Show a progress bar
        tol: Boundary band counted as a hit

    Returns:
        VolumeEstimate, identical for any worker count
    """
    if samples < 1:
        raise PreconditionError("volume needs at least one sample")
    lo, hi = body.bounding_box
    box_volume = float(np.prod(hi - lo))

    def count_hits(chunk: int, start: int, stop: int) -> np.ndarray:
        points = uniform_box(stream(seed, VOLUME_STREAM, chunk), lo, hi, stop - start)
        return np.array([np.count_nonzero(body.violation(points) <= tol)])

    hits = int(sum_counts(map_chunks(count_hits, samples, workers, chunk_size, progress, "volume"))[0])
    fraction = hits / samples
    estimate = VolumeEstimate(
        value=box_volume * fraction,
        std_error=box_volume * float(np.sqrt(fraction * (1.0 - fraction) / samples)),
        samples=samples,
    )
    logger.debug("volume", value=estimate.value, std_error=estimate.std_error, samples=samples)
    return estimate


def count_clusters(points: np.ndarray, delta: float) -> int:
    """Number of centroid-linkage clusters of `points` at merge distance `delta`."""
    unique = np.unique(np.round(points, 12), axis=0)
    if len(unique) <= 1:
        return len(unique)
    tree = linkage(unique, method="centroid")
    return int(fcluster(tree, t=delta, criterion="distance").max())


def estimate_extremal_points(body: Body, m: int, delta: float, seed: int = 0) -> ExtremalEstimate:
    """
    Estimate the extremal-point count from support witnesses

    Args:
        body: The body
        m: Number of quasi-uniform directions (at least dim + 1)
        delta: Cluster merge distance
        seed: Direction scrambling seed

    Returns:
        Cluster counts at m and 2m directions; saturated when they differ
        by less than 5%
    """
    if m < body.dim + 1:
        raise PreconditionError(f"need at least {body.dim + 1} directions, got {m}")
    if delta <= 0:
        raise PreconditionError("cluster distance must be positive")
    counts = []
    for count in (m, 2 * m):
        _, witnesses = body.support_many(quasi_uniform_directions(body.dim, count, seed))
        counts.append(count_clusters(witnesses, delta))
    clusters, refined = counts
    saturated = abs(refined - clusters) < SATURATION_CHANGE * clusters
    logger.debug("extremal_points", directions=m, clusters=clusters, refined=refined, saturated=saturated)
    return ExtremalEstimate(
        directions_sampled=m,
        clusters=clusters,
        refined_clusters=refined,
        saturated=saturated,
        delta=delta,
    )


def bounding_radius_about(body: Body, center: ArrayLike) -> float:
    """Radius R with body inside the ball B(center, R)."""
    return body.farthest_distance(as_vector(center, body.dim))


def find_interior_point(
    body: Body,
    samples: int = DEFAULT_INTERIOR_SAMPLES,
    seed: int = ORACLE_SEED,
    rounds: int = 4,
    tol: float = DEFAULT_TOLERANCE,
) -> Tuple[np.ndarray, float]:
    """
    Deepest sampled point of a body

    Samples the bounding box, keeps the point with the most negative
    violation and retries in a box shrunk around it.

    Args:
        body: The body
        samples: Samples per round
        seed: Stream seed
        rounds: Sampling rounds
        tol: Depth a point needs to count as interior

    Returns:
        (point, depth) with depth = -violation > tol

    Raises:
        InvalidGeometry: if no sample is interior
    """
    lo, hi = body.bounding_box
    if np.any(hi < lo):
        raise InvalidGeometry("bounding box is empty")
    best_point, best_depth = None, -np.inf
    for round_index in range(rounds):
        points = uniform_box(stream(seed, INTERIOR_STREAM, round_index), lo, hi, samples)
        depth = -body.violation(points)
        index = int(np.argmax(depth))
        if depth[index] > best_depth:
            best_point, best_depth = points[index], float(depth[index])
        if best_depth > tol:
            half = (hi - lo) / 4.0
            lo = np.maximum(lo, best_point - half)
            hi = np.minimum(hi, best_point + half)
    if best_point is not None:
        # violation is convex: descend from the best sample
        polished = minimize(
            lambda x: float(body.violation(x)[0]),
            best_point,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 400 * body.dim},
        )
        depth = -float(body.violation(polished.x)[0])
        if depth > best_depth:
            best_point, best_depth = polished.x, depth
    if best_point is None or best_depth <= tol:
        raise InvalidGeometry("no interior point found")
    return best_point, best_depth
