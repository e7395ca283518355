"""
Charts Module

Affine isometric charts that identify a hyperplane H of R^n with R^(n-1).
Slices of bodies and tilings are expressed in chart coordinates.
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
import scipy.linalg

from simtile.config import ORTHOGONALITY_TOLERANCE
from simtile.errors import DegenerateSlice, DimensionMismatch, EmptySlice, InvalidGeometry
from simtile.geometry.core import ArrayLike, Hyperplane, as_points, as_vector, plain

# Rows whose sliced normal is shorter than this are constant on the hyperplane
ZERO_ROW = 1e-12


@dataclass(frozen=True, eq=False)
class SliceChart:
    """
    Chart of a hyperplane

    `origin` lies on the hyperplane and `frame` holds n-1 orthonormal rows
    orthogonal to its normal. A point y of R^(n-1) sits at origin + y @ frame.
    """

    hyperplane: Hyperplane
    origin: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        n = self.hyperplane.dim
        origin = as_vector(self.origin, n)
        frame = np.array(self.frame, dtype=np.float64).reshape(n - 1, n)
        if abs(float(origin @ self.hyperplane.normal) - self.hyperplane.offset) > 1e-9:
            raise InvalidGeometry("chart origin does not lie on the hyperplane")
        if n > 1:
            gram = frame @ frame.T
            if np.max(np.abs(gram - np.eye(n - 1))) > ORTHOGONALITY_TOLERANCE:
                raise InvalidGeometry("chart frame is not orthonormal")
            if np.max(np.abs(frame @ self.hyperplane.normal)) > ORTHOGONALITY_TOLERANCE:
                raise InvalidGeometry("chart frame is not orthogonal to the hyperplane normal")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "frame", frame)

    @classmethod
    def for_hyperplane(cls, hyperplane: Hyperplane) -> "SliceChart":
        """Canonical chart: origin = offset * normal, frame from the null space of the normal."""
        if hyperplane.dim < 2:
            raise DimensionMismatch("slicing needs an ambient dimension of at least 2")
        frame = scipy.linalg.null_space(hyperplane.normal.reshape(1, -1)).T
        return cls(hyperplane, hyperplane.offset * hyperplane.normal, frame)

    @property
    def dim(self) -> int:
        """Dimension of the chart (n - 1)."""
        return self.hyperplane.dim - 1

    @property
    def ambient_dim(self) -> int:
        return self.hyperplane.dim

    def to_chart(self, points: ArrayLike) -> np.ndarray:
        """Orthogonal projection onto H expressed in chart coordinates."""
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            return self.frame @ (as_vector(arr, self.ambient_dim) - self.origin)
        return (as_points(arr, self.ambient_dim) - self.origin) @ self.frame.T

    def to_ambient(self, points: ArrayLike) -> np.ndarray:
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            return self.origin + as_vector(arr, self.dim) @ self.frame
        return self.origin + as_points(arr, self.dim) @ self.frame

    def slice_halfspaces(self, A: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, np.ndarray]:
        """
        Restrict a system A x <= b to the hyperplane

        Args:
            A: (m, n) constraint normals
            b: (m,) offsets
            tol: Slack allowed on constraints that are constant along H

        Returns:
            (A', b') with A' y <= b' in chart coordinates; constant rows dropped

        Raises:
            EmptySlice: if a constant row is violated on the whole hyperplane
            DegenerateSlice: if the hyperplane lies on a facet
        """
        sliced = A @ self.frame.T
        offsets = b - A @ self.origin
        norms = np.linalg.norm(sliced, axis=1)
        constant = norms <= ZERO_ROW
        if np.any(offsets[constant] < -tol):
            raise EmptySlice("hyperplane lies outside a constraint parallel to it")
        if np.any(offsets[constant] <= tol):
            raise DegenerateSlice("hyperplane contains a facet")
        return sliced[~constant], offsets[~constant]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hyperplane": self.hyperplane.to_dict(),
            "origin": plain(self.origin),
            "frame": plain(self.frame),
        }
