"""
Slicing Module

Induced tilings {H} * T on a hyperplane section H ∩ K, expressed in the
coordinates of a SliceChart, and boundary point clouds of the slice tiles.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog

from simtile.config import DEFAULT_INTERIOR_SAMPLES, DEFAULT_TOLERANCE
from simtile.errors import DegenerateSlice, DimensionMismatch, EmptySlice, InvalidGeometry, PreconditionError
from simtile.geometry.bodies import MIN_INRADIUS, Body, Polytope, Section, find_interior_point, to_polytope
from simtile.geometry.charts import SliceChart
from simtile.geometry.core import Hyperplane, Similarity, fixed_point
from simtile.geometry.sampling import SLICE_STREAM, quasi_uniform_directions, stream, uniform_box
from simtile.geometry.tilings import Tile, Tiling

logger = structlog.get_logger(__name__)

DEFAULT_SLICE_SAMPLES = 20_000
RAY_BISECTION_STEPS = 60


def section_of(body: Body, chart: SliceChart) -> Optional[Body]:
    """
    The slice of a body in chart coordinates, if it has relative interior

    Polytopes slice exactly to polytopes; other bodies become Sections.
    Returns None when the polytope slice is empty or flat.
    """
    polytope = to_polytope(body)
    if polytope is None:
        return Section(body, chart)
    try:
        A, b = chart.slice_halfspaces(polytope.A, polytope.b)
    except (EmptySlice, DegenerateSlice):
        return None
    if len(b) == 0:
        return None
    piece = Polytope.from_arrays(A, b, validate=False)
    center, radius = piece.chebyshev_ball()
    if center is None or radius <= MIN_INRADIUS:
        return None
    return piece


def _support_interval(body: Body, normal: np.ndarray) -> Tuple[float, float]:
    return -body.support(-normal)[0], body.support(normal)[0]


def slice_tiling(
    t: Tiling,
    h: Hyperplane,
    samples: int = DEFAULT_SLICE_SAMPLES,
    seed: int = 0,
    tol: float = DEFAULT_TOLERANCE,
) -> Tuple[SliceChart, Tiling]:
    """
    Induced tiling of H ∩ K

    A tile contributes when its slice has relative interior: exactly for
    polytope tiles, by shared chart samples (then an interior-point search)
    for the others. A tile tagged with a homothety whose fixed point lies on
    H contributes a tagged homothetic slice tile.

    Args:
        t: The tiling
        h: The hyperplane
        samples: Chart samples for oracle tiles
        seed: Sample stream seed
        tol: Distance below which the fixed point counts as on H

    Returns:
        (chart, tiling of the slice in chart coordinates)

    Raises:
        EmptySlice: if H misses K
        DegenerateSlice: if H only touches K
    """
    if t.dim < 2:
        raise DimensionMismatch("slicing needs dimension at least 2")
    if h.dim != t.dim:
        raise DimensionMismatch(f"hyperplane of dimension {h.dim} cannot slice a tiling of dimension {t.dim}")
    low, high = _support_interval(t.ambient, h.normal)
    if h.offset > high + tol or h.offset < low - tol:
        raise EmptySlice(f"hyperplane offset {h.offset} outside the body's range [{low}, {high}]")
    if h.offset >= high - tol or h.offset <= low + tol:
        raise DegenerateSlice("hyperplane only touches the body")

    chart = SliceChart.for_hyperplane(h)
    ambient = section_of(t.ambient, chart)
    if ambient is None:
        raise DegenerateSlice("section of the ambient body has empty relative interior")
    try:
        ambient.interior_point
    except InvalidGeometry as exc:
        raise DegenerateSlice(f"section of the ambient body has empty relative interior: {exc}") from exc

    lo, hi = ambient.bounding_box
    shared = uniform_box(stream(seed, SLICE_STREAM), lo, hi, samples)
    tiles: List[Tile] = []
    for index, tile in enumerate(t.tiles):
        piece = section_of(tile.body, chart)
        if piece is None or not _has_interior(piece, shared, seed, tol):
            continue
        tag = tile.similarity_to_ambient
        if tag is not None and tag.is_homothety:
            center = fixed_point(tag)
            if abs(float(h.signed_distance(center)[0])) <= tol:
                chart_tag = Similarity.homothety(tag.scale, chart.to_chart(center))
                tiles.append(Tile.similar(chart_tag, ambient))
                continue
        tiles.append(Tile(piece))
        logger.debug("slice_tile", tile=index, kind=type(piece).__name__)
    if not tiles:
        raise DegenerateSlice("no tile has a slice with relative interior")
    induced = Tiling(ambient, tiles)
    logger.info("slice_tiling", tiles=len(tiles), proper=induced.is_proper, tagged=induced.tagged_indices)
    return chart, induced


def _has_interior(piece: Body, shared: np.ndarray, seed: int, tol: float) -> bool:
    if isinstance(piece, Polytope):
        return True
    if np.any(piece.violation(shared) < -tol):
        return True
    try:
        find_interior_point(piece, samples=DEFAULT_INTERIOR_SAMPLES, seed=seed)
    except InvalidGeometry:
        return False
    return True


def ray_boundary(body: Body, center: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Boundary points hit by rays from an interior point, by vectorized bisection."""
    lo, hi = body.bounding_box
    reach = float(np.linalg.norm(hi - lo)) + 1.0
    inner = np.zeros(len(directions))
    outer = np.full(len(directions), reach)
    for _ in range(RAY_BISECTION_STEPS):
        mid = (inner + outer) / 2.0
        inside = body.violation(center + mid[:, None] * directions) <= 0.0
        inner = np.where(inside, mid, inner)
        outer = np.where(inside, outer, mid)
    return center + inner[:, None] * directions


def slice_boundary_cloud(bodies: Sequence[Body], resolution: int, seed: int = 0) -> pd.DataFrame:
    """
    Boundary samples of each body, one labeled row per point

    Args:
        bodies: Bodies of one dimension (slice tiles in chart coordinates)
        resolution: Rays per body
        seed: Direction seed

    Returns:
        DataFrame with columns tile, y0..y{k-1}
    """
    if resolution < 1:
        raise PreconditionError("resolution must be positive")
    frames = []
    for label, body in enumerate(bodies):
        directions = quasi_uniform_directions(body.dim, resolution, seed + label)
        points = ray_boundary(body, body.interior_point, directions)
        frame = pd.DataFrame(points, columns=[f"y{axis}" for axis in range(body.dim)])
        frame.insert(0, "tile", label)
        frames.append(frame)
    cloud = pd.concat(frames, ignore_index=True)
    logger.debug("slice_boundary_cloud", bodies=len(bodies), points=len(cloud))
    return cloud
