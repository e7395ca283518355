"""
Tilings Module

The tiling data model and its calculus: Monte Carlo validation, iteration
f_L(T) + T, the meet T1 * T2, similarity transport and tip-simplex analysis.

A tiling is an ambient body K with a finite list of tiles. A tile may carry a
similarity f with tile = f(K); such a tile is stored as Image(f, K) so the tag
is checkable structurally.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel

from simtile.config import CHUNK_SIZE, DEFAULT_INTERIOR_SAMPLES, DEFAULT_TOLERANCE, RANK_TOLERANCE, Thresholds
from simtile.errors import (
    DimensionMismatch,
    EmptyIntersection,
    InvalidGeometry,
    PreconditionError,
    UntaggedTile,
    UntaggedTiling,
)
from simtile.geometry.bodies import (
    MIN_INRADIUS,
    Body,
    Image,
    Intersection,
    Location,
    Polytope,
    bodies_equal,
    find_interior_point,
    membership,
    to_polytope,
)
from simtile.geometry.core import Similarity, compose, fixed_point, invert
from simtile.geometry.sampling import VALIDATION_STREAM, VOLUME_STREAM, map_chunks, stream, sum_counts, uniform_box

logger = structlog.get_logger(__name__)

MIN_VALIDATION_SAMPLES = 1000


@dataclass(frozen=True, eq=False)
class Tile:
    """A tile, optionally tagged with its similarity to the ambient body."""

    body: Body
    similarity_to_ambient: Optional[Similarity] = None

    @classmethod
    def similar(cls, tag: Similarity, ambient: Body) -> "Tile":
        """The tile tag(ambient), tagged."""
        return cls(Image(tag, ambient), tag)

    @property
    def tagged(self) -> bool:
        return self.similarity_to_ambient is not None

    def untagged(self) -> "Tile":
        return Tile(self.body)

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"body": self.body.to_dict()}
        if self.similarity_to_ambient is not None:
            doc["similarity_to_ambient"] = self.similarity_to_ambient.to_dict()
        return doc


class Tiling:
    """
    Ambient body K with a nonempty list of tiles

    Tagged tiles must be Image(tag, K) with tag ratio < 1. Whether the tiles
    really cover K without overlap is checked by `validate_tiling`, not here.
    """

    def __init__(self, ambient: Body, tiles: Sequence[Tile], check_tags: bool = True):
        if not tiles:
            raise InvalidGeometry("a tiling needs at least one tile")
        for index, tile in enumerate(tiles):
            if tile.body.dim != ambient.dim:
                raise DimensionMismatch(f"tile {index} has dimension {tile.body.dim}, ambient has {ambient.dim}")
            tag = tile.similarity_to_ambient
            if tag is None or not check_tags:
                continue
            if tag.scale >= 1.0:
                raise InvalidGeometry(f"tile {index}: similarity ratio {tag.scale} is not < 1")
            if not bodies_equal(tile.body, Image(tag, ambient)):
                raise InvalidGeometry(f"tile {index}: body is not the image of the ambient body under its tag")
        self.ambient = ambient
        self.tiles = list(tiles)

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @property
    def is_proper(self) -> bool:
        return len(self.tiles) >= 2

    @property
    def tagged_indices(self) -> List[int]:
        return [index for index, tile in enumerate(self.tiles) if tile.tagged]

    def tile(self, index: int) -> Tile:
        """Tile `index`; negative indices are rejected like any other out-of-range index."""
        if not 0 <= index < len(self.tiles):
            raise PreconditionError(f"tile index {index} out of range for {len(self.tiles)} tiles")
        return self.tiles[index]

    def tag(self, index: int) -> Similarity:
        """Similarity of tile `index`, or UntaggedTile."""
        tag = self.tile(index).similarity_to_ambient
        if tag is None:
            raise UntaggedTile(f"tile {index} carries no similarity to the ambient body")
        return tag

    def first_tagged(self) -> int:
        indices = self.tagged_indices
        if not indices:
            raise UntaggedTiling("tiling has no tagged tile")
        return indices[0]

    def with_single_tag(self, index: int) -> "Tiling":
        """Same tiles, with every tag except tile `index`'s dropped."""
        self.tag(index)
        tiles = [tile if i == index else tile.untagged() for i, tile in enumerate(self.tiles)]
        return Tiling(self.ambient, tiles)

    def to_dict(self) -> Dict[str, Any]:
        return {"ambient": self.ambient.to_dict(), "tiles": [tile.to_dict() for tile in self.tiles]}

    def __len__(self) -> int:
        return len(self.tiles)

    def __repr__(self) -> str:
        return f"Tiling(dim={self.dim}, tiles={len(self.tiles)}, tagged={self.tagged_indices})"


class ValidationReport(BaseModel):
    """Monte Carlo cover check of a tiling."""

    covered: bool
    volume_gap: float
    max_overlap_fraction: float
    orphan_points: int
    proper: bool
    seed: int
    samples: int


class TipSimplex(BaseModel):
    """Fixed points of the designated tags and their affine hull dimension."""

    points: List[List[float]]
    affine_dim: int
    nondegenerate_for: Optional[int] = None


def image_of(f: Similarity, body: Body) -> Body:
    """f(body), folding nested images into one similarity."""
    if isinstance(body, Image):
        return Image(compose(f, body.map), body.base)
    return Image(f, body)


def _box_inside(inner: Tuple[np.ndarray, np.ndarray], outer: Tuple[np.ndarray, np.ndarray]) -> bool:
    return bool(np.all(inner[0] >= outer[0] - DEFAULT_TOLERANCE) and np.all(inner[1] <= outer[1] + DEFAULT_TOLERANCE))


def _excess_volume(
    body: Body,
    box: Tuple[np.ndarray, np.ndarray],
    samples: int,
    seed: int,
    workers: int,
    chunk_size: int,
    tol: float,
) -> float:
    """Volume of the part of `body` outside `box`, sampled over the body's own box."""
    lo, hi = body.bounding_box
    outer_lo, outer_hi = box

    def count_outside(chunk: int, start: int, stop: int) -> np.ndarray:
        points = uniform_box(stream(seed, VOLUME_STREAM, chunk), lo, hi, stop - start)
        outside = np.any((points < outer_lo) | (points > outer_hi), axis=1)
        return np.array([np.count_nonzero(outside & (body.violation(points) <= tol))])

    hits = int(sum_counts(map_chunks(count_outside, samples, workers, chunk_size))[0])
    return float(np.prod(hi - lo)) * hits / samples


def validate_tiling(
    t: Tiling,
    samples: int,
    seed: int,
    thresholds: Optional[Thresholds] = None,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
    progress: bool = False,
    tol: float = DEFAULT_TOLERANCE,
) -> ValidationReport:
    """
    Check that the tiles cover the ambient body without overlap

    Uniform samples of the ambient bounding box are classified against K and
    every tile. A K-interior point in no closed tile is an orphan; a
    K-interior point interior to two tiles counts toward their overlap. Tile
    volumes come from the same samples; a tile whose box reaches outside the
    ambient box adds a separate estimate of its part outside.

    Args:
        t: The tiling
        samples: Number of samples (at least 1000)
        seed: Stream seed
        thresholds: Acceptance thresholds for volume gap and overlap
        workers: Threads for the sample loop
        chunk_size: Samples per chunk
        progress: Show a progress bar
        tol: Boundary band

    Returns:
        ValidationReport; failures are reported, never raised
    """
    if samples < MIN_VALIDATION_SAMPLES:
        raise PreconditionError(f"validation needs at least {MIN_VALIDATION_SAMPLES} samples, got {samples}")
    thresholds = thresholds or Thresholds()
    ambient = t.ambient
    lo, hi = ambient.bounding_box
    box_volume = float(np.prod(hi - lo))
    count = len(t.tiles)

    def kernel(chunk: int, start: int, stop: int) -> np.ndarray:
        points = uniform_box(stream(seed, VALIDATION_STREAM, chunk), lo, hi, stop - start)
        ambient_violation = ambient.violation(points)
        inside_ambient = ambient_violation < -tol
        tile_violation = np.column_stack([tile.body.violation(points) for tile in t.tiles])
        closed = tile_violation <= tol
        interior = (tile_violation < -tol)[inside_ambient].astype(np.int64)
        orphans = np.count_nonzero(~closed[inside_ambient].any(axis=1))
        return np.concatenate(
            [
                [np.count_nonzero(ambient_violation <= tol), np.count_nonzero(inside_ambient), orphans],
                closed.sum(axis=0),
                (interior.T @ interior).reshape(-1),
            ]
        )

    totals = sum_counts(map_chunks(kernel, samples, workers, chunk_size, progress, "validate"))
    ambient_hits, ambient_inside, orphans = (int(v) for v in totals[:3])
    tile_hits = totals[3 : 3 + count]
    overlap = totals[3 + count :].reshape(count, count).astype(np.float64)

    ambient_volume = box_volume * ambient_hits / samples
    tile_volumes = box_volume * tile_hits / samples
    for index, tile in enumerate(t.tiles):
        if not _box_inside(tile.body.bounding_box, (lo, hi)):
            tile_volumes[index] += _excess_volume(tile.body, (lo, hi), samples, seed + index + 1, workers, chunk_size, tol)
    gap = abs(ambient_volume - float(np.sum(tile_volumes))) / ambient_volume if ambient_volume > 0 else float("inf")

    np.fill_diagonal(overlap, 0.0)
    max_overlap = float(overlap.max()) / max(ambient_inside, 1) if count > 1 else 0.0

    report = ValidationReport(
        covered=bool(gap < thresholds.volume_gap and orphans == 0 and max_overlap < thresholds.overlap),
        volume_gap=float(gap),
        max_overlap_fraction=max_overlap,
        orphan_points=orphans,
        proper=t.is_proper,
        seed=seed,
        samples=samples,
    )
    logger.info("validate_tiling", **report.model_dump())
    return report


def iterate_tiling(t: Tiling, tile_index: int, pattern: Optional[Tiling] = None) -> Tiling:
    """
    Iterate a tiling at a tagged tile

    Replaces L = f_L(K) by f_L(pattern); the pattern defaults to t itself.
    Images are inserted at the position of L, so a tile at index j of the
    pattern lands at tile_index + j. Tagged pattern tiles stay tagged with
    the composed similarity.

    Args:
        t: The tiling
        tile_index: Index of a tagged tile
        pattern: Tiling of the same ambient body to nest inside L

    Returns:
        Tiling of the same ambient body with |t| + |pattern| - 1 tiles

    Raises:
        UntaggedTile: if the tile carries no similarity
    """
    f = t.tag(tile_index)
    if pattern is None:
        pattern = t
    if pattern is not t and not bodies_equal(pattern.ambient, t.ambient):
        raise PreconditionError("pattern must tile the same ambient body")
    images = []
    for tile in pattern.tiles:
        if tile.tagged:
            images.append(Tile.similar(compose(f, tile.similarity_to_ambient), t.ambient))
        else:
            images.append(Tile(image_of(f, tile.body)))
    tiles = t.tiles[:tile_index] + images + t.tiles[tile_index + 1 :]
    logger.debug("iterate_tiling", tile=tile_index, tiles=len(tiles), ratio=f.scale)
    return Tiling(t.ambient, tiles)


def transform_tiling(g: Similarity, t: Tiling) -> Tiling:
    """The tiling g(T) of g(K); tags become g o tag o g^-1."""
    if g.dim != t.dim:
        raise DimensionMismatch(f"map of dimension {g.dim} applied to a tiling of dimension {t.dim}")
    ambient = image_of(g, t.ambient)
    g_inverse = invert(g)
    tiles = []
    for tile in t.tiles:
        if tile.tagged:
            tiles.append(Tile.similar(compose(compose(g, tile.similarity_to_ambient), g_inverse), ambient))
        else:
            tiles.append(Tile(image_of(g, tile.body)))
    return Tiling(ambient, tiles)


def _is_trivial(t: Tiling) -> bool:
    return len(t.tiles) == 1 and bodies_equal(t.tiles[0].body, t.ambient)


def _dedupe_rows(A: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    _, keep = np.unique(np.round(np.column_stack([A, b]), 12), axis=0, return_index=True)
    keep = np.sort(keep)
    return A[keep], b[keep]


def intersect_bodies(
    p: Body, q: Body, interior_samples: int = DEFAULT_INTERIOR_SAMPLES, seed: int = 0
) -> Optional[Body]:
    """
    P ∩ Q if it has nonempty interior, else None

    Two polytopes meet exactly by concatenating their halfspace lists;
    anything else becomes an Intersection tested by interior-point search.
    """
    p_lo, p_hi = p.bounding_box
    q_lo, q_hi = q.bounding_box
    if np.any(np.maximum(p_lo, q_lo) > np.minimum(p_hi, q_hi) + DEFAULT_TOLERANCE):
        return None
    p_poly, q_poly = to_polytope(p), to_polytope(q)
    if p_poly is not None and q_poly is not None:
        A, b = _dedupe_rows(np.vstack([p_poly.A, q_poly.A]), np.concatenate([p_poly.b, q_poly.b]))
        piece = Polytope.from_arrays(A, b, validate=False)
        center, radius = piece.chebyshev_ball()
        return piece if center is not None and radius > MIN_INRADIUS else None
    piece = Intersection([p, q])
    try:
        find_interior_point(piece, samples=interior_samples, seed=seed)
    except InvalidGeometry:
        return None
    return piece


def meet_pieces(
    a: Tiling, b: Tiling, interior_samples: int = DEFAULT_INTERIOR_SAMPLES, seed: int = 0
) -> List[Tuple[int, int, Tile]]:
    """
    Nonempty pieces P_i ∩ Q_j of two tilings, with their origins

    When one tiling is the trivial tiling {K} of the other's ambient body,
    the other's tiles pass through unchanged and keep their tags.

    Returns:
        (i, j, tile) triples in row-major order of (i, j)
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot meet tilings of dimensions {a.dim} and {b.dim}")
    same_ambient = bodies_equal(a.ambient, b.ambient)
    if same_ambient and _is_trivial(b):
        return [(i, 0, tile) for i, tile in enumerate(a.tiles)]
    if same_ambient and _is_trivial(a):
        return [(0, j, tile) for j, tile in enumerate(b.tiles)]
    pieces = []
    for i, p in enumerate(a.tiles):
        for j, q in enumerate(b.tiles):
            body = intersect_bodies(p.body, q.body, interior_samples, seed)
            if body is not None:
                pieces.append((i, j, Tile(body)))
    if not pieces:
        raise EmptyIntersection("no tile intersection has nonempty interior")
    return pieces


def meet_ambient(a: Body, b: Body) -> Body:
    """Ambient body of a meet."""
    if bodies_equal(a, b):
        return a
    a_poly, b_poly = to_polytope(a), to_polytope(b)
    if a_poly is not None and b_poly is not None:
        A, b_vec = _dedupe_rows(np.vstack([a_poly.A, b_poly.A]), np.concatenate([a_poly.b, b_poly.b]))
        return Polytope.from_arrays(A, b_vec)
    return Intersection([a, b])


def meet_tilings(a: Tiling, b: Tiling, interior_samples: int = DEFAULT_INTERIOR_SAMPLES, seed: int = 0) -> Tiling:
    """
    The meet T1 * T2 = {P ∩ Q}, a tiling of the intersection of the ambients

    Args:
        a: First tiling
        b: Second tiling
        interior_samples: Interior-point search budget per oracle piece
        seed: Search seed

    Returns:
        Tiling of a.ambient ∩ b.ambient; tags survive only against a trivial factor

    Raises:
        EmptyIntersection: if no piece has nonempty interior
    """
    pieces = meet_pieces(a, b, interior_samples, seed)
    ambient = meet_ambient(a.ambient, b.ambient)
    tiles = [tile for _, _, tile in pieces]
    logger.debug("meet_tilings", left=len(a.tiles), right=len(b.tiles), tiles=len(tiles))
    return Tiling(ambient, tiles)


def tag_fixed_points(t: Tiling) -> List[Tuple[int, np.ndarray]]:
    """Fixed point of every tagged tile, by tile index."""
    return [(index, fixed_point(t.tiles[index].similarity_to_ambient)) for index in t.tagged_indices]


def classify_fixed_point(t: Tiling, tile_index: int, tol: float = DEFAULT_TOLERANCE) -> Location:
    """Location of x_L in the ambient body; INSIDE certifies that the ambient body is a polytope."""
    return membership(t.ambient, fixed_point(t.tag(tile_index)), tol)


def affine_dimension(points: np.ndarray) -> int:
    """Numeric rank of the difference vectors, tolerance 1e-8 * max(1, max |coordinate|)."""
    if len(points) <= 1:
        return 0
    scale = max(1.0, float(np.max(np.abs(points))))
    return int(np.linalg.matrix_rank(points[1:] - points[0], tol=RANK_TOLERANCE * scale))


def tip_simplex(tilings: Sequence[Tiling], tags: Optional[Sequence[int]] = None) -> TipSimplex:
    """
    Tip simplex of a list of tilings

    The points are nondegenerate for n when they span an (n-2)-dimensional
    simplex. More than n-1 points are accepted as long as they reach that
    dimension, so two tilings of the square with distinct fixed points count
    as nondegenerate for n = 2.

    Args:
        tilings: Tilings of bodies in the same dimension
        tags: Designated tile index per tiling; the first tagged tile by default

    Returns:
        TipSimplex; nondegenerate_for = n when the points span at least an (n-2)-simplex

    Raises:
        UntaggedTiling: if a tiling has no tagged tile
    """
    if not tilings:
        raise PreconditionError("tip simplex needs at least one tiling")
    dims = {t.dim for t in tilings}
    if len(dims) != 1:
        raise DimensionMismatch(f"tilings of mixed dimensions {sorted(dims)}")
    if tags is not None and len(tags) != len(tilings):
        raise PreconditionError(f"{len(tags)} tag indices for {len(tilings)} tilings")
    indices = list(tags) if tags is not None else [t.first_tagged() for t in tilings]
    points = np.array([fixed_point(t.tag(index)) for t, index in zip(tilings, indices)])
    n = dims.pop()
    affine_dim = affine_dimension(points)
    nondegenerate = n if affine_dim >= n - 2 else None
    logger.debug("tip_simplex", points=len(points), affine_dim=affine_dim, nondegenerate_for=nondegenerate)
    return TipSimplex(points=points.tolist(), affine_dim=affine_dim, nondegenerate_for=nondegenerate)
