"""
Examples Module

Constructors for the concrete tilings: the cone-spindle family with its
half-scale tip tiles, square and cube fixtures, and the canonical fixture
files shipped in `simtile/fixtures`.
"""

from itertools import product
from math import factorial, pi
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel

from simtile.errors import InvalidGeometry
from simtile.geometry.bodies import ConeSpindle, Intersection, Polytope
from simtile.geometry.core import Halfspace, Similarity, basis_vector
from simtile.geometry.tilings import Tile, Tiling
from simtile.serialization import dumps, save_tiling

logger = structlog.get_logger(__name__)

FIXTURES_DIR = Path(__file__).parent / "fixtures"

Corner = Union[str, Sequence[int]]


class Expected(BaseModel):
    tile_count: int
    tip_dim: int
    volumes: Optional[List[float]] = None


class ExampleSpec(BaseModel):
    """A fixture with its expected properties and their provenance."""

    name: str
    dim: int
    expected: Expected
    provenance: str


def cone_spindle_volume(n: int) -> float:
    """Volume 2*pi/n! of ConeSpindle(n)."""
    return 2.0 * pi / factorial(n)


def tip_homothety(n: int, i: int) -> Similarity:
    """f_i(x) = (x - e_i) / 2 + e_i, with i 1-based."""
    return Similarity.homothety(0.5, basis_vector(n, i - 1))


def cone_spindle_tiling(n: int) -> Tiling:
    """
    ConeSpindle(n) cut into its n-2 half-scale tip copies and the remainder

    Tiles f_3(K)..f_n(K) come first (tagged), then K ∩ {x_i <= 1/2, i >= 3}.

    Args:
        n: Dimension, at least 3

    Returns:
        Tiling with n - 1 tiles
    """
    if n < 3:
        raise InvalidGeometry(f"the cone-spindle tiling needs n >= 3, got {n}")
    ambient = ConeSpindle(n)
    tiles = [Tile.similar(tip_homothety(n, i), ambient) for i in range(3, n + 1)]
    cuts = [Halfspace(basis_vector(n, i - 1), 0.5) for i in range(3, n + 1)]
    tiles.append(Tile(Intersection([ambient], cuts)))
    return Tiling(ambient, tiles)


def cone_spindle_tag_tilings(n: int) -> List[Tiling]:
    """The family tiling once per tip tag, each keeping a single tag."""
    tiling = cone_spindle_tiling(n)
    return [tiling.with_single_tag(index) for index in tiling.tagged_indices]


def parse_corner(corner: Corner, dim: int) -> Tuple[int, ...]:
    """Accept (0, 1), [0, 1] or "0,1"; every entry must be 0 or 1."""
    if isinstance(corner, str):
        corner = [int(part) for part in corner.replace(" ", "").split(",") if part]
    values = tuple(int(value) for value in corner)
    if len(values) != dim or any(value not in (0, 1) for value in values):
        raise InvalidGeometry(f"corner must be {dim} entries of 0/1, got {corner!r}")
    return values


def orthant_tiling(dim: int, corner: Corner) -> Tiling:
    """
    Unit cube cut into 2^dim half-size cubes, the one at `corner` tagged

    Args:
        dim: Dimension, at least 1
        corner: Vertex of the unit cube (entries 0/1)

    Returns:
        Tiling with 2^dim tiles in lexicographic order of their corners
    """
    corner = parse_corner(corner, dim)
    cube = Polytope.box(np.zeros(dim), np.ones(dim))
    tiles = []
    for cell in product((0, 1), repeat=dim):
        if cell == corner:
            tiles.append(Tile.similar(Similarity.homothety(0.5, np.array(corner, dtype=np.float64)), cube))
        else:
            lo = np.array(cell, dtype=np.float64) / 2.0
            tiles.append(Tile(Polytope.box(lo, lo + 0.5)))
    return Tiling(cube, tiles)


def quarter_square_tiling(corner: Corner = (0, 0)) -> Tiling:
    """Unit square in four quarters, the quarter at `corner` tagged with the 1/2-homothety fixing it."""
    return orthant_tiling(2, corner)


def rotated_similar_tile_fixture() -> Tiling:
    """
    Unit square in four quarters; the lower-left one is tagged with
    f(x) = 1/2 R x + (1/2, 0), R the quarter turn. f maps the square onto
    [0, 1/2]^2 and fixes (0.4, 0.2).
    """
    square = Polytope.box(np.zeros(2), np.ones(2))
    quarter_turn = np.array([[0.0, -1.0], [1.0, 0.0]])
    tag = Similarity(0.5, quarter_turn, np.array([0.5, 0.0]))
    tiles = [Tile.similar(tag, square)]
    for lo in ((0.5, 0.0), (0.0, 0.5), (0.5, 0.5)):
        lo = np.array(lo)
        tiles.append(Tile(Polytope.box(lo, lo + 0.5)))
    return Tiling(square, tiles)


def single_tile_tiling() -> Tiling:
    """The trivial tiling {unit square}."""
    square = Polytope.box(np.zeros(2), np.ones(2))
    return Tiling(square, [Tile(square)])


def _spec(name: str, dim: int, tile_count: int, tip_dim: int, provenance: str, volumes=None) -> ExampleSpec:
    return ExampleSpec(
        name=name,
        dim=dim,
        expected=Expected(tile_count=tile_count, tip_dim=tip_dim, volumes=volumes),
        provenance=provenance,
    )


def _cone_volumes(n: int) -> List[float]:
    total = cone_spindle_volume(n)
    tip = total / 2**n
    return [tip] * (n - 2) + [total - (n - 2) * tip]


# Fixture file name -> (builder, expectations)
EXAMPLES: Dict[str, Tuple[Callable[[], Tiling], ExampleSpec]] = {
    **{
        f"cone_spindle_{n}": (
            (lambda n=n: cone_spindle_tiling(n)),
            _spec(f"cone_spindle_{n}", n, n - 1, n - 3, "DERIVED: closed-form volume 2*pi/n! and ratio 1/2", _cone_volumes(n)),
        )
        for n in (3, 4, 5, 6)
    },
    "quarter_square_00": (
        lambda: quarter_square_tiling((0, 0)),
        _spec("quarter_square_00", 2, 4, 0, "TRIVIAL: exact partition", [0.25] * 4),
    ),
    "quarter_square_11": (
        lambda: quarter_square_tiling((1, 1)),
        _spec("quarter_square_11", 2, 4, 0, "TRIVIAL: exact partition", [0.25] * 4),
    ),
    "rotated_fixture": (
        rotated_similar_tile_fixture,
        _spec("rotated_fixture", 2, 4, 0, "TRIVIAL: exact partition, tag fixes (0.4, 0.2)", [0.25] * 4),
    ),
    "single_tile": (
        single_tile_tiling,
        _spec("single_tile", 2, 1, 0, "TRIVIAL: improper tiling", [1.0]),
    ),
    "orthant_3_000": (
        lambda: orthant_tiling(3, (0, 0, 0)),
        _spec("orthant_3_000", 3, 8, 0, "TRIVIAL: exact partition", [0.125] * 8),
    ),
    "orthant_3_111": (
        lambda: orthant_tiling(3, (1, 1, 1)),
        _spec("orthant_3_111", 3, 8, 0, "TRIVIAL: exact partition", [0.125] * 8),
    ),
}


def build_example(name: str) -> Tiling:
    try:
        builder, _ = EXAMPLES[name]
    except KeyError:
        raise InvalidGeometry(f"unknown example {name!r}; known: {sorted(EXAMPLES)}") from None
    return builder()


def write_fixtures(directory: Union[str, Path] = FIXTURES_DIR) -> List[Path]:
    """
    Regenerate every fixture file and manifest.json

    Args:
        directory: Target directory

    Returns:
        Paths written, manifest last
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (builder, _) in EXAMPLES.items():
        written.append(save_tiling(builder(), directory / f"{name}.json"))
    manifest = {name: spec.model_dump() for name, (_, spec) in EXAMPLES.items()}
    manifest_path = directory / "manifest.json"
    manifest_path.write_bytes(dumps(manifest))
    written.append(manifest_path)
    logger.info("write_fixtures", directory=str(directory), files=len(written))
    return written
