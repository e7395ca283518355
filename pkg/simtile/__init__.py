"""
simtile Package

Tilings of convex bodies with tiles similar to the whole body:
1. geometry - Similarities, bodies, tilings and the tiling constructions
2. examples - The cone-spindle family and square/cube fixtures
3. serialization - Stable JSON documents for tilings and reports
4. cli - The `simtile` command
"""

from .errors import SimtileError
from .examples import (
    cone_spindle_tag_tilings,
    cone_spindle_tiling,
    cone_spindle_volume,
    orthant_tiling,
    quarter_square_tiling,
    rotated_similar_tile_fixture,
    single_tile_tiling,
)
from .serialization import dumps, load_tiling, save_tiling, tiling_from_dict

__version__ = "0.1.0"

__all__ = [
    # Errors
    'SimtileError',

    # Examples
    'cone_spindle_tag_tilings', 'cone_spindle_tiling', 'cone_spindle_volume', 'orthant_tiling',
    'quarter_square_tiling', 'rotated_similar_tile_fixture', 'single_tile_tiling',

    # Serialization
    'dumps', 'load_tiling', 'save_tiling', 'tiling_from_dict',
]
