"""
Tiling Geometry Package

Modules, bottom-up:
1. core - Vectors, hyperplanes, halfspaces, similarities and fixed points
2. charts - Isometric charts of hyperplanes
3. sampling - Counter-based random streams and chunked sample loops
4. bodies - Convex bodies: polytopes, cone spindles, images, intersections, sections
5. tilings - Tilings, validation, iteration, meet, transport and tip simplices
6. constructions - Homothety normalization and fixed-point relocation
7. slicing - Induced tilings on hyperplane sections
"""

from .core import (
    Halfspace,
    Hyperplane,
    Similarity,
    as_vector,
    compose,
    fixed_point,
    fixed_point_condition,
    invert,
    nested_close,
    power_near_identity,
)
from .charts import SliceChart
from .bodies import (
    Body,
    ConeSpindle,
    ExtremalEstimate,
    Image,
    Intersection,
    Location,
    Polytope,
    Section,
    VolumeEstimate,
    bodies_equal,
    bounding_radius_about,
    estimate_extremal_points,
    find_interior_point,
    membership,
    support,
    to_polytope,
    volume,
)
from .tilings import (
    Tile,
    Tiling,
    TipSimplex,
    ValidationReport,
    classify_fixed_point,
    iterate_tiling,
    meet_tilings,
    tag_fixed_points,
    tip_simplex,
    transform_tiling,
    validate_tiling,
)
from .constructions import (
    MovePlan,
    NormalizationPlan,
    move_fixed_point,
    normalize_to_homothety,
    plan_fixed_point_move,
    plan_normalization,
)
from .slicing import slice_boundary_cloud, slice_tiling

__all__ = [
    # Core
    'Halfspace', 'Hyperplane', 'Similarity', 'as_vector', 'compose', 'fixed_point',
    'fixed_point_condition', 'invert', 'nested_close', 'power_near_identity',

    # Charts
    'SliceChart',

    # Bodies
    'Body', 'ConeSpindle', 'ExtremalEstimate', 'Image', 'Intersection', 'Location', 'Polytope',
    'Section', 'VolumeEstimate', 'bodies_equal', 'bounding_radius_about', 'estimate_extremal_points',
    'find_interior_point', 'membership', 'support', 'to_polytope', 'volume',

    # Tilings
    'Tile', 'Tiling', 'TipSimplex', 'ValidationReport', 'classify_fixed_point', 'iterate_tiling',
    'meet_tilings', 'tag_fixed_points', 'tip_simplex', 'transform_tiling', 'validate_tiling',

    # Constructions
    'MovePlan', 'NormalizationPlan', 'move_fixed_point', 'normalize_to_homothety',
    'plan_fixed_point_move', 'plan_normalization',

    # Slicing
    'slice_boundary_cloud', 'slice_tiling',
]
