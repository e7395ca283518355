"""
Workloads Module

End-to-end simtile workloads for the benchmark runner. Each returns a small
outcome dict whose "ok" flag says whether the result met its expectation.
"""

from typing import Any, Callable, Dict

import numpy as np
from scipy.stats import ortho_group

from simtile.config import Thresholds
from simtile.examples import (
    cone_spindle_tag_tilings,
    cone_spindle_tiling,
    quarter_square_tiling,
    rotated_similar_tile_fixture,
)
from simtile.geometry import (
    ConeSpindle,
    Hyperplane,
    Polytope,
    estimate_extremal_points,
    move_fixed_point,
    normalize_to_homothety,
    slice_tiling,
    tip_simplex,
    validate_tiling,
)
from simtile.geometry.constructions import fixed_point_error


def run_cone_validation(n: int = 4, samples: int = 200_000, workers: int = 1) -> Dict[str, Any]:
    """Validate the cone-spindle tiling of dimension n."""
    report = validate_tiling(cone_spindle_tiling(n), samples, seed=0, workers=workers)
    return {"ok": report.covered and report.proper, "volume_gap": report.volume_gap}


def run_tip_simplex(n: int = 5) -> Dict[str, Any]:
    tip = tip_simplex(cone_spindle_tag_tilings(n))
    return {"ok": tip.affine_dim == n - 3 and tip.nondegenerate_for is None, "affine_dim": tip.affine_dim}


def run_normalization(samples: int = 50_000) -> Dict[str, Any]:
    """Normalize the rotated fixture and revalidate the result."""
    t = rotated_similar_tile_fixture()
    result = normalize_to_homothety(t, 0)
    report = validate_tiling(result, samples, seed=1)
    error = fixed_point_error(result, [0.4, 0.2])
    return {"ok": report.covered and error < 1e-7, "tiles": len(result), "error": error}


def run_fixed_point_moves(targets: int = 50, seed: int = 7) -> Dict[str, Any]:
    """Move the quarter-square fixed point to random diagonal targets."""
    anchors = [quarter_square_tiling((0, 0)), quarter_square_tiling((1, 1))]
    worst = 0.0
    for t in np.random.default_rng(seed).uniform(0.05, 0.95, targets):
        worst = max(worst, fixed_point_error(move_fixed_point(anchors, [t, t], eps=1e-9), [t, t]))
    return {"ok": worst < 1e-9, "worst_error": worst}


def run_extremal(polytopes: int = 10, m: int = 512) -> Dict[str, Any]:
    """Saturation on random polytopes, none on the disk and the 3-D cone-spindle."""
    saturated = 0
    for index in range(polytopes):
        dim = 2 + index % 3
        corners = np.vstack([np.eye(dim), -np.eye(dim)])
        rotation = ortho_group.rvs(dim, random_state=np.random.default_rng(index))
        polytope = Polytope.from_vertices(corners @ rotation.T)
        estimate = estimate_extremal_points(polytope, m, 1e-6, seed=index)
        saturated += estimate.saturated and estimate.clusters == 2 * dim
    curved = [estimate_extremal_points(ConeSpindle(n), m, 1e-6).saturated for n in (2, 3)]
    return {"ok": saturated == polytopes and not any(curved), "saturated": saturated}


def run_slice(n: int = 4, samples: int = 50_000) -> Dict[str, Any]:
    """Slice the cone-spindle tiling through both tips and validate the slice."""
    h = Hyperplane.from_normal([np.cos(0.7), np.sin(0.7), 0.3, 0.3], 0.3)
    _, induced = slice_tiling(cone_spindle_tiling(n), h, seed=2)
    report = validate_tiling(induced, samples, seed=3, thresholds=Thresholds(volume_gap=0.02, overlap=0.02))
    return {"ok": report.covered and len(induced.tagged_indices) == 2, "tiles": len(induced)}


# Map workload names to functions
WORKLOADS: Dict[str, Callable[..., Dict[str, Any]]] = {
    "cone-validation": run_cone_validation,
    "tip-simplex": run_tip_simplex,
    "normalization": run_normalization,
    "move-fixpoint": run_fixed_point_moves,
    "extremal": run_extremal,
    "slice": run_slice,
}
