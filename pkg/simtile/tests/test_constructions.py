"""
Tests for the homothety normalization and the fixed-point relocation.
"""
import numpy as np
import pytest

from simtile.errors import (
    EpsNotFound,
    InteriorFixedPointWarning,
    PreconditionError,
    StepBudgetExceeded,
    TargetOutsideHull,
)
from simtile.geometry.constructions import (
    composed_fixed_point,
    find_eps,
    fixed_point_error,
    hull_distance,
    move_fixed_point,
    normalize_to_homothety,
    plan_fixed_point_move,
    plan_normalization,
)
from simtile.geometry.core import Similarity, compose, fixed_point
from simtile.geometry.bodies import Polytope
from simtile.geometry.tilings import Tile, Tiling, transform_tiling, validate_tiling


def test_rotated_fixture_plan(rotated_fixture):
    with pytest.warns(InteriorFixedPointWarning):
        plan = plan_normalization(rotated_fixture, 0)
    assert plan.location == "inside"
    assert np.allclose(plan.fixed_point, [0.4, 0.2], atol=1e-12)
    assert plan.eps == pytest.approx(0.09, rel=0.08)
    assert plan.radius == pytest.approx(1.0, abs=1e-6)
    assert plan.iterations == 4
    assert plan.ratio == pytest.approx(0.69, abs=0.05)
    assert plan.ratio < 1.0


@pytest.mark.slow
@pytest.mark.timeout(300)
def test_normalize_rotated_fixture(rotated_fixture):
    with pytest.warns(InteriorFixedPointWarning):
        result = normalize_to_homothety(rotated_fixture, 0)
    assert len(result.tagged_indices) == 1
    tag = result.tag(result.first_tagged())
    assert tag.is_homothety
    assert np.array_equal(tag.rotation, np.eye(2))
    assert 0.0 < tag.scale < 1.0
    assert fixed_point_error(result, [0.4, 0.2]) < 1e-7
    report = validate_tiling(result, samples=50_000, seed=13)
    assert report.covered


def test_normalize_boundary_fixed_point(quarter_00, recwarn):
    plan = plan_normalization(quarter_00, 0)
    assert plan.location == "boundary"
    assert plan.eps == pytest.approx(0.225)
    assert plan.iterations == 3
    assert not any(issubclass(w.category, InteriorFixedPointWarning) for w in recwarn)
    result = normalize_to_homothety(quarter_00, 0, plan=plan)
    assert fixed_point_error(result, [0.0, 0.0]) < 1e-12
    assert result.tag(result.first_tagged()).scale == pytest.approx(plan.ratio)


def test_align_rotation_rounds_iterations(rotated_fixture):
    with pytest.warns(InteriorFixedPointWarning):
        plan = plan_normalization(rotated_fixture, 0, align_rotation=1e-9)
    assert plan.iterations % 4 == 0


def test_ratio_must_be_below_one(unit_square):
    tiling = Tiling(unit_square, [Tile.similar(Similarity.identity(2), unit_square)], check_tags=False)
    with pytest.raises(PreconditionError):
        plan_normalization(tiling, 0)


def test_fixed_point_outside_ambient(unit_square):
    tag = Similarity.homothety(0.5, [3.0, 3.0])
    tiling = Tiling(unit_square, [Tile.similar(tag, unit_square)], check_tags=False)
    with pytest.raises(PreconditionError):
        plan_normalization(tiling, 0)


def test_eps_not_found_when_tile_misses_fixed_point(unit_square):
    tile = Tile(Polytope.box([0.5, 0.5], [1.0, 1.0]), Similarity.homothety(0.5, [0.0, 0.0]))
    tiling = Tiling(unit_square, [tile], check_tags=False)
    with pytest.raises(EpsNotFound):
        find_eps(tiling, 0)


def test_composed_fixed_point():
    point = composed_fixed_point(0.5, np.zeros(2), 0.5, np.ones(2))
    assert np.allclose(point, [1.0 / 3.0, 1.0 / 3.0])
    f = Similarity.homothety(0.5, np.zeros(2))
    g = Similarity.homothety(0.25, np.array([1.0, 0.0]))
    expected = fixed_point(compose(f, g))
    assert np.allclose(composed_fixed_point(0.5, np.zeros(2), 0.25, np.array([1.0, 0.0])), expected)


def test_hull_distance():
    points = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert hull_distance(points, np.array([0.5, 0.5])) == pytest.approx(0.0, abs=1e-12)
    assert hull_distance(points, np.array([1.0, 0.0])) == pytest.approx(0.5)


def test_move_to_composed_fixed_point(quarter_00, quarter_11):
    target = [1.0 / 3.0, 1.0 / 3.0]
    plan = plan_fixed_point_move([quarter_00, quarter_11], target, eps=1e-9)
    assert plan.steps == 1
    assert plan.correction_anchor is None
    result = move_fixed_point([quarter_00, quarter_11], target, eps=1e-9, plan=plan)
    assert len(result) == 7
    assert result.tagged_indices == [3]
    assert fixed_point_error(result, target) < 1e-12
    assert result.tag(3).scale == pytest.approx(0.25)


def test_move_along_the_diagonal(quarter_00, quarter_11):
    rng = np.random.default_rng(7)
    for t in rng.uniform(0.05, 0.95, 50):
        target = [t, t]
        plan = plan_fixed_point_move([quarter_00, quarter_11], target, eps=1e-9)
        assert plan.steps <= 2
        result = move_fixed_point([quarter_00, quarter_11], target, eps=1e-9, plan=plan)
        assert len(result.tagged_indices) == 1
        tag = result.tag(result.first_tagged())
        assert tag.is_homothety
        assert 0.0 < tag.scale < 1.0
        assert fixed_point_error(result, target) < 1e-9


@pytest.mark.slow
def test_moved_tiling_still_covers(quarter_00, quarter_11):
    result = move_fixed_point([quarter_00, quarter_11], [0.6, 0.6], eps=1e-9)
    assert validate_tiling(result, samples=40_000, seed=21).covered


def test_move_in_three_dimensions(orthant_pair):
    target = [1.0 / 3.0] * 3
    result = move_fixed_point(list(orthant_pair), target, eps=1e-9)
    assert fixed_point_error(result, target) < 1e-12


def test_target_outside_hull(quarter_00, quarter_11):
    with pytest.raises(TargetOutsideHull):
        plan_fixed_point_move([quarter_00, quarter_11], [1.0, 0.0], eps=1e-6)


def test_step_budget(quarter_00, quarter_11):
    with pytest.raises(StepBudgetExceeded):
        plan_fixed_point_move([quarter_00, quarter_11], [0.3, 0.3], eps=1e-12, max_steps=0)


def test_anchors_must_be_homothetic(quarter_00, rotated_fixture):
    with pytest.raises(PreconditionError):
        plan_fixed_point_move([quarter_00, rotated_fixture], [0.2, 0.2], eps=1e-6)


def test_anchors_must_share_ambient(quarter_00, quarter_11):
    shifted = transform_tiling(Similarity(1.0, np.eye(2), np.array([2.0, 0.0])), quarter_11)
    with pytest.raises(PreconditionError):
        plan_fixed_point_move([quarter_00, shifted], [0.2, 0.2], eps=1e-6)
    with pytest.raises(PreconditionError):
        plan_fixed_point_move([], [0.2, 0.2], eps=1e-6)


def _segment_distance(a: np.ndarray, b: np.ndarray, point: np.ndarray) -> float:
    t = np.clip((point - a) @ (b - a) / ((b - a) @ (b - a)), 0.0, 1.0)
    return float(np.linalg.norm(point - (a + t * (b - a))))


@pytest.mark.parametrize("dim", [2, 3, 5])
def test_composed_homothety_fixes_a_point_on_the_anchor_segment(rng, dim):
    for _ in range(20):
        a, b = rng.uniform(-2.0, 2.0, (2, dim))
        ratio_a, ratio_b = rng.uniform(0.05, 0.95, 2)
        point = fixed_point(compose(Similarity.homothety(ratio_a, a), Similarity.homothety(ratio_b, b)))
        assert _segment_distance(a, b, point) < 1e-8
        assert np.allclose(point, composed_fixed_point(ratio_a, a, ratio_b, b), atol=1e-12)
