"""
Tests for vectors, hyperplanes and similarities.
"""
import numpy as np
import pytest

from simtile.errors import (
    DimensionMismatch,
    InvalidGeometry,
    NoUniqueFixedPoint,
    NotFoundWithinBudget,
    NumericalFailure,
)
from simtile.geometry.core import (
    Halfspace,
    Hyperplane,
    Similarity,
    as_vector,
    check_fixed_point,
    compose,
    fixed_point,
    fixed_point_condition,
    invert,
    nested_close,
    power,
    power_near_identity,
    rotation_2d,
    similarity_close,
)

QUARTER_TURN = np.array([[0.0, -1.0], [1.0, 0.0]])


def random_similarity(rng, dim=2, scale=None):
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return Similarity(scale or rng.uniform(0.2, 0.9), q, rng.uniform(-1, 1, dim))


def test_as_vector_validation():
    """Vectors must be finite, nonempty and of the expected dimension."""
    assert as_vector([1, 2]).dtype == np.float64
    with pytest.raises(InvalidGeometry):
        as_vector([1.0, float("nan")])
    with pytest.raises(InvalidGeometry):
        as_vector([])
    with pytest.raises(DimensionMismatch):
        as_vector([1.0, 2.0], dim=3)


def test_hyperplane_requires_unit_normal():
    with pytest.raises(InvalidGeometry):
        Hyperplane(np.array([1.0, 1.0]), 0.0)
    h = Hyperplane.from_normal([3.0, 4.0], 10.0)
    assert np.allclose(h.normal, [0.6, 0.8])
    assert h.offset == pytest.approx(2.0)
    assert h.signed_distance([0.6, 0.8])[0] == pytest.approx(-1.0)
    assert np.allclose(h.project([0.0, 0.0]), [1.2, 1.6])


def test_halfspace_contains_boundary():
    h = Halfspace(np.array([1.0, 0.0]), 0.5)
    assert h.contains([[0.5, 3.0], [0.2, 0.0], [0.6, 0.0]]).tolist() == [True, True, False]
    assert isinstance(h.boundary, Hyperplane)


def test_similarity_invariants():
    with pytest.raises(InvalidGeometry):
        Similarity(0.0, np.eye(2), np.zeros(2))
    with pytest.raises(InvalidGeometry):
        Similarity(0.5, np.array([[1.0, 0.1], [0.0, 1.0]]), np.zeros(2))
    with pytest.raises(DimensionMismatch):
        Similarity(0.5, np.eye(3), np.zeros(2))


def test_homothety_maps_about_center():
    h = Similarity.homothety(0.5, [1.0, 1.0])
    assert np.allclose(h([0.0, 0.0]), [0.5, 0.5])
    assert np.allclose(h([1.0, 1.0]), [1.0, 1.0])
    assert h.is_homothety
    assert h.to_dict()["rotation"] == "I"


def test_apply_handles_point_arrays(rng):
    f = random_similarity(rng)
    points = rng.uniform(-1, 1, (5, 2))
    mapped = f.apply(points)
    assert mapped.shape == (5, 2)
    assert np.allclose(mapped[3], f.apply(points[3]))
    assert np.allclose(f.apply_inverse(mapped), points)


def test_compose_matches_sequential_application(rng):
    """compose(f, g) applies g first."""
    f, g = random_similarity(rng), random_similarity(rng)
    x = rng.uniform(-1, 1, 2)
    assert np.allclose(compose(f, g)(x), f(g(x)))
    assert compose(f, g).scale == pytest.approx(f.scale * g.scale)


def test_compose_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatch):
        compose(Similarity.identity(2), Similarity.identity(3))


def test_invert_round_trip(rng):
    f = random_similarity(rng, dim=3)
    assert similarity_close(compose(f, invert(f)), Similarity.identity(3), tol=1e-12)
    assert similarity_close(power(f, -1), invert(f), tol=1e-12)


def test_long_compositions_stay_orthogonal():
    step = Similarity(0.99, rotation_2d(0.3), np.array([0.01, 0.0]))
    composed = power(step, 200)
    drift = np.max(np.abs(composed.rotation.T @ composed.rotation - np.eye(2)))
    assert drift < 1e-12


def test_fixed_point_of_quarter_turn_tag():
    """f(x) = 1/2 R x + (1/2, 0) fixes (0.4, 0.2)."""
    f = Similarity(0.5, QUARTER_TURN, np.array([0.5, 0.0]))
    point = fixed_point(f)
    assert np.allclose(point, [0.4, 0.2], atol=1e-12)
    assert np.allclose(f(point), point, atol=1e-12)
    assert fixed_point_condition(f) < 10


@pytest.mark.parametrize("dim", [1, 2, 3, 5])
def test_fixed_point_of_contractions(rng, dim):
    f = random_similarity(rng, dim=dim)
    point = fixed_point(f)
    assert np.linalg.norm(f(point) - point) < 1e-10


@pytest.mark.parametrize(
    "similarity",
    [
        Similarity.identity(2),
        Similarity(1.0, np.eye(2), np.array([1.0, 0.0])),
        Similarity(1.0, np.diag([1.0, -1.0]), np.zeros(2)),
    ],
    ids=["identity", "translation", "reflection"],
)
def test_no_unique_fixed_point(similarity):
    with pytest.raises(NoUniqueFixedPoint):
        fixed_point(similarity)


def test_fixed_point_residual_is_enforced():
    f = Similarity(0.5, QUARTER_TURN, np.array([0.5, 0.0]))
    assert check_fixed_point(f, np.array([0.4, 0.2])) < 1e-12
    with pytest.raises(NumericalFailure):
        check_fixed_point(f, np.array([0.4, 0.2 + 1e-6]))


def test_power_near_identity():
    assert power_near_identity(QUARTER_TURN, 1e-9, 10) == 4
    assert power_near_identity(rotation_2d(np.pi / 3), 1e-9, 10) == 6
    assert power_near_identity(np.eye(3), 0.1, 1) == 1


def test_power_near_identity_fifth_turn():
    assert power_near_identity(rotation_2d(2.0 * np.pi / 5.0), 1e-9, 10) == 5


def test_power_near_identity_irrational_angle():
    """Rotation by one radian first comes within 0.01 of I after 333 = 53 full turns."""
    rotation = rotation_2d(1.0)
    k = power_near_identity(rotation, 0.01, 1000)
    assert k == 333
    close = [np.max(np.abs(np.linalg.matrix_power(rotation, j) - np.eye(2))) < 0.01 for j in range(1, k + 1)]
    assert close.index(True) == k - 1


def test_power_near_identity_budget():
    with pytest.raises(NotFoundWithinBudget) as excinfo:
        power_near_identity(rotation_2d(1.0), 1e-12, 5)
    assert excinfo.value.budget == 5


def test_nested_close():
    assert nested_close({"a": [1.0, 2.0]}, {"a": [1.0, 2.0 + 1e-13]})
    assert not nested_close({"a": [1.0]}, {"a": [1.0, 2.0]})
    assert not nested_close({"a": "I"}, {"a": [[1.0]]})
