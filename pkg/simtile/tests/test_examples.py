"""
Tests for the example constructions and the shipped fixture files.
"""
from math import factorial, pi

import numpy as np
import orjson
import pytest

from simtile.errors import InvalidGeometry
from simtile.examples import (
    EXAMPLES,
    build_example,
    cone_spindle_tag_tilings,
    cone_spindle_tiling,
    cone_spindle_volume,
    orthant_tiling,
    parse_corner,
    write_fixtures,
)
from simtile.geometry.bodies import volume
from simtile.geometry.core import nested_close
from simtile.geometry.sampling import uniform_box
from simtile.geometry.tilings import tip_simplex, validate_tiling
from simtile.serialization import load_tiling


def test_cone_spindle_volume():
    assert cone_spindle_volume(3) == pytest.approx(pi / 3.0)
    assert cone_spindle_volume(6) == pytest.approx(2.0 * pi / factorial(6))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_cone_spindle_tile_counts(cone_spindles, n):
    t = cone_spindles[n]
    assert len(t) == n - 1
    assert t.tagged_indices == list(range(n - 2))
    assert all(t.tag(i).scale == 0.5 for i in t.tagged_indices)


def test_cone_spindle_needs_three_dimensions():
    with pytest.raises(InvalidGeometry):
        cone_spindle_tiling(2)


@pytest.mark.slow
@pytest.mark.timeout(600)
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_cone_spindle_tilings_validate(cone_spindles, n):
    report = validate_tiling(cone_spindles[n], samples=1_000_000, seed=0, workers=4)
    assert report.covered
    assert report.proper
    assert report.volume_gap < 0.01


@pytest.mark.parametrize("n", [4, 5, 6])
def test_cone_spindle_tip_dimension(n):
    tip = tip_simplex(cone_spindle_tag_tilings(n))
    assert tip.affine_dim == n - 3
    assert len(tip.points) == n - 2


@pytest.mark.slow
def test_cone_spindle_volume_split(cone_spindles):
    t = cone_spindles[3]
    total = cone_spindle_volume(3)
    tip = volume(t.tiles[0].body, samples=400_000, seed=1)
    rest = volume(t.tiles[1].body, samples=400_000, seed=2)
    assert abs(tip.value - total / 8.0) < 4.0 * tip.std_error
    assert abs(rest.value - 7.0 * total / 8.0) < 4.0 * rest.std_error


def test_parse_corner():
    assert parse_corner("0,1", 2) == (0, 1)
    assert parse_corner([1, 1, 0], 3) == (1, 1, 0)
    with pytest.raises(InvalidGeometry):
        parse_corner("0,2", 2)
    with pytest.raises(InvalidGeometry):
        parse_corner((0,), 2)


def test_orthant_tiling_tags_the_corner():
    t = orthant_tiling(3, "1,0,1")
    assert len(t) == 8
    assert t.tagged_indices == [5]


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_fixture_files_match_builders(fixtures_dir, name):
    _, spec = EXAMPLES[name]
    loaded = load_tiling(fixtures_dir / f"{name}.json")
    built = build_example(name)
    assert nested_close(loaded.to_dict(), built.to_dict())
    assert len(loaded) == spec.expected.tile_count
    assert loaded.dim == spec.dim


def test_manifest_lists_every_example(fixtures_dir):
    manifest = orjson.loads((fixtures_dir / "manifest.json").read_bytes())
    assert sorted(manifest) == sorted(EXAMPLES)
    for name, (_, spec) in EXAMPLES.items():
        assert nested_close(manifest[name], spec.model_dump())


def test_unknown_example():
    with pytest.raises(InvalidGeometry):
        build_example("dodecahedron")


def test_write_fixtures(tmp_path):
    written = write_fixtures(tmp_path)
    assert written[-1].name == "manifest.json"
    assert len(written) == len(EXAMPLES) + 1
    for name in EXAMPLES:
        loaded = load_tiling(tmp_path / f"{name}.json")
        assert nested_close(loaded.to_dict(), build_example(name).to_dict())


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_tip_copies_stay_in_their_corner(cone_spindles, n, rng):
    t = cone_spindles[n]
    ambient = t.ambient
    lo, hi = ambient.bounding_box
    points = uniform_box(rng, lo, hi, 200_000)
    points = points[ambient.contains(points)]
    assert len(points) > 100
    for index in t.tagged_indices:
        image = t.tag(index)(points)
        assert ambient.contains(image).all()
        assert t.tiles[index].body.contains(image).all()
        assert np.all(image[:, index + 2] >= 0.5 - 1e-12)
