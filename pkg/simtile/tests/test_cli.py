"""
Tests for the simtile command line.
"""
import orjson
import pandas as pd
import pytest

from simtile import cli
from simtile.cli import EXIT_ERROR, EXIT_INVALID, EXIT_OK, dump_slice_cloud, run
from simtile.serialization import load_tiling, tiling_from_dict


def invoke(capsysbinary, *argv):
    """Run one command; returns (exit code, parsed stdout or None, stderr text)."""
    code = run([str(arg) for arg in argv])
    captured = capsysbinary.readouterr()
    document = orjson.loads(captured.out) if captured.out else None
    return code, document, captured.err.decode()


@pytest.fixture
def example_file(tmp_path, capsysbinary):
    """Factory writing an example tiling through the CLI."""

    def make(kind, *options):
        path = tmp_path / f"{kind}{'_'.join(str(o) for o in options).replace(',', '')}.json"
        code, _, _ = invoke(capsysbinary, "example", kind, *options, "-o", path)
        assert code == EXIT_OK
        return path

    return make


def test_example_to_stdout(capsysbinary):
    code, document, _ = invoke(capsysbinary, "example", "quarter-square", "--corner", "1,1")
    assert code == EXIT_OK
    tiling = tiling_from_dict(document)
    assert tiling.tagged_indices == [3]


def test_example_to_file(tmp_path, capsysbinary):
    path = tmp_path / "cone.json"
    code, document, _ = invoke(capsysbinary, "example", "cone-spindle", "--dim", "5", "-o", path)
    assert code == EXIT_OK
    assert document == {"path": str(path), "tiles": 4, "tagged": [0, 1, 2], "dim": 5}
    assert len(load_tiling(path)) == 4


def test_validate_accepts_quarter_squares(example_file, capsysbinary):
    path = example_file("quarter-square")
    code, report, _ = invoke(capsysbinary, "validate", path, "--samples", 20000, "--seed", 1)
    assert code == EXIT_OK
    assert report["covered"] and report["proper"]
    assert report["samples"] == 20000


def test_validate_flags_improper_tiling(example_file, capsysbinary):
    path = example_file("single-tile")
    code, report, _ = invoke(capsysbinary, "validate", path, "--samples", 5000)
    assert code == EXIT_INVALID
    assert report["covered"] and not report["proper"]


def test_validate_output_is_reproducible(example_file, capsysbinary):
    path = example_file("rotated-fixture")
    run(["validate", str(path), "--samples", "30000", "--seed", "4"])
    first = capsysbinary.readouterr().out
    run(["validate", str(path), "--samples", "30000", "--seed", "4"])
    second = capsysbinary.readouterr().out
    run(["--workers", "4", "validate", str(path), "--samples", "30000", "--seed", "4"])
    threaded = capsysbinary.readouterr().out
    assert first == second == threaded


def test_workers_flag_reaches_validation(example_file, capsysbinary, mocker):
    path = example_file("quarter-square")
    spy = mocker.spy(cli, "validate_tiling")
    invoke(capsysbinary, "--workers", 3, "validate", path, "--samples", 2000)
    assert spy.call_args.kwargs["workers"] == 3


def test_iterate_twice(tmp_path, example_file, capsysbinary):
    path = example_file("quarter-square")
    once = tmp_path / "once.json"
    code, document, _ = invoke(capsysbinary, "iterate", path, "--tile", 0, "-o", once)
    assert code == EXIT_OK and document["tiles"] == 7
    code, document, _ = invoke(capsysbinary, "iterate", once, "--tile", 0, "--pattern", path)
    assert code == EXIT_OK
    assert len(tiling_from_dict(document)) == 10


def test_iterate_untagged_tile(example_file, capsysbinary):
    path = example_file("quarter-square")
    code, document, err = invoke(capsysbinary, "iterate", path, "--tile", 2)
    assert code == EXIT_ERROR
    assert document is None
    assert "UntaggedTile" in err


def test_meet(example_file, capsysbinary):
    left = example_file("quarter-square")
    right = example_file("quarter-square", "--corner", "1,1")
    code, document, _ = invoke(capsysbinary, "meet", left, right)
    assert code == EXIT_OK
    assert len(tiling_from_dict(document)) == 4


def test_normalize_boundary_tag(example_file, capsysbinary):
    path = example_file("quarter-square")
    code, document, _ = invoke(capsysbinary, "normalize", path, "--tile", 0)
    assert code == EXIT_OK
    assert document["plan"]["location"] == "boundary"
    assert document["polytope_certified"] is False
    assert document["result"]["tagged"] and len(document["result"]["tagged"]) == 1


@pytest.mark.slow
def test_normalize_rotated_fixture(tmp_path, example_file, capsysbinary):
    path = example_file("rotated-fixture")
    out = tmp_path / "normalized.json"
    with pytest.warns(UserWarning):
        code, document, _ = invoke(capsysbinary, "normalize", path, "--tile", 0, "-o", out)
    assert code == EXIT_OK
    assert document["polytope_certified"] is True
    assert document["plan"]["iterations"] == 4
    result = load_tiling(out)
    assert result.tag(result.first_tagged()).to_dict()["rotation"] == "I"


def test_move_fixpoint(example_file, capsysbinary):
    left = example_file("quarter-square")
    right = example_file("quarter-square", "--corner", "1,1")
    target = "0.3333333333333333,0.3333333333333333"
    code, document, _ = invoke(capsysbinary, "move-fixpoint", left, right, "--target", target, "--eps", 1e-9)
    assert code == EXIT_OK
    assert document["plan"]["steps"] == 1
    assert document["error"] < 1e-12


def test_move_fixpoint_outside_hull(example_file, capsysbinary):
    left = example_file("quarter-square")
    right = example_file("quarter-square", "--corner", "1,1")
    code, _, err = invoke(capsysbinary, "move-fixpoint", left, right, "--target", "1,0", "--eps", 1e-6)
    assert code == EXIT_ERROR
    assert "TargetOutsideHull" in err


def test_tip_simplex_of_quarter_pair(example_file, capsysbinary):
    left = example_file("quarter-square")
    right = example_file("quarter-square", "--corner", "1,1")
    code, document, _ = invoke(capsysbinary, "tip-simplex", left, right, "--require-nondegenerate")
    assert code == EXIT_OK
    assert document["affine_dim"] == 1
    assert document["nondegenerate_for"] == 2


def test_tip_simplex_of_cone_spindle_is_degenerate(example_file, capsysbinary):
    path = example_file("cone-spindle", "--dim", 4)
    code, document, _ = invoke(capsysbinary, "tip-simplex", path, path, "--tags", "0,1", "--require-nondegenerate")
    assert code == EXIT_INVALID
    assert document["affine_dim"] == 1
    assert document["nondegenerate_for"] is None


def test_slice_with_cloud(tmp_path, example_file, capsysbinary):
    path = example_file("cone-spindle", "--dim", 3)
    cloud_path = tmp_path / "cloud.csv"
    code, document, _ = invoke(
        capsysbinary, "slice", path, "--normal", "0,0,1", "--offset", 0.25, "--cloud", cloud_path, "--resolution", 32
    )
    assert code == EXIT_OK
    assert document["result"]["tiles"] == 1
    assert document["proper"] is False
    assert document["cloud"]["points"] == 32
    cloud = pd.read_csv(cloud_path)
    assert list(cloud.columns) == ["tile", "y0", "y1"]


def test_slice_missing_body(example_file, capsysbinary):
    path = example_file("cone-spindle", "--dim", 3)
    code, document, err = invoke(capsysbinary, "slice", path, "--normal", "0,0,1", "--offset", 2)
    assert code == EXIT_INVALID
    assert document is None
    assert "outside" in err


def test_dump_slice_cloud(tmp_path, example_file):
    path = example_file("orthant", "--dim", 3)
    cloud = dump_slice_cloud(str(path), [0.0, 0.0, 2.0], 0.5, 8, str(tmp_path / "out" / "cubes.csv"))
    assert sorted(cloud["tile"].unique()) == [0, 1, 2, 3]
    written = pd.read_csv(tmp_path / "out" / "cubes.csv")
    pd.testing.assert_frame_equal(written, cloud)


def test_extremal(example_file, capsysbinary):
    path = example_file("quarter-square")
    code, document, _ = invoke(capsysbinary, "extremal", path, "--directions", 64, "--delta", 1e-6)
    assert code == EXIT_OK
    assert document["saturated"] is True
    assert document["clusters"] == 4


@pytest.mark.parametrize("command", ["extremal", "iterate"])
@pytest.mark.parametrize("tile", [9, -1])
def test_bad_tile_index(example_file, capsysbinary, tmp_path, command, tile):
    path = example_file("quarter-square")
    extra = ["--directions", 64, "--delta", 1e-6] if command == "extremal" else ["-o", tmp_path / "out.json"]
    code, document, err = invoke(capsysbinary, command, path, "--tile", tile, *extra)
    assert code == EXIT_ERROR
    assert document is None
    assert "PreconditionError" in err


def test_extremal_in_three_dimensions(example_file, capsysbinary):
    path = example_file("cone-spindle", "--dim", 3)
    code, document, _ = invoke(capsysbinary, "extremal", path, "--directions", 512, "--delta", 1e-6)
    assert code == EXIT_OK
    assert document["directions_sampled"] >= 512
    assert document["saturated"] is False


def test_missing_input_file(tmp_path, capsysbinary):
    code, document, err = invoke(capsysbinary, "validate", tmp_path / "absent.json")
    assert code == EXIT_ERROR
    assert document is None
    assert "FormatError" in err


@pytest.mark.parametrize(
    "argv",
    [["frobnicate"], ["example", "hexagon"], ["move-fixpoint", "a.json", "--target", "x,y", "--eps", "1"], []],
    ids=["unknown-command", "unknown-example", "bad-target", "no-command"],
)
def test_usage_errors(capsysbinary, argv):
    code, document, err = invoke(capsysbinary, *argv)
    assert code == EXIT_ERROR
    assert document is None
    assert err.startswith("simtile")
