"""
Tests for the tiling document format.
"""
import orjson
import pytest

from simtile.errors import FormatError
from simtile.geometry.bodies import bodies_equal
from simtile.geometry.core import nested_close
from simtile.geometry.tilings import iterate_tiling
from simtile.serialization import dumps, load_tiling, load_tilings, save_tiling, tiling_from_dict


def square_document():
    return {
        "ambient": {
            "type": "polytope",
            "halfspaces": [
                {"normal": [1.0, 0.0], "offset": 1.0},
                {"normal": [0.0, 1.0], "offset": 1.0},
                {"normal": [-1.0, 0.0], "offset": 0.0},
                {"normal": [0.0, -1.0], "offset": 0.0},
            ],
        },
        "tiles": [
            {
                "body": {
                    "type": "image",
                    "map": {"scale": 0.5, "rotation": "I", "translation": [0.0, 0.0]},
                    "base": {"type": "cone_spindle", "dim": 2},
                }
            }
        ],
    }


def test_save_and_load(tmp_path, rotated_fixture):
    path = save_tiling(rotated_fixture, tmp_path / "nested" / "rotated.json")
    loaded = load_tiling(path)
    assert nested_close(loaded.to_dict(), rotated_fixture.to_dict())
    assert loaded.tagged_indices == [0]


def test_saved_files_are_stable(tmp_path, quarter_00):
    iterated = iterate_tiling(quarter_00, 0)
    first = save_tiling(iterated, tmp_path / "a.json").read_bytes()
    second = save_tiling(load_tiling(tmp_path / "a.json"), tmp_path / "b.json").read_bytes()
    assert first == second
    assert first.endswith(b"\n")


def test_cone_spindle_tiling_loads(tmp_path, cone_spindles):
    path = save_tiling(cone_spindles[5], tmp_path / "cone.json")
    loaded = load_tiling(path)
    assert bodies_equal(loaded.ambient, cone_spindles[5].ambient)
    assert loaded.tagged_indices == cone_spindles[5].tagged_indices


def test_dumps_sorts_keys():
    assert dumps({"b": 1, "a": [1.0, 2.0]}).startswith(b'{\n  "a"')


def test_load_many(tmp_path, quarter_00, quarter_11):
    paths = [save_tiling(quarter_00, tmp_path / "q00.json"), save_tiling(quarter_11, tmp_path / "q11.json")]
    loaded = load_tilings(paths)
    assert [t.first_tagged() for t in loaded] == [0, 3]


def test_identity_rotation_shorthand():
    tiling = tiling_from_dict(square_document())
    assert len(tiling) == 1


def test_missing_file(tmp_path):
    with pytest.raises(FormatError) as excinfo:
        load_tiling(tmp_path / "absent.json")
    assert excinfo.value.field == "<document>"


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_bytes(b"{not json")
    with pytest.raises(FormatError) as excinfo:
        load_tiling(path)
    assert "invalid JSON" in excinfo.value.reason


def test_unknown_body_type():
    document = square_document()
    document["ambient"]["type"] = "sphere"
    with pytest.raises(FormatError) as excinfo:
        tiling_from_dict(document)
    assert excinfo.value.field.startswith("ambient")


def test_unknown_field_is_rejected():
    document = square_document()
    document["tiles"][0]["colour"] = "red"
    with pytest.raises(FormatError) as excinfo:
        tiling_from_dict(document)
    assert excinfo.value.field == "tiles.0.colour"


def test_non_unit_normal_reports_path():
    document = square_document()
    document["ambient"]["halfspaces"][2]["normal"] = [-2.0, 0.0]
    with pytest.raises(FormatError) as excinfo:
        tiling_from_dict(document, "square.json")
    assert excinfo.value.path == "square.json"
    assert excinfo.value.field == "ambient.halfspaces.2"


def test_bad_rotation_reports_path():
    document = square_document()
    document["tiles"][0]["body"]["map"]["rotation"] = [[1.0, 0.2], [0.0, 1.0]]
    with pytest.raises(FormatError) as excinfo:
        tiling_from_dict(document)
    assert excinfo.value.field == "tiles.0.body.map"


def test_empty_tile_list():
    document = square_document()
    document["tiles"] = []
    with pytest.raises(FormatError) as excinfo:
        tiling_from_dict(document)
    assert excinfo.value.field == "tiles"


def test_mismatched_tag_is_rejected(quarter_00):
    document = orjson.loads(dumps(quarter_00.to_dict()))
    document["tiles"][0]["similarity_to_ambient"]["scale"] = 0.25
    with pytest.raises(FormatError) as excinfo:
        tiling_from_dict(document)
    assert excinfo.value.field == "tiles"
