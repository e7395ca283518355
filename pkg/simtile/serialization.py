"""
Serialization Module

orjson encoding of tilings and reports, and validated decoding of tiling
documents into geometry objects. Output is indented with sorted keys, so equal
inputs give byte-identical files.
"""

from pathlib import Path
from typing import Any, Sequence, Tuple, Union

import numpy as np
import orjson
import structlog
from pydantic import BaseModel, ValidationError

from simtile.errors import FormatError, SimtileError, field_path
from simtile.geometry.bodies import Body, ConeSpindle, Image, Intersection, Polytope, Section
from simtile.geometry.charts import SliceChart
from simtile.geometry.core import Halfspace, Hyperplane, Similarity
from simtile.geometry.tilings import Tile, Tiling
from simtile.models import (
    ChartModel,
    ConeSpindleModel,
    HalfspaceModel,
    ImageModel,
    IntersectionModel,
    PolytopeModel,
    SectionModel,
    SimilarityModel,
    TilingModel,
)

logger = structlog.get_logger(__name__)

DUMP_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY

Loc = Tuple[Union[str, int], ...]


def dumps(document: Any) -> bytes:
    """Encode a document (dict, list or pydantic model) as stable JSON bytes."""
    if isinstance(document, BaseModel):
        document = document.model_dump()
    return orjson.dumps(document, option=DUMP_OPTIONS) + b"\n"


class _Builder:
    """Turns validated models into geometry, tagging failures with their field path."""

    def __init__(self, path: str):
        self.path = path

    def fail(self, loc: Loc, exc: Exception) -> FormatError:
        return FormatError(self.path, field_path(loc), str(exc))

    def similarity(self, model: SimilarityModel, loc: Loc) -> Similarity:
        translation = np.array(model.translation)
        rotation = np.eye(translation.size) if model.rotation == "I" else np.array(model.rotation)
        try:
            return Similarity(model.scale, rotation, translation)
        except (SimtileError, ValueError) as exc:
            raise self.fail(loc, exc) from exc

    def halfspace(self, model: HalfspaceModel, loc: Loc) -> Halfspace:
        try:
            return Halfspace(np.array(model.normal), model.offset)
        except SimtileError as exc:
            raise self.fail(loc, exc) from exc

    def chart(self, model: ChartModel, loc: Loc) -> SliceChart:
        try:
            hyperplane = Hyperplane(np.array(model.hyperplane.normal), model.hyperplane.offset)
            return SliceChart(hyperplane, np.array(model.origin), np.array(model.frame))
        except (SimtileError, ValueError) as exc:
            raise self.fail(loc, exc) from exc

    def body(self, model: Any, loc: Loc) -> Body:
        try:
            if isinstance(model, PolytopeModel):
                halfspaces = [self.halfspace(h, loc + ("halfspaces", i)) for i, h in enumerate(model.halfspaces)]
                return Polytope(halfspaces)
            if isinstance(model, ConeSpindleModel):
                return ConeSpindle(model.dim)
            if isinstance(model, ImageModel):
                return Image(self.similarity(model.map, loc + ("map",)), self.body(model.base, loc + ("base",)))
            if isinstance(model, IntersectionModel):
                parts = [self.body(part, loc + ("parts", i)) for i, part in enumerate(model.parts)]
                halfspaces = [self.halfspace(h, loc + ("halfspaces", i)) for i, h in enumerate(model.halfspaces)]
                return Intersection(parts, halfspaces)
            if isinstance(model, SectionModel):
                return Section(self.body(model.base, loc + ("base",)), self.chart(model.chart, loc + ("chart",)))
        except FormatError:
            raise
        except SimtileError as exc:
            raise self.fail(loc, exc) from exc
        raise self.fail(loc, TypeError(f"unsupported body model {type(model).__name__}"))

    def tiling(self, model: TilingModel) -> Tiling:
        ambient = self.body(model.ambient, ("ambient",))
        tiles = []
        for index, tile in enumerate(model.tiles):
            loc: Loc = ("tiles", index)
            body = self.body(tile.body, loc + ("body",))
            tag = None
            if tile.similarity_to_ambient is not None:
                tag = self.similarity(tile.similarity_to_ambient, loc + ("similarity_to_ambient",))
            tiles.append(Tile(body, tag))
        try:
            return Tiling(ambient, tiles)
        except SimtileError as exc:
            raise self.fail(("tiles",), exc) from exc


def tiling_from_dict(document: Any, path: str = "<memory>") -> Tiling:
    """
    Decode a tiling document

    Args:
        document: Parsed JSON
        path: Source name used in error messages

    Returns:
        Tiling

    Raises:
        FormatError: with the offending field path
    """
    try:
        model = TilingModel.model_validate(document)
    except ValidationError as exc:
        error = exc.errors()[0]
        raise FormatError(path, field_path(error["loc"]), error["msg"]) from exc
    return _Builder(path).tiling(model)


def load_tiling(path: Union[str, Path]) -> Tiling:
    """Read and decode a tiling file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise FormatError(str(path), "<document>", exc.strerror or str(exc)) from exc
    try:
        document = orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise FormatError(str(path), "<document>", f"invalid JSON: {exc}") from exc
    tiling = tiling_from_dict(document, str(path))
    logger.debug("load_tiling", path=str(path), tiles=len(tiling.tiles))
    return tiling


def load_tilings(paths: Sequence[Union[str, Path]]) -> list:
    return [load_tiling(path) for path in paths]


def save_tiling(tiling: Tiling, path: Union[str, Path]) -> Path:
    """Write a tiling in the canonical format."""
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(tiling.to_dict()))
    logger.debug("save_tiling", path=str(path), tiles=len(tiling.tiles))
    return path
