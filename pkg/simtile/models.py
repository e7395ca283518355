"""
Document models for the tiling interchange format.

Bodies are a discriminated union on "type"; similarities may abbreviate an
identity rotation as "I".
"""

from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class Document(BaseModel):
    """Strict base: unknown fields and non-finite numbers are rejected."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class SimilarityModel(Document):
    scale: float
    rotation: Union[Literal["I"], List[List[float]]]
    translation: List[float] = Field(min_length=1)


class HyperplaneModel(Document):
    normal: List[float] = Field(min_length=1)
    offset: float


class HalfspaceModel(HyperplaneModel):
    pass


class ChartModel(Document):
    hyperplane: HyperplaneModel
    origin: List[float]
    frame: List[List[float]]


class PolytopeModel(Document):
    type: Literal["polytope"]
    halfspaces: List[HalfspaceModel] = Field(min_length=1)


class ConeSpindleModel(Document):
    type: Literal["cone_spindle"]
    dim: int = Field(ge=2)


class ImageModel(Document):
    type: Literal["image"]
    map: SimilarityModel
    base: "BodyModel"


class IntersectionModel(Document):
    type: Literal["intersection"]
    parts: List["BodyModel"] = Field(min_length=1)
    halfspaces: List[HalfspaceModel] = []


class SectionModel(Document):
    type: Literal["section"]
    base: "BodyModel"
    chart: ChartModel


BodyModel = Annotated[
    Union[PolytopeModel, ConeSpindleModel, ImageModel, IntersectionModel, SectionModel],
    Field(discriminator="type"),
]


class TileModel(Document):
    body: BodyModel
    similarity_to_ambient: Optional[SimilarityModel] = None


class TilingModel(Document):
    ambient: BodyModel
    tiles: List[TileModel] = Field(min_length=1)


for _model in (ImageModel, IntersectionModel, SectionModel, TileModel, TilingModel):
    _model.model_rebuild()
