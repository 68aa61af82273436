"""
Models for lacunary cross-section construction
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.exactnum import ONE, QuadNum, ZERO
from models.geometry import Point, Rect, RectModel


class LacunaryConfig(BaseModel):
    """Bodies and candidate stream of a greedy maximal extension"""
    body: Rect = Field(..., description="Lacunarity body U, symmetric about 0")
    enlargement: Optional[Rect] = Field(None, description="Enlargement body V; the whole window when absent")
    mesh: QuadNum = Field(ONE, description="Grid mesh of the first round, halved every round")
    offset: QuadNum = Field(ZERO, description="Offset of the grid from the lower corner of the region")
    seed: Optional[int] = Field(None, description="Shuffle seed for the order within a round; lexicographic when absent")
    region: Optional[Rect] = Field(None, description="Where candidates are drawn; the window's region when absent")
    closed: bool = Field(False, description="Also admit candidates on the upper faces of the region")
    candidates: Optional[List[Tuple[QuadNum, ...]]] = Field(None, description="Explicit stream replacing the grid")

    model_config = ConfigDict(frozen=True)

    @field_validator("body")
    @classmethod
    def body_symmetric(cls, v: Rect) -> Rect:
        if not v.is_symmetric():
            raise ValueError("lacunarity body must be symmetric about 0")
        return v

    @field_validator("mesh")
    @classmethod
    def mesh_positive(cls, v: QuadNum) -> QuadNum:
        if v.sign() <= 0:
            raise ValueError("mesh must be positive")
        return v


@dataclass(frozen=True)
class IndependencePartition:
    """Color classes of the graph y in W + x"""
    classes: Tuple[Tuple[Point, ...], ...]
    colors: Dict[Point, int]

    def __len__(self) -> int:
        return len(self.classes)


class CocompactnessCertificate(BaseModel):
    """Whether the extended section is U+U-cocompact on the window"""
    body: RectModel
    holds: bool
    radius: QuadNum = Field(..., description="Sup-radius of the certified covering body")


class CrossSectionReport(BaseModel):
    """JSON output of the cross-section command"""
    points: List[List[QuadNum]]
    lacunarity_body: RectModel
    lacunary: bool
    cocompactness_radius_certificate: CocompactnessCertificate
    rounds: int
