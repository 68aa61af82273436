"""
Measures on a window and on its cross-sections
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from core.exactnum import QuadNum, ZERO
from models.geometry import CrossSection, Point, Polygon, Rect, RectModel, Window


@dataclass(frozen=True)
class SampledCell:
    """Voronoi cell of a section point, measured by sampling (d >= 3)"""
    section: CrossSection
    owner: Point


# A domain piece: a rectangle, an exact convex polygon (d=2) or a sampled cell
Piece = Union[Rect, Polygon, SampledCell]


@dataclass(frozen=True)
class SectionMeasure:
    """Finitely supported measure on a cross-section"""
    weights: Dict[Point, QuadNum] = field(default_factory=dict)

    def __post_init__(self):
        for p, w in self.weights.items():
            if not w.is_rational() or w.sign() < 0:
                raise ValueError(f"weight of {p} must be a non-negative rational, got {w}")

    def __getitem__(self, p: Point) -> QuadNum:
        return self.weights.get(tuple(p), ZERO)

    def support(self) -> List[Point]:
        return sorted(p for p, w in self.weights.items() if w.sign() > 0)

    def total(self) -> QuadNum:
        return sum(self.weights.values(), ZERO)


@dataclass(frozen=True)
class BoundedTiling:
    """
    Domains W_c of a cross-section partitioning the window

    Every domain is a union of pieces inside the window's region and lies in
    c + body.
    """
    section: CrossSection
    domains: Dict[Point, Tuple[Piece, ...]]
    body: Rect

    @property
    def window(self) -> Window:
        return self.section.window


@dataclass(frozen=True)
class PhaseMeasure:
    """
    Weighted Lebesgue measure: sum of density times Lebesgue measure on pieces

    A non-zero shift evaluates the measure translated by that vector.
    """
    window: Window
    pieces: Tuple[Tuple[Piece, QuadNum], ...] = ()
    shift: Optional[Point] = None


# ============================================
# Reports
# ============================================

class WeightModel(BaseModel):
    """One weight of a section measure"""
    point: List[QuadNum]
    weight: QuadNum


class ProductRow(BaseModel):
    """Both sides of the product identity on the translate of one query rectangle"""
    point: List[QuadNum]
    query: RectModel
    lifted: QuadNum = Field(..., description="Lifted measure of c + A")
    product: QuadNum = Field(..., description="Lebesgue measure of A times the weight of c")


class RoundTripReport(BaseModel):
    """JSON output of the measures round-trip command"""
    weights: List[WeightModel]
    pulled: List[WeightModel]
    product_rows: List[ProductRow]
    product_identity: bool
    round_trip: bool
    window_mass: QuadNum
    section_mass: QuadNum
    mass_ratio: Optional[QuadNum] = Field(None, description="Window mass over pulled section mass")
    verdict: str
