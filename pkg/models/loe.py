"""
Models for the back-and-forth construction and normalization checks
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, Field

from core.exactnum import QuadNum, dyadic
from models.geometry import Point, Rect
from models.towers import TowerAudit


class Side(str, Enum):
    """Which fragment a tile belongs to"""
    X = "X"
    Y = "Y"


@dataclass(frozen=True)
class FragmentTile:
    """Rectangle anchor + [0, zeta) of an orbit fragment"""
    index: int
    label: str
    anchor: Point
    zeta: Tuple[QuadNum, ...]
    fresh: bool = False
    summoned_by: Optional[int] = None
    tau: Optional[int] = None

    @property
    def rect(self) -> Rect:
        return Rect.at(self.anchor, self.zeta)

    @property
    def dim(self) -> int:
        return len(self.zeta)


class BlockId(NamedTuple):
    """Block anchor + 2^-k idx + [0, 2^-k)^d of one tile"""
    anchor: Point
    level: int
    idx: Tuple[int, ...]

    def rect(self) -> Rect:
        side = dyadic(self.level)
        lo = tuple(a + side * i for a, i in zip(self.anchor, self.idx))
        return Rect(lo, tuple(x + side for x in lo))

    def child(self, part: int) -> Rect:
        """Dyadic child number `part`; bit i of part selects the upper half on axis i"""
        side = dyadic(self.level + 1)
        base = self.rect().lo
        lo = tuple(x + side * ((part >> i) & 1) for i, x in enumerate(base))
        return Rect(lo, tuple(x + side for x in lo))


class BlockPair(NamedTuple):
    """Source X block mapped onto a target Y block, or onto one dyadic child of it"""
    source: BlockId
    target: BlockId
    part: Optional[int]
    stage: str

    def target_rect(self) -> Rect:
        return self.target.rect() if self.part is None else self.target.child(self.part)


class StageTrace(BaseModel):
    """Summary of one forth or back stage"""
    stage: str
    level: int
    mapped: int = Field(..., description="Block pairs added")
    fresh_tiles: int = Field(0, description="Tiles summoned through compressibility maps")
    measure: QuadNum = Field(..., description="Lebesgue measure moved by the stage")


@dataclass(frozen=True)
class BlockMap:
    """Block pairs accumulated stage by stage"""
    pairs: Tuple[BlockPair, ...] = ()
    stages: Tuple[StageTrace, ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)

    def extended(self, pairs: List[BlockPair], trace: StageTrace) -> "BlockMap":
        return BlockMap(self.pairs + tuple(pairs), self.stages + (trace,))


@dataclass(frozen=True)
class MapPiece:
    """Affine bijection of a source rectangle onto a target rectangle"""
    source: Rect
    source_label: str
    target: Rect
    target_label: str

    def ratio(self) -> QuadNum:
        return self.target.volume() / self.source.volume()

    def apply(self, x: Point) -> Point:
        return tuple(
            t + (p - s) * (ts / ss)
            for p, s, t, ss, ts in zip(x, self.source.lo, self.target.lo, self.source.sides(), self.target.sides())
        )


@dataclass(frozen=True)
class PointMap:
    """Piecewise affine map between two orbit fragments"""
    pieces: Tuple[MapPiece, ...] = ()
    tile_pairs: Dict[Point, Point] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pieces)


class BasisRect(NamedTuple):
    """Basis rectangle on the source side, with its orbit label"""
    rect: Rect
    label: str


# ============================================
# Reports
# ============================================

class NormalizationVerdict(str, Enum):
    """Strongest equivalence the ratios support"""
    LOE = "LOE"
    HOE = "HOE"
    WHOE = "wHOE"


class NormalizationReport(BaseModel):
    """Ratio of image measure to source measure per orbit label"""
    ratios: Dict[str, QuadNum]
    label_map: Dict[str, str] = Field(default_factory=dict)
    pieces: int
    verdict: NormalizationVerdict


class CoverageRow(BaseModel):
    """Covered part of one materialized tile after the last level"""
    side: str
    index: int
    label: str
    counts: List[int] = Field(..., description="n_{i,K} per axis")
    fractions: List[str] = Field(..., description="n_{i,K} 2^-K / zeta_i per axis")
    covered: QuadNum
    expected: QuadNum
    ok: bool


class BlockAudit(BaseModel):
    """Exact audits of a block map"""
    injective: bool
    measure_preserving: bool
    levels_ok: bool
    labels_ok: bool
    coverage: List[CoverageRow]
    violations: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class LoeReport(BaseModel):
    """JSON output of the loe command"""
    dim: int
    levels: int
    core_tiles: int
    fresh_tiles: Dict[str, int]
    stages: List[StageTrace]
    audit: BlockAudit
    normalization: NormalizationReport
    verdict: str


class PipelineReport(BaseModel):
    """JSON output of the pipeline command"""
    dim: int
    levels: int
    source_tiles: int
    target_tiles: int
    source_audit: TowerAudit
    target_audit: TowerAudit
    seed_pairs: int = Field(..., description="Unit tiles paired by the seed")
    mapped_tiles: int
    theta_violations: List[str] = Field(default_factory=list)
    normalization: NormalizationReport
    verdict: str
