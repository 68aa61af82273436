"""
Rectangular and regular tilings
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from core.exactnum import ALPHA, ONE, QuadNum
from models.diophantine import SegmentKind
from models.geometry import Point, Rect, RectModel, Window

TileType = Tuple[SegmentKind, ...]


def type_name(kind: TileType) -> str:
    """'1a' style name: 1 for a side of length one, a for alpha"""
    return "".join("1" if s is SegmentKind.ONE else "a" for s in kind)


def unit_type(dim: int) -> TileType:
    return (SegmentKind.ONE,) * dim


def type_of_rect(rect: Rect) -> Optional[TileType]:
    out = []
    for side in rect.sides():
        if side == ONE:
            out.append(SegmentKind.ONE)
        elif side == ALPHA:
            out.append(SegmentKind.ALPHA)
        else:
            return None
    return tuple(out)


@dataclass(frozen=True)
class Tile:
    """One tile, anchored at its bottom-left corner"""
    rect: Rect
    label: str = "0"
    kind: Optional[TileType] = None

    @property
    def anchor(self) -> Point:
        return self.rect.lo

    def translate(self, v) -> "Tile":
        return Tile(self.rect.translate(v), self.label, self.kind)


@dataclass(frozen=True)
class RectTiling:
    """Tiles meant to partition the window's region"""
    window: Window
    tiles: Tuple[Tile, ...]

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def dim(self) -> int:
        return self.window.dim

    def min_side(self) -> QuadNum:
        return min(s for t in self.tiles for s in t.rect.sides())

    def max_side(self) -> QuadNum:
        return max(s for t in self.tiles for s in t.rect.sides())


@dataclass(frozen=True)
class RegularTiling(RectTiling):
    """Tiling whose sides are all 1 or alpha, with the type of every tile recorded"""

    def __post_init__(self):
        for tile in self.tiles:
            if tile.kind is None or type_of_rect(tile.rect) != tile.kind:
                raise ValueError(f"tile {tile.rect} does not match its type")

    def by_type(self) -> Dict[TileType, List[int]]:
        groups: Dict[TileType, List[int]] = {}
        for i, tile in enumerate(self.tiles):
            groups.setdefault(tile.kind, []).append(i)
        return groups

    def type_counts(self) -> Dict[str, int]:
        return {type_name(k): len(v) for k, v in sorted(self.by_type().items(), key=lambda kv: type_name(kv[0]))}


# ============================================
# Reports
# ============================================

class PartitionAudit(BaseModel):
    """Exact partition audit of a tiling"""
    ok: bool
    tiles: int
    volume_total: QuadNum
    region_volume: QuadNum
    outside: int = Field(0, description="Tiles not contained in the region")
    overlapping_cells: int = 0
    uncovered_cells: int = 0


class TileModel(BaseModel):
    """Tile as it appears in JSON"""
    rect: RectModel
    label: str
    type: Optional[str] = None

    @classmethod
    def of(cls, tile: Tile) -> "TileModel":
        return cls(
            rect=RectModel.of(tile.rect),
            label=tile.label,
            type=type_name(tile.kind) if tile.kind is not None else None,
        )


class InscribedGridReport(BaseModel):
    """Covered fraction of every tile by inscribed copies"""
    copies: int
    fractions: List[str]
    min_fraction: str
