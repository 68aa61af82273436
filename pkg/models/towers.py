"""
Tower hierarchies and the regular tilings built on them
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from core.exactnum import KAPPA, QuadNum, ZERO
from models.geometry import CrossSection, Point, Rect, RectModel, Window
from models.tiling import RegularTiling, Tile, TileModel, TileType, type_name


# ============================================
# Tower parameters
# ============================================

class TowerLevel(BaseModel):
    """Parameters of one level k >= 1"""
    k: int = Field(..., ge=1)
    eps: QuadNum = Field(..., description="Largest shift of a level-k square")
    threshold: int = Field(..., ge=0, description="N(eps)")
    b: QuadNum = Field(..., description="Margin kept free inside a level-k square")
    btilde: QuadNum
    l: QuadNum = Field(..., description="Half side of the level-k square")


class TowerSpec(BaseModel):
    """Tower parameters for levels 1..K"""
    dim: int = Field(..., ge=1)
    kappa: QuadNum = KAPPA
    levels: List[TowerLevel] = Field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> TowerLevel:
        return self.levels[k - 1]

    def half_side(self, k: int) -> QuadNum:
        return ZERO if k == 0 else self.level(k).l

    def square(self, k: int) -> Rect:
        """R_k = [-l_k, l_k)^d"""
        return Rect.symmetric(self.level(k).l, self.dim)


# ============================================
# Squares
# ============================================

@dataclass(frozen=True)
class Square:
    """A translate c + R_k"""
    id: str
    level: int
    anchor: Point
    rect: Rect
    parent: Optional[str] = None


@dataclass(frozen=True)
class TowerFamily:
    """Nested lacunary layers of squares inside one window"""
    window: Window
    spec: TowerSpec
    squares: Dict[str, Square] = field(default_factory=dict)

    def level(self, k: int) -> List[Square]:
        return sorted((s for s in self.squares.values() if s.level == k), key=lambda s: s.anchor)

    def section(self, k: int) -> CrossSection:
        return CrossSection(tuple(s.anchor for s in self.level(k)), self.window)

    def children(self, square_id: str) -> List[Square]:
        return sorted((s for s in self.squares.values() if s.parent == square_id), key=lambda s: s.anchor)

    def ancestors(self, square_id: str) -> List[str]:
        out = []
        parent = self.squares[square_id].parent
        while parent is not None:
            out.append(parent)
            parent = self.squares[parent].parent
        return out


@dataclass(frozen=True)
class SnappedWindow:
    """Translate of R_k with corners on canonical nodes"""
    rect: Rect
    child: str
    pushed: bool = False


# ============================================
# Shifts
# ============================================

@dataclass(frozen=True)
class ShiftLedger:
    """Own shift of every square; a square also moves with all its ancestors"""
    shifts: Dict[str, Point] = field(default_factory=dict)

    def with_shift(self, square_id: str, delta: Point) -> "ShiftLedger":
        shifts = dict(self.shifts)
        shifts[square_id] = tuple(delta)
        return ShiftLedger(shifts)

    def own(self, square_id: str, dim: int) -> Point:
        return self.shifts.get(square_id, (ZERO,) * dim)

    def accumulated(self, family: TowerFamily, square_id: str) -> Point:
        dim = family.spec.dim
        total = self.own(square_id, dim)
        for parent in family.ancestors(square_id):
            total = tuple(a + b for a, b in zip(total, self.own(parent, dim)))
        return total


# ============================================
# Tiled squares
# ============================================

@dataclass(frozen=True)
class TowerTile:
    """A tile with the squares whose tiled regions contain it, innermost first"""
    tile: Tile
    regions: Tuple[str, ...]

    def translate(self, v) -> "TowerTile":
        return TowerTile(self.tile.translate(v), self.regions)

    def inside(self, square_id: str) -> "TowerTile":
        return TowerTile(self.tile, self.regions + (square_id,))


@dataclass(frozen=True)
class SquareTiling:
    """Regular tiling of the tiled region of one square"""
    square: str
    region: Rect
    tiles: Tuple[TowerTile, ...]

    def translate(self, v) -> "SquareTiling":
        return SquareTiling(self.square, self.region.translate(v), tuple(t.translate(v) for t in self.tiles))


@dataclass(frozen=True)
class ThetaMatching:
    """Per non-unit type a a bijection from unit-type anchors onto type-a anchors"""
    unit: TileType
    unit_anchors: Tuple[Point, ...] = ()
    maps: Dict[TileType, Dict[Point, Point]] = field(default_factory=dict)

    def theta(self, kind: TileType) -> Dict[Point, Point]:
        if kind == self.unit:
            return {p: p for p in self.unit_anchors}
        return self.maps[kind]

    def inverse(self, kind: TileType) -> Dict[Point, Point]:
        return {v: k for k, v in self.theta(kind).items()}

    def all_maps(self) -> Dict[TileType, Dict[Point, Point]]:
        out = {self.unit: self.theta(self.unit)}
        out.update(self.maps)
        return out


@dataclass(frozen=True)
class LimitTiling:
    """Regular tilings of the top-level tiled regions with their matchings"""
    tilings: Tuple[RegularTiling, ...]
    theta: ThetaMatching
    ledger: ShiftLedger
    regions: Dict[str, Rect]
    tower_tiles: Tuple[TowerTile, ...] = ()

    def tiles(self) -> List[Tile]:
        return [tile for tiling in self.tilings for tile in tiling.tiles]


# ============================================
# Reports
# ============================================

class SquareModel(BaseModel):
    id: str
    level: int
    anchor: List[QuadNum]
    parent: Optional[str] = None
    shift: List[QuadNum]


class CoverageReport(BaseModel):
    """Window fraction covered by the top-level squares"""
    covered: QuadNum
    window: QuadNum
    fraction: str
    bound: str = Field(..., description="1 minus the sum of eps_k")
    ok: bool


class LedgerReport(BaseModel):
    max_increment: Dict[int, QuadNum]
    max_total: QuadNum
    eps_sum: QuadNum
    ok: bool


class TowerAudit(BaseModel):
    """Exact audits of a tower run"""
    family_violations: List[str] = Field(default_factory=list)
    regular_violations: List[str] = Field(default_factory=list)
    coverage: CoverageReport
    ledger: LedgerReport
    pushed_windows: int = 0

    @property
    def ok(self) -> bool:
        return not self.family_violations and not self.regular_violations and self.coverage.ok and self.ledger.ok


class TowersReport(BaseModel):
    """JSON output of the towers command"""
    spec: TowerSpec
    window: RectModel
    squares: List[SquareModel]
    type_counts: Dict[str, Dict[str, int]]
    tiles: Optional[List[TileModel]] = None
    matchings: Optional[Dict[str, List[List[List[QuadNum]]]]] = None
    audit: TowerAudit
    verdict: str


def matching_model(theta: ThetaMatching) -> Dict[str, List[List[List[QuadNum]]]]:
    return {
        type_name(kind): [[list(a), list(b)] for a, b in sorted(m.items())]
        for kind, m in sorted(theta.maps.items(), key=lambda kv: type_name(kv[0]))
    }


@dataclass(frozen=True)
class TowerRun:
    """Family, limit tiling and snapping trace of one construction"""
    family: TowerFamily
    limit: LimitTiling
    pushed: Tuple[str, ...] = ()
