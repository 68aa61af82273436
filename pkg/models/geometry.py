"""
Geometric value types: half-open rectangles, windows and cross-sections
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from core.exactnum import QuadNum, ZERO, q

Point = Tuple[QuadNum, ...]


def as_point(values: Sequence) -> Point:
    return tuple(q(v) for v in values)


# ============================================
# Rectangles
# ============================================

@dataclass(frozen=True)
class Rect:
    """The product of half-open intervals [lo_i, hi_i)"""
    lo: Tuple[QuadNum, ...]
    hi: Tuple[QuadNum, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("lo and hi must have the same positive length")
        for a, b in zip(self.lo, self.hi):
            if not a < b:
                raise ValueError(f"empty side [{a}, {b})")

    @classmethod
    def of(cls, lo: Sequence, hi: Sequence) -> "Rect":
        return cls(as_point(lo), as_point(hi))

    @classmethod
    def cube(cls, lo, side, dim: int) -> "Rect":
        lo, side = q(lo), q(side)
        return cls((lo,) * dim, (lo + side,) * dim)

    @classmethod
    def symmetric(cls, half, dim: int) -> "Rect":
        """[-half, half)^dim"""
        half = q(half)
        return cls((-half,) * dim, (half,) * dim)

    @classmethod
    def at(cls, anchor: Point, sides: Sequence[QuadNum]) -> "Rect":
        return cls(tuple(anchor), tuple(a + s for a, s in zip(anchor, sides)))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def anchor(self) -> Point:
        return self.lo

    def sides(self) -> Tuple[QuadNum, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def volume(self) -> QuadNum:
        v = QuadNum.from_int(1)
        for s in self.sides():
            v = v * s
        return v

    def center(self) -> Point:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    def is_symmetric(self) -> bool:
        return all(a == -b for a, b in zip(self.lo, self.hi))

    def contains(self, p: Point) -> bool:
        return all(a <= x < b for a, x, b in zip(self.lo, p, self.hi))

    def contains_rect(self, other: "Rect") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def intersect(self, other: "Rect") -> Optional["Rect"]:
        lo = tuple(max(a, c) for a, c in zip(self.lo, other.lo))
        hi = tuple(min(b, d) for b, d in zip(self.hi, other.hi))
        if any(not a < b for a, b in zip(lo, hi)):
            return None
        return Rect(lo, hi)

    def overlaps(self, other: "Rect") -> bool:
        return all(a < d and c < b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def translate(self, v: Sequence[QuadNum]) -> "Rect":
        return Rect(tuple(a + t for a, t in zip(self.lo, v)), tuple(b + t for b, t in zip(self.hi, v)))

    def __str__(self) -> str:
        return " x ".join(f"[{a}, {b})" for a, b in zip(self.lo, self.hi))


# ============================================
# Windows
# ============================================

class WindowKind(str, Enum):
    """Shape of an orbit fragment"""
    BOX = "box"
    TORUS = "torus"


def _wrap_coordinate(x: QuadNum, period: QuadNum) -> QuadNum:
    return x - period * math.floor(x / period)


@dataclass(frozen=True)
class Window:
    """A box in R^d or the flat torus (R/L_1 Z) x ... x (R/L_d Z)"""
    kind: WindowKind
    box: Optional[Rect] = None
    periods: Optional[Tuple[QuadNum, ...]] = None

    def __post_init__(self):
        if self.kind == WindowKind.BOX and self.box is None:
            raise ValueError("box window needs a rectangle")
        if self.kind == WindowKind.TORUS:
            if not self.periods:
                raise ValueError("torus window needs periods")
            if any(p.sign() <= 0 for p in self.periods):
                raise ValueError("torus periods must be positive")

    @classmethod
    def box_of(cls, rect: Rect) -> "Window":
        return cls(WindowKind.BOX, box=rect)

    @classmethod
    def torus(cls, periods: Sequence) -> "Window":
        return cls(WindowKind.TORUS, periods=as_point(periods))

    @property
    def is_torus(self) -> bool:
        return self.kind == WindowKind.TORUS

    @property
    def dim(self) -> int:
        return len(self.periods) if self.is_torus else self.box.dim

    @property
    def region(self) -> Rect:
        """The box itself, or the fundamental domain [0, L) of the torus"""
        if self.is_torus:
            return Rect(tuple(ZERO for _ in self.periods), self.periods)
        return self.box

    def volume(self) -> QuadNum:
        return self.region.volume()

    def reduce(self, p: Point) -> Point:
        if not self.is_torus:
            return tuple(p)
        return tuple(_wrap_coordinate(x, period) for x, period in zip(p, self.periods))

    def displacement(self, x: Point, y: Point) -> Point:
        """y - x, taken as the representative in [-L/2, L/2) on a torus"""
        raw = tuple(b - a for a, b in zip(x, y))
        if not self.is_torus:
            return raw
        out = []
        for r, period in zip(raw, self.periods):
            r = _wrap_coordinate(r, period)
            if r >= period / 2:
                r = r - period
            out.append(r)
        return tuple(out)

    def distance(self, x: Point, y: Point) -> QuadNum:
        return max(abs(t) for t in self.displacement(x, y))

    def wrap_rect(self, rect: Rect) -> List[Rect]:
        """Pieces of the rectangle inside the fundamental region"""
        if not self.is_torus:
            piece = rect.intersect(self.box)
            return [piece] if piece is not None else []
        pieces: List[Tuple[Tuple[QuadNum, ...], Tuple[QuadNum, ...]]] = [((), ())]
        for a, b, period in zip(rect.lo, rect.hi, self.periods):
            axis = _wrap_interval(a, b, period)
            pieces = [(lo + (c,), hi + (d,)) for lo, hi in pieces for c, d in axis]
        return [Rect(lo, hi) for lo, hi in pieces]


def _wrap_interval(a: QuadNum, b: QuadNum, period: QuadNum) -> List[Tuple[QuadNum, QuadNum]]:
    if b - a >= period:
        return [(ZERO, period)]
    start = _wrap_coordinate(a, period)
    end = start + (b - a)
    if end <= period:
        return [(start, end)]
    return [(start, period), (ZERO, end - period)]


# ============================================
# Cross-sections
# ============================================

@dataclass(frozen=True)
class CrossSection:
    """Finite set of points of a window, listed in the order used for tie-breaking"""
    points: Tuple[Point, ...]
    window: Window

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise ValueError("cross-section points must be distinct")

    @classmethod
    def lexicographic(cls, points: Sequence[Sequence], window: Window) -> "CrossSection":
        pts = sorted({window.reduce(as_point(p)) for p in points})
        return cls(tuple(pts), window)

    @classmethod
    def ordered(cls, points: Sequence[Sequence], window: Window) -> "CrossSection":
        return cls(tuple(window.reduce(as_point(p)) for p in points), window)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self._ranks

    @property
    def _ranks(self) -> Dict[Point, int]:
        ranks = self.__dict__.get("_rank_cache")
        if ranks is None:
            ranks = {p: i for i, p in enumerate(self.points)}
            object.__setattr__(self, "_rank_cache", ranks)
        return ranks

    def rank(self, p: Point) -> int:
        return self._ranks[tuple(p)]

    def with_points(self, points: Sequence[Point]) -> "CrossSection":
        return CrossSection(tuple(points), self.window)

    def translate(self, t: Sequence[QuadNum]) -> "CrossSection":
        return CrossSection(
            tuple(self.window.reduce(tuple(x + s for x, s in zip(p, t))) for p in self.points),
            self.window,
        )


@dataclass(frozen=True)
class VoronoiCellAssignment:
    """Owner of each query point"""
    owners: Dict[Point, Point] = field(default_factory=dict)


# Convex polygon with counter-clockwise vertices
Polygon = Tuple[Tuple[QuadNum, QuadNum], ...]


# ============================================
# Wire models
# ============================================

class RectModel(BaseModel):
    """Rectangle as it appears in JSON"""
    lo: List[QuadNum]
    hi: List[QuadNum]

    @classmethod
    def of(cls, rect: Rect) -> "RectModel":
        return cls(lo=list(rect.lo), hi=list(rect.hi))


class CellMeasure(BaseModel):
    """Measure of one Voronoi cell"""
    owner: List[QuadNum]
    mode: str
    value: QuadNum
    approximate: str = Field(..., description="Display-only decimal rendering of value")
    samples: Optional[int] = Field(None, description="Monte-Carlo sample count, absent for exact results")
