import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.config import settings
from core.exactnum import QuadNum, ZERO, q
from core.exceptions import DegenerateShrink, PreconditionError, UnsupportedDim
from models.geometry import (
    CellMeasure, CrossSection, Point, Rect, VoronoiCellAssignment, Window
)

logger = logging.getLogger(__name__)

OrderKey = Callable[[Point], object]
Vertex = Tuple[QuadNum, QuadNum]


# ============================================
# Convex polygons
# ============================================

def polygon_area(poly: Sequence[Vertex]) -> QuadNum:
    total = ZERO
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        total = total + (x0 * y1 - x1 * y0)
    return abs(total) / 2


def _split(poly: List[Vertex], u: int, v: int, w: QuadNum) -> Tuple[List[Vertex], List[Vertex]]:
    """Split a convex polygon by u*x + v*y = w into (<= side, >= side)"""
    values = [x * u + y * v - w for x, y in poly]
    below: List[Vertex] = []
    above: List[Vertex] = []
    n = len(poly)
    for i in range(n):
        p, s = poly[i], values[i].sign()
        nxt, t = poly[(i + 1) % n], values[(i + 1) % n].sign()
        if s <= 0:
            below.append(p)
        if s >= 0:
            above.append(p)
        if s * t < 0:
            r = values[i] / (values[i] - values[(i + 1) % n])
            cut = (p[0] + (nxt[0] - p[0]) * r, p[1] + (nxt[1] - p[1]) * r)
            below.append(cut)
            above.append(cut)
    return below, above


def _proper(poly: List[Vertex]) -> bool:
    return len(poly) >= 3 and polygon_area(poly).sign() > 0


def clip_to_rect(poly: Sequence[Vertex], rect: Rect) -> List[Vertex]:
    """Part of a convex polygon inside an axis-parallel rectangle"""
    current = list(poly)
    for u, v, w, keep_above in (
        (1, 0, rect.lo[0], True), (1, 0, rect.hi[0], False),
        (0, 1, rect.lo[1], True), (0, 1, rect.hi[1], False),
    ):
        if not current:
            break
        below, above = _split(current, u, v, w)
        current = above if keep_above else below
        if not _proper(current):
            return []
    return current


def rect_polygon(rect: Rect) -> List[Vertex]:
    (x0, y0), (x1, y1) = rect.lo, rect.hi
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


class GeometryService:
    """Service for rectangles, windows, lacunarity and Voronoi tessellations"""

    # ============================================
    # Rectangles
    # ============================================

    def shrink(self, rect: Rect, b) -> Rect:
        """
        R with every edge pulled in by b

        Raises:
            DegenerateShrink: If lo_i + b >= hi_i - b for some axis
        """
        b = q(b)
        if b.sign() < 0:
            raise PreconditionError(f"shrink amount must be non-negative, got {b}")
        lo = tuple(a + b for a in rect.lo)
        hi = tuple(c - b for c in rect.hi)
        if any(not x < y for x, y in zip(lo, hi)):
            raise DegenerateShrink(f"shrinking {rect} by {b} leaves an empty side")
        return Rect(lo, hi)

    def minkowski_sum(self, a: Rect, b: Rect) -> Rect:
        return Rect(tuple(x + y for x, y in zip(a.lo, b.lo)), tuple(x + y for x, y in zip(a.hi, b.hi)))

    # ============================================
    # Lacunarity and cocompactness
    # ============================================

    def translates_disjoint(self, window: Window, x: Point, y: Point, body: Rect) -> bool:
        """Whether x + U and y + U are disjoint"""
        for d, w in zip(window.displacement(x, y), body.sides()):
            if abs(d) >= w:
                return True
        return False

    def is_lacunary(self, section: CrossSection, body: Rect) -> bool:
        """
        Whether the translates c + U, c in C, are pairwise disjoint

        Args:
            section: Cross-section
            body: Lacunarity body U

        Returns:
            True iff no two translates meet
        """
        pts = section.points
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if not self.translates_disjoint(section.window, pts[i], pts[j], body):
                    return False
        return True

    def _covers(self, region: Rect, boxes: List[Rect]) -> bool:
        if not boxes:
            return False
        cuts = {region.lo[0], region.hi[0]}
        for box in boxes:
            for t in (box.lo[0], box.hi[0]):
                if region.lo[0] < t < region.hi[0]:
                    cuts.add(t)
        cuts = sorted(cuts)
        for s, t in zip(cuts, cuts[1:]):
            active = [box for box in boxes if box.lo[0] <= s and t <= box.hi[0]]
            if not active:
                return False
            if region.dim > 1:
                sub = Rect(region.lo[1:], region.hi[1:])
                if not self._covers(sub, [Rect(box.lo[1:], box.hi[1:]) for box in active]):
                    return False
        return True

    def is_cocompact(self, section: CrossSection, body: Rect) -> bool:
        """
        Whether the translates c + V cover the window

        Translates are cut into pieces inside the window's region (the
        fundamental domain on a torus) and the cover is decided slab by slab.
        """
        window = section.window
        pieces: List[Rect] = []
        for c in section.points:
            pieces.extend(window.wrap_rect(body.translate(c)))
        return self._covers(window.region, pieces)

    # ============================================
    # Voronoi
    # ============================================

    def voronoi_owner(self, section: CrossSection, x: Point, order: Optional[OrderKey] = None) -> Point:
        """
        Nearest section point in the sup-metric, ties broken by the section's order

        Args:
            section: Nonempty cross-section
            x: Query point
            order: Optional key replacing the section's own order

        Returns:
            The owning point
        """
        if not section.points:
            raise PreconditionError("Voronoi owner of an empty cross-section")
        window = section.window
        key = order or section.rank
        best = None
        best_key = None
        for c in section.points:
            d = window.distance(x, c)
            if best is None or d < best or (d == best and key(c) < best_key):
                best, best_key, owner = d, key(c), c
        return owner

    def assign_owners(self, section: CrossSection, queries: Sequence[Point]) -> VoronoiCellAssignment:
        return VoronoiCellAssignment({tuple(x): self.voronoi_owner(section, x) for x in queries})

    def _axis_breaks(self, section: CrossSection, axis: int) -> List[QuadNum]:
        window = section.window
        region = window.region
        raw = set()
        coords = [p[axis] for p in section.points]
        for c in coords:
            raw.add(c)
        for i in range(len(coords)):
            for j in range(i + 1, len(coords)):
                raw.add((coords[i] + coords[j]) / 2)
        if window.is_torus:
            period = window.periods[axis]
            raw |= {t + period / 2 for t in list(raw)}
            raw = {t - period * math.floor(t / period) for t in raw}
        cuts = {region.lo[axis], region.hi[axis]}
        cuts |= {t for t in raw if region.lo[axis] < t < region.hi[axis]}
        return sorted(cuts)

    def voronoi_partition(self, section: CrossSection) -> Dict[Point, List]:
        """
        Exact Voronoi cells as lists of pieces

        d=1 pieces are Rects; d=2 pieces are convex polygons. Inside every
        cell of the breakpoint grid each axis distance is affine, so the
        owner only changes across lines of slope +-1; cutting by all of them
        leaves pieces with a constant owner.

        Raises:
            UnsupportedDim: For d >= 3
        """
        dim = section.window.dim
        if dim not in (1, 2):
            raise UnsupportedDim(f"exact Voronoi cells are computed for d in (1, 2), got d={dim}")
        if not section.points:
            raise PreconditionError("Voronoi partition of an empty cross-section")
        cells: Dict[Point, List] = {c: [] for c in section.points}
        xs = self._axis_breaks(section, 0)

        if dim == 1:
            for s, t in zip(xs, xs[1:]):
                owner = self.voronoi_owner(section, ((s + t) / 2,))
                cells[owner].append(Rect((s,), (t,)))
            return cells

        ys = self._axis_breaks(section, 1)
        window = section.window
        for x0, x1 in zip(xs, xs[1:]):
            for y0, y1 in zip(ys, ys[1:]):
                mid = ((x0 + x1) / 2, (y0 + y1) / 2)
                # Affine forms sigma * (t - p) of every axis distance on this cell
                forms = []
                for c in section.points:
                    dx, dy = window.displacement(c, mid)
                    forms.append((dx.sign(), mid[0] - dx, dy.sign(), mid[1] - dy))
                lines = set()
                for sx, px, _, _ in forms:
                    for _, _, sy, py in forms:
                        lines.add((sx, -sy, px * sx - py * sy))
                pieces = [[(x0, y0), (x1, y0), (x1, y1), (x0, y1)]]
                corners = pieces[0]
                for u, v, w in lines:
                    signs = {(x * u + y * v - w).sign() for x, y in corners}
                    if not (1 in signs and -1 in signs):
                        continue
                    nxt = []
                    for poly in pieces:
                        below, above = _split(poly, u, v, w)
                        nxt.extend(p for p in (below, above) if _proper(p))
                    pieces = nxt
                for poly in pieces:
                    n = len(poly)
                    centroid = (sum((p[0] for p in poly), ZERO) / n, sum((p[1] for p in poly), ZERO) / n)
                    owner = self.voronoi_owner(section, centroid)
                    cells[owner].append(tuple(poly))
        logger.debug("Voronoi partition of %d points: %d grid columns x %d rows", len(section), len(xs) - 1, len(ys) - 1)
        return cells

    def voronoi_cell_measure(
        self,
        section: CrossSection,
        c: Point,
        mode: str = "exact2d",
        samples: Optional[int] = None,
        seed: int = 0
    ) -> CellMeasure:
        """
        Measure of the Voronoi cell of c

        Args:
            section: Cross-section
            c: Owner whose cell is measured
            mode: "exact2d" (d=2 polygon areas) or "montecarlo"
            samples: Monte-Carlo sample count
            seed: Monte-Carlo seed

        Raises:
            UnsupportedDim: For exact mode with d != 2
        """
        c = tuple(c)
        if c not in section:
            raise PreconditionError(f"{c} is not a section point")
        window = section.window
        if mode == "exact2d":
            if window.dim != 2:
                raise UnsupportedDim(f"exact2d needs d=2, got d={window.dim}")
            area = ZERO
            for poly in self.voronoi_partition(section)[c]:
                area = area + polygon_area(poly)
            return CellMeasure(owner=list(c), mode=mode, value=area, approximate=f"{area.to_float():.6g}")

        if mode != "montecarlo":
            raise PreconditionError(f"unknown mode {mode!r}")
        n = samples or settings.MONTE_CARLO_SAMPLES
        region = window.region
        rng = np.random.default_rng(seed)
        lo = np.array([x.to_float() for x in region.lo])
        span = np.array([s.to_float() for s in region.sides()])
        hits = 0
        for row in rng.random((n, window.dim)):
            x = tuple(QuadNum.from_fraction(Fraction(float(v))) for v in lo + row * span)
            if self.voronoi_owner(section, window.reduce(x)) == c:
                hits += 1
        value = region.volume() * Fraction(hits, n)
        return CellMeasure(owner=list(c), mode=mode, value=value, approximate=f"{value.to_float():.6g}", samples=n)


# Create service instance
geometry_service = GeometryService()
