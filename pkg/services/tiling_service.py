import itertools
import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.exactnum import KAPPA, ONE, QuadNum, ZERO, q
from core.exceptions import NotMultiple, PreconditionError, TilesTooSmall, WindowTooSmall
from models.diophantine import SegmentPartition
from models.geometry import CrossSection, Rect, Window
from models.tiling import (
    InscribedGridReport, PartitionAudit, RectTiling, RegularTiling, Tile, TileType, type_of_rect
)
from services.diophantine_service import diophantine_service

logger = logging.getLogger(__name__)


def _ratio(x: QuadNum) -> str:
    return str(x.rat) if x.is_rational() else str(x)


class TilingService:
    """Service for rectangular tilings of windows"""

    def __init__(self):
        self.diophantine = diophantine_service

    # ============================================
    # Bounded-side tilings
    # ============================================

    def splittable_length(self, target, eps) -> QuadNum:
        """
        Bound L such that every length above L splits into equal pieces eps-close to target

        Lengths in (n(L'-eps), n(L'+eps)) split into n pieces; consecutive
        ranges overlap once n > (L'-eps)/(2 eps).
        """
        target, eps = q(target), q(eps)
        if not eps < target:
            raise PreconditionError(f"need eps < L', got eps={eps}, L'={target}")
        n0 = math.floor((target - eps) / (eps * 2)) + 1
        return (target - eps) * n0

    def _split_count(self, length: QuadNum, target: QuadNum, eps: QuadNum) -> int:
        n = round(length / target)
        if n >= 1 and abs(length / n - target) < eps:
            return n
        lo = max(1, math.floor(length / (target + eps)))
        hi = math.ceil(length / (target - eps))
        for n in range(lo, hi + 1):
            if abs(length / n - target) < eps:
                return n
        raise WindowTooSmall(f"side {length} cannot be split into pieces within {eps} of {target}")

    def tile_window_bounded_sides(self, window: Window, target, eps, label: str = "0") -> RectTiling:
        """
        Tile a box window with rectangles whose sides are all eps-close to L'

        Per axis the side r is cut into n = round(r/L') equal pieces; if that
        count misses the bound the nearest admissible count is used.

        Args:
            window: Box window
            target: L'
            eps: Tolerance on every side

        Returns:
            RectTiling with bottom-left anchors

        Raises:
            WindowTooSmall: If some side admits no admissible split
        """
        target, eps = q(target), q(eps)
        if window.is_torus:
            raise PreconditionError("bounded-side tilings are built on box windows")
        if not eps < target:
            raise PreconditionError(f"need eps < L', got eps={eps}, L'={target}")
        region = window.region

        axes: List[List[QuadNum]] = []
        for lo, side in zip(region.lo, region.sides()):
            n = self._split_count(side, target, eps)
            piece = side / n
            cuts = [lo + piece * j for j in range(n)] + [region.hi[len(axes)]]
            axes.append(cuts)

        tiles = []
        for combo in itertools.product(*[range(len(cuts) - 1) for cuts in axes]):
            lo = tuple(axes[i][j] for i, j in enumerate(combo))
            hi = tuple(axes[i][j + 1] for i, j in enumerate(combo))
            tiles.append(Tile(Rect(lo, hi), label))
        logger.info("bounded-side tiling: %d tiles, sides within %s of %s", len(tiles), eps, target)
        return RectTiling(window, tuple(tiles))

    # ============================================
    # Inscribed grids
    # ============================================

    def _copies_per_axis(self, tile: Rect, body: Rect) -> Tuple[int, ...]:
        return tuple(math.floor(s / r) for s, r in zip(tile.sides(), body.sides()))

    def covered_fractions(self, tiling: RectTiling, body: Rect) -> InscribedGridReport:
        """Fraction of every tile covered by copies of the body packed from its bottom-left corner"""
        fractions = []
        copies = 0
        body_sides = body.sides()
        for tile in tiling.tiles:
            counts = self._copies_per_axis(tile.rect, body)
            covered = ONE
            for c, r in zip(counts, body_sides):
                covered = covered * (r * c)
            fractions.append(covered / tile.rect.volume())
            copies += math.prod(counts)
        return InscribedGridReport(
            copies=copies,
            fractions=[_ratio(f) for f in fractions],
            min_fraction=_ratio(min(fractions)) if fractions else "1",
        )

    def inscribe_grid(self, tiling: RectTiling, body: Rect, eps) -> CrossSection:
        """
        Pack copies of a body into every tile starting from its bottom-left corner

        Args:
            tiling: Tiling to inscribe into
            body: Rectangle around the origin; its translates c + body are the copies
            eps: Largest uncovered fraction allowed per tile

        Returns:
            CrossSection of copy centers

        Raises:
            TilesTooSmall: If some tile keeps an uncovered fraction of eps or more
        """
        eps = q(eps)
        body_sides = body.sides()
        points = []
        for tile in tiling.tiles:
            counts = self._copies_per_axis(tile.rect, body)
            covered = ONE
            for c, r in zip(counts, body_sides):
                covered = covered * (r * c)
            fraction = covered / tile.rect.volume()
            if fraction < ONE - eps:
                raise TilesTooSmall(f"tile {tile.rect} keeps uncovered fraction {ONE - fraction} >= {eps}")
            for idx in itertools.product(*[range(c) for c in counts]):
                points.append(tuple(
                    lo - blo + r * j
                    for lo, blo, r, j in zip(tile.rect.lo, body.lo, body_sides, idx)
                ))
        logger.info("inscribed %d copies into %d tiles", len(points), len(tiling.tiles))
        return CrossSection(tuple(points), tiling.window)

    # ============================================
    # Canonical regular tilings
    # ============================================

    def kappa_multiples(self, rect: Rect) -> Tuple[int, ...]:
        """K_i with side_i = K_i (1+alpha)"""
        out = []
        for side in rect.sides():
            k = side / KAPPA
            if not k.is_integer() or k.sign() <= 0:
                raise NotMultiple(f"side {side} is not a positive multiple of 1+alpha")
            out.append(k.integer_components()[0])
        return tuple(out)

    def product_tiles(self, partitions: Sequence[SegmentPartition], label: str) -> List[Tile]:
        """Product of per-axis {1, alpha} partitions"""
        axes = [(p.nodes(), p.labels) for p in partitions]
        tiles = []
        for combo in itertools.product(*[range(len(labels)) for _, labels in axes]):
            lo = tuple(axes[i][0][j] for i, j in enumerate(combo))
            hi = tuple(axes[i][0][j + 1] for i, j in enumerate(combo))
            kind: TileType = tuple(axes[i][1][j] for i, j in enumerate(combo))
            tiles.append(Tile(Rect(lo, hi), label, kind))
        return tiles

    def canonical_tiles(self, rect: Rect, label: str = "0") -> List[Tile]:
        ks = self.kappa_multiples(rect)
        partitions = [self.diophantine.canonical_partition(k, lo) for k, lo in zip(ks, rect.lo)]
        return self.product_tiles(partitions, label)

    def canonical_tiling(self, rect: Rect, label: str = "0") -> RegularTiling:
        """
        Product of alternating 1, alpha partitions of a rectangle with sides in (1+alpha)N

        Raises:
            NotMultiple: If a side is not K(1+alpha)
        """
        tiles = self.canonical_tiles(rect, label)
        return RegularTiling(Window.box_of(rect), tuple(tiles))

    def canonical_nodes(self, rect: Rect) -> List[List[QuadNum]]:
        """Per-axis node coordinates of the canonical tiling"""
        ks = self.kappa_multiples(rect)
        return [self.diophantine.canonical_partition(k, lo).nodes() for k, lo in zip(ks, rect.lo)]

    # ============================================
    # Audits
    # ============================================

    def partition_audit(self, tiling: RectTiling) -> PartitionAudit:
        """
        Exact partition check

        Volumes are summed exactly. Disjointness and covering are decided on
        the grid of all tile coordinates: every elementary cell of that grid
        must be hit by exactly one tile.
        """
        region = tiling.window.region
        total = ZERO
        outside = 0
        for tile in tiling.tiles:
            total = total + tile.rect.volume()
            if not region.contains_rect(tile.rect):
                outside += 1

        coords: List[List[QuadNum]] = []
        for axis in range(region.dim):
            values = {region.lo[axis], region.hi[axis]}
            for tile in tiling.tiles:
                values.add(tile.rect.lo[axis])
                values.add(tile.rect.hi[axis])
            coords.append(sorted(values))
        index: List[Dict[QuadNum, int]] = [{v: i for i, v in enumerate(c)} for c in coords]

        occupancy = np.zeros([len(c) - 1 for c in coords], dtype=np.int32)
        for tile in tiling.tiles:
            occupancy[tuple(
                slice(index[i][tile.rect.lo[i]], index[i][tile.rect.hi[i]]) for i in range(region.dim)
            )] += 1

        inside = tuple(
            slice(index[i][region.lo[i]], index[i][region.hi[i]]) for i in range(region.dim)
        )
        overlapping = int(np.count_nonzero(occupancy > 1))
        uncovered = int(np.count_nonzero(occupancy[inside] == 0))

        ok = total == region.volume() and outside == 0 and overlapping == 0 and uncovered == 0
        if not ok:
            logger.warning(
                "partition audit failed: volume %s vs %s, %d outside, %d overlapping, %d uncovered cells",
                total, region.volume(), outside, overlapping, uncovered,
            )
        return PartitionAudit(
            ok=ok,
            tiles=len(tiling.tiles),
            volume_total=total,
            region_volume=region.volume(),
            outside=outside,
            overlapping_cells=overlapping,
            uncovered_cells=uncovered,
        )

    def sides_regular(self, tiling: RectTiling) -> bool:
        return all(type_of_rect(t.rect) is not None for t in tiling.tiles)


# Create service instance
tiling_service = TilingService()
