import itertools
import logging
import math
from typing import Iterator, List

import numpy as np

from core.exactnum import QuadNum, dyadic
from core.exceptions import NotLacunaryInput
from models.crosssection import (
    CocompactnessCertificate, IndependencePartition, LacunaryConfig
)
from models.geometry import CrossSection, Point, Rect, RectModel, Window
from services.geometry_service import geometry_service

logger = logging.getLogger(__name__)


class CrossSectionService:
    """Service for greedy lacunary cross-sections"""

    def __init__(self):
        self.geometry = geometry_service

    def _in_translate(self, window: Window, x: Point, y: Point, body: Rect) -> bool:
        """Whether y lies in x + W (some lift of the displacement on a torus)"""
        for axis, delta in enumerate(window.displacement(x, y)):
            lo, hi = body.lo[axis], body.hi[axis]
            if window.is_torus:
                period = window.periods[axis]
                delta = delta + period * math.ceil((lo - delta) / period)
            if not (lo <= delta < hi):
                return False
        return True

    def independent_partition(self, section: CrossSection, body: Rect) -> IndependencePartition:
        """
        Greedy coloring of the graph {(x, y): y in W + x, x != y}

        Points are colored in the section's order; each takes the smallest
        color unused by its already colored neighbours.

        Args:
            section: Finite cross-section
            body: W

        Returns:
            IndependencePartition whose classes are W-independent
        """
        window = section.window
        pts = section.points
        colors = {}
        for i, x in enumerate(pts):
            taken = set()
            for y in pts[:i]:
                if self._in_translate(window, x, y, body) or self._in_translate(window, y, x, body):
                    taken.add(colors[y])
            color = 0
            while color in taken:
                color += 1
            colors[x] = color
        count = max(colors.values()) + 1 if colors else 0
        classes = tuple(tuple(p for p in pts if colors[p] == c) for c in range(count))
        return IndependencePartition(classes=classes, colors=colors)

    def candidate_stream(self, window: Window, cfg: LacunaryConfig, rounds: int) -> Iterator[Point]:
        """Explicit candidates, or a grid whose mesh halves every round"""
        if cfg.candidates is not None:
            for p in cfg.candidates:
                yield window.reduce(tuple(p))
            return
        region = cfg.region or window.region
        rng = np.random.default_rng(cfg.seed) if cfg.seed is not None else None
        for r in range(rounds):
            mesh = cfg.mesh * dyadic(r)
            axes: List[List[QuadNum]] = []
            for lo, hi in zip(region.lo, region.hi):
                start = lo + cfg.offset
                values = []
                j = 0
                while True:
                    x = start + mesh * j
                    if x > hi or (x == hi and not cfg.closed):
                        break
                    values.append(x)
                    j += 1
                axes.append(values)
            grid = list(itertools.product(*axes))
            if rng is not None:
                grid = [grid[i] for i in rng.permutation(len(grid))]
            for p in grid:
                yield window.reduce(p)

    def extend_to_maximal(self, section: CrossSection, cfg: LacunaryConfig, rounds: int = 1) -> CrossSection:
        """
        Greedily add candidates keeping U-lacunarity

        Args:
            section: U-lacunary starting section
            cfg: Bodies and candidate stream
            rounds: Number of grid rounds

        Returns:
            Superset of the input, lexicographically ordered

        Raises:
            NotLacunaryInput: If the input is not U-lacunary
        """
        window = section.window
        if not self.geometry.is_lacunary(section, cfg.body):
            raise NotLacunaryInput("input cross-section is not lacunary for the given body")

        accepted = list(section.points)
        seen = set(accepted)
        for x in self.candidate_stream(window, cfg, rounds):
            if x in seen:
                continue
            if all(self.geometry.translates_disjoint(window, x, c, cfg.body) for c in accepted):
                accepted.append(x)
                seen.add(x)
        logger.info("lacunary extension: %d -> %d points over %d rounds", len(section), len(accepted), rounds)
        return CrossSection.lexicographic(accepted, window)

    def certificate(self, section: CrossSection, cfg: LacunaryConfig) -> CocompactnessCertificate:
        """Check cocompactness against U + U, or V when one is configured"""
        body = cfg.enlargement or self.geometry.minkowski_sum(cfg.body, cfg.body)
        holds = self.geometry.is_cocompact(section, body)
        radius = max(max(abs(a), abs(b)) for a, b in zip(body.lo, body.hi))
        return CocompactnessCertificate(body=RectModel.of(body), holds=holds, radius=radius)


# Create service instance
crosssection_service = CrossSectionService()
