import bisect
import itertools
import logging
import math
from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.exactnum import KAPPA, ONE, QuadNum, ZERO, dyadic
from core.exceptions import SnapConflict, WindowTooSmall
from models.crosssection import LacunaryConfig
from models.diophantine import SegmentKind, SegmentPartition
from models.geometry import CrossSection, Rect, RectModel, Window
from models.tiling import RectTiling, RegularTiling, Tile, TileModel, type_name, unit_type
from models.towers import (
    CoverageReport, LedgerReport, LimitTiling, ShiftLedger, SnappedWindow, Square, SquareModel, SquareTiling,
    ThetaMatching, TowerAudit, TowerFamily, TowerLevel, TowerRun, TowersReport, TowerSpec, TowerTile,
    matching_model
)
from services.crosssection_service import crosssection_service
from services.diophantine_service import diophantine_service
from services.geometry_service import geometry_service
from services.tiling_service import tiling_service

logger = logging.getLogger(__name__)

# Grid offsets of child candidates are multiples of kappa / OFFSET_STEPS
OFFSET_STEPS = 16


def _sup(v: Sequence[QuadNum]) -> QuadNum:
    return max((abs(x) for x in v), default=ZERO)


class TowersService:
    """Service for tower hierarchies and the regular tilings built on them"""

    def __init__(self):
        self.diophantine = diophantine_service
        self.geometry = geometry_service
        self.tiling = tiling_service
        self.crosssection = crosssection_service

    # ============================================
    # Parameters
    # ============================================

    def build_spec(self, dim: int, levels: int) -> TowerSpec:
        """
        Tower parameters with eps_k = 2^-k

        b_k is the least multiple of 1+alpha with b_k >= N(eps_k) + 2(1+alpha),
        btilde_k = b_k + 2 l_{k-1} and l_k = btilde_k + 1+alpha (l_0 = 0).
        """
        out = []
        prev_l = ZERO
        for k in range(1, levels + 1):
            eps = dyadic(k)
            threshold = self.diophantine.n_of_eps(eps)
            b = KAPPA * (math.ceil(QuadNum.from_int(threshold) / KAPPA) + 2)
            btilde = b + prev_l * 2
            l = btilde + KAPPA
            out.append(TowerLevel(k=k, eps=eps, threshold=threshold, b=b, btilde=btilde, l=l))
            prev_l = l
        logger.info("tower spec d=%d: l = %s", dim, [str(t.l) for t in out])
        return TowerSpec(dim=dim, levels=out)

    def _is_kappa_multiple(self, x: QuadNum) -> bool:
        k = x / KAPPA
        return k.is_integer() and k.sign() >= 0

    def validate_spec(self, spec: TowerSpec) -> List[str]:
        """
        Violated constraints of a tower spec

        Returns:
            One message per violation; empty iff the spec is valid
        """
        violations = []
        if spec.kappa != KAPPA:
            violations.append(f"kappa must be 1+alpha, got {spec.kappa}")
        prev_l = ZERO
        prev_eps: Optional[QuadNum] = None
        eps_sum = ZERO
        for level in spec.levels:
            k = level.k
            if level.eps.sign() <= 0:
                violations.append(f"eps_{k} must be positive")
            if prev_eps is not None and not level.eps < prev_eps:
                violations.append(f"eps_{k} = {level.eps} does not decrease")
            eps_sum = eps_sum + level.eps
            if not self._is_kappa_multiple(level.b):
                violations.append(f"b_{k} = {level.b} is not a multiple of 1+alpha")
            if level.eps.sign() > 0 and level.b < self.diophantine.n_of_eps(level.eps) + KAPPA * 2:
                violations.append(f"b_{k} = {level.b} is below N(eps_{k}) + 2(1+alpha)")
            if not self._is_kappa_multiple(level.l):
                violations.append(f"l_{k} = {level.l} is not a multiple of 1+alpha")
            if level.btilde < level.b + prev_l * 2:
                violations.append(f"btilde_{k} = {level.btilde} is below b_{k} + 2 l_{k - 1}")
            if level.l < level.btilde:
                violations.append(f"l_{k} = {level.l} is below btilde_{k}")
            if level.l < level.b + prev_l * 2:
                violations.append(f"l_{k} = {level.l} is below b_{k} + 2 l_{k - 1}")
            prev_l, prev_eps = level.l, level.eps
        if spec.levels and not eps_sum < ONE:
            violations.append(f"sum of eps_k = {eps_sum} is not below 1")
        return violations

    def default_window(self, spec: TowerSpec) -> Window:
        """Box [0, 4 l_K)^d"""
        side = spec.half_side(spec.depth) * 4 if spec.depth else KAPPA * 4
        return Window.box_of(Rect.cube(0, side, spec.dim))

    # ============================================
    # Towers
    # ============================================

    def _place(self, box: Rect, region: Rect, body: Rect, offset: QuadNum) -> CrossSection:
        cfg = LacunaryConfig(body=body, mesh=KAPPA, offset=offset, region=region, closed=True)
        return self.crosssection.extend_to_maximal(CrossSection((), Window.box_of(box)), cfg)

    def build_towers(self, window: Window, spec: TowerSpec, seed: int = 0) -> TowerFamily:
        """
        Place the squares top-down

        Level-K squares fill the window greedily; inside every level-(k+1)
        square the level-k squares fill shrink(parent, b_{k+1}), their grid
        moved by a seeded offset.

        Args:
            window: Box window
            spec: Tower parameters
            seed: Seed for the grid offsets below the top level

        Returns:
            TowerFamily with squares identified as "k:n"

        Raises:
            WindowTooSmall: If a window side is below 4 l_K
        """
        if spec.depth == 0:
            return TowerFamily(window, spec)
        top = spec.depth
        l_top = spec.half_side(top)
        box = window.region
        if window.is_torus or any(s < l_top * 4 for s in box.sides()):
            raise WindowTooSmall(f"window {box} needs sides of at least 4 l_K = {l_top * 4}")

        rng = np.random.default_rng(seed)
        squares: Dict[str, Square] = {}
        section = self._place(box, self.geometry.shrink(box, l_top), spec.square(top), ZERO)
        for n, c in enumerate(section.points):
            sid = f"{top}:{n}"
            squares[sid] = Square(sid, top, c, spec.square(top).translate(c))

        for k in range(top - 1, 0, -1):
            n = 0
            parents = sorted((s for s in squares.values() if s.level == k + 1), key=lambda s: s.anchor)
            for parent in parents:
                inner = self.geometry.shrink(parent.rect, spec.level(k + 1).b)
                offset = KAPPA * Fraction(int(rng.integers(0, OFFSET_STEPS)), OFFSET_STEPS)
                placed = self._place(inner, self.geometry.shrink(inner, spec.half_side(k)), spec.square(k), offset)
                for c in placed.points:
                    sid = f"{k}:{n}"
                    squares[sid] = Square(sid, k, c, spec.square(k).translate(c), parent.id)
                    n += 1
            logger.info("tower level %d: %d squares", k, n)
        return TowerFamily(window, spec, squares)

    def audit_family(self, family: TowerFamily) -> List[str]:
        """Lacunarity, nesting and non-empty parents, checked exactly"""
        spec = family.spec
        violations = []
        for k in range(1, spec.depth + 1):
            if not self.geometry.is_lacunary(family.section(k), spec.square(k)):
                violations.append(f"level {k} squares overlap")
        for sq in family.squares.values():
            if sq.level == spec.depth:
                if not family.window.region.contains_rect(sq.rect):
                    violations.append(f"square {sq.id} leaves the window")
            else:
                parent = family.squares.get(sq.parent)
                if parent is None:
                    violations.append(f"square {sq.id} has no parent")
                    continue
                inner = self.geometry.shrink(parent.rect, spec.level(parent.level).b)
                if not inner.contains_rect(sq.rect):
                    violations.append(f"square {sq.id} is not inside shrink({parent.id}, b_{parent.level})")
            if sq.level > 1 and not family.children(sq.id):
                violations.append(f"square {sq.id} has no child")
        return violations

    # ============================================
    # Snapping
    # ============================================

    def _nearest(self, nodes: List[QuadNum], x: QuadNum) -> int:
        i = bisect.bisect_left(nodes, x)
        if i == 0:
            return 0
        if i == len(nodes):
            return len(nodes) - 1
        # ties toward -infinity
        return i if nodes[i] - x < x - nodes[i - 1] else i - 1

    def snap_windows(
        self,
        parent: Rect,
        children: Sequence[Square],
        nodes: Sequence[Sequence[QuadNum]]
    ) -> List[SnappedWindow]:
        """
        Move every child square onto canonical nodes of the parent region

        Each lower corner goes to the nearest node (ties toward -infinity)
        among the nodes leaving the window inside the parent. A window meeting
        an earlier one is pushed along the first axis to the next free node.

        Args:
            parent: Region whose canonical grid is used
            children: Squares inside the region, disjoint
            nodes: Per-axis canonical nodes of the region

        Returns:
            One window per child, in the children's order

        Raises:
            SnapConflict: If no free node remains for a pushed window
        """
        out: List[SnappedWindow] = []
        for child in sorted(children, key=lambda s: s.anchor):
            sides = child.rect.sides()
            admissible = [
                [n for n in axis if n + side <= hi]
                for axis, side, hi in zip(nodes, sides, parent.hi)
            ]
            lo = [axis[self._nearest(axis, x)] for axis, x in zip(admissible, child.rect.lo)]
            rect = Rect.at(tuple(lo), sides)
            pushed = False
            if any(w.rect.overlaps(rect) for w in out):
                pushed = True
                start = admissible[0].index(lo[0]) + 1
                for n in admissible[0][start:]:
                    rect = Rect.at((n,) + tuple(lo[1:]), sides)
                    if not any(w.rect.overlaps(rect) for w in out):
                        break
                else:
                    raise SnapConflict(f"no free canonical position for square {child.id}")
                logger.warning("snapped window of %s pushed to %s", child.id, rect)
            out.append(SnappedWindow(rect, child.id, pushed))
        return out

    # ============================================
    # Extension
    # ============================================

    def _base_level(self, family: TowerFamily) -> Dict[str, SquareTiling]:
        b = family.spec.level(1).b
        out = {}
        for sq in family.level(1):
            region = self.geometry.shrink(sq.rect, b)
            tiles = tuple(TowerTile(t, (sq.id,)) for t in self.tiling.canonical_tiles(region))
            out[sq.id] = SquareTiling(sq.id, region, tiles)
        return out

    def extend_level(
        self,
        family: TowerFamily,
        fragments: Dict[str, SquareTiling],
        ledger: ShiftLedger,
        k: int
    ) -> Tuple[Dict[str, SquareTiling], ShiftLedger, List[str]]:
        """
        Tile every level-k region around its shifted children

        Level 1 regions are tiled canonically. Above that, every child is
        snapped to a window on the canonical grid, moved along each axis by
        the delta of extend_interval, and its tiling completed to the window;
        the rest of the region keeps its canonical tiles.

        Args:
            family: Tower family
            fragments: Tilings of the level-(k-1) regions (unused for k = 1)
            ledger: Shifts so far
            k: Level to tile

        Returns:
            (tilings of the level-k regions, updated ledger, ids of pushed children)

        Raises:
            NoAdmissiblePair: Propagated from extend_interval
        """
        if k == 1:
            return self._base_level(family), ledger, []

        spec = family.spec
        eps = spec.level(k - 1).eps
        out: Dict[str, SquareTiling] = {}
        pushed: List[str] = []
        for sq in family.level(k):
            region = self.geometry.shrink(sq.rect, spec.level(k).b)
            nodes = self.tiling.canonical_nodes(region)
            kids = family.children(sq.id)
            windows = self.snap_windows(region, kids, nodes)
            tiles: List[TowerTile] = []
            for window in windows:
                child = fragments[window.child]
                if window.pushed:
                    pushed.append(window.child)
                labels = []
                delta = []
                for i in range(spec.dim):
                    ext = self.diophantine.extend_interval(
                        child.region.lo[i] - window.rect.lo[i],
                        self.tiling.kappa_multiples(child.region)[i],
                        self.tiling.kappa_multiples(window.rect)[i],
                        eps,
                    )
                    delta.append(ext.delta)
                    labels.append(SegmentPartition(start=window.rect.lo[i], labels=ext.segments()))
                ledger = ledger.with_shift(window.child, tuple(delta))
                moved = child.translate(tuple(delta))
                tiles.extend(t.inside(sq.id) for t in moved.tiles)
                for tile in self.tiling.product_tiles(labels, "0"):
                    if not moved.region.contains_rect(tile.rect):
                        tiles.append(TowerTile(tile, (sq.id,)))
            for tile in self.tiling.canonical_tiles(region):
                if not any(w.rect.contains_rect(tile.rect) for w in windows):
                    tiles.append(TowerTile(tile, (sq.id,)))
            out[sq.id] = SquareTiling(sq.id, region, tuple(tiles))
        logger.info("level %d: %d regions tiled, %d tiles", k, len(out), sum(len(f.tiles) for f in out.values()))
        return out, ledger, pushed

    # ============================================
    # Limit tiling
    # ============================================

    def _theta(self, tower_tiles: Sequence[TowerTile], dim: int) -> ThetaMatching:
        """Pair unit tiles with type-a tiles fresh in the same region, in anchor order"""
        unit = unit_type(dim)
        fresh: Dict[str, Dict[Tuple, List]] = defaultdict(lambda: defaultdict(list))
        for t in tower_tiles:
            fresh[t.regions[0]][t.tile.kind].append(t.tile.anchor)
        maps: Dict[Tuple, Dict] = defaultdict(dict)
        unit_anchors = []
        for region in sorted(fresh):
            groups = fresh[region]
            units = sorted(groups.get(unit, []))
            unit_anchors.extend(units)
            for kind, anchors in groups.items():
                if kind == unit:
                    continue
                if len(anchors) != len(units):
                    logger.warning("region %s: %d unit tiles but %d of type %s", region, len(units), len(anchors), type_name(kind))
                for a, b in zip(units, sorted(anchors)):
                    maps[kind][a] = b
        return ThetaMatching(unit=unit, unit_anchors=tuple(sorted(unit_anchors)), maps=dict(maps))

    def limit_tiling(
        self,
        family: TowerFamily,
        fragments: Dict[str, SquareTiling],
        ledger: ShiftLedger,
        label_prefix: str = "F"
    ) -> LimitTiling:
        """
        Regular tilings of the top-level regions and the matchings theta_a

        Every top-level square is one fragment; its tiles carry the label
        prefix followed by the square's index.
        """
        spec = family.spec
        tilings = []
        tower_tiles: List[TowerTile] = []
        for n, sq in enumerate(family.level(spec.depth)):
            frag = fragments[sq.id]
            label = f"{label_prefix}{n}"
            labelled = [TowerTile(Tile(t.tile.rect, label, t.tile.kind), t.regions) for t in frag.tiles]
            tower_tiles.extend(labelled)
            tilings.append(RegularTiling(Window.box_of(frag.region), tuple(t.tile for t in labelled)))
        regions = {}
        for sq in family.squares.values():
            shift = ledger.accumulated(family, sq.id)
            regions[sq.id] = self.geometry.shrink(sq.rect, spec.level(sq.level).b).translate(shift)
        theta = self._theta(tower_tiles, spec.dim)
        return LimitTiling(tuple(tilings), theta, ledger, regions, tuple(tower_tiles))

    def regular_tiling(
        self,
        spec: TowerSpec,
        window: Optional[Window] = None,
        seed: int = 0,
        label_prefix: str = "F"
    ) -> TowerRun:
        """Build the towers, extend level by level and take the limit tiling"""
        window = window or self.default_window(spec)
        family = self.build_towers(window, spec, seed)
        fragments: Dict[str, SquareTiling] = {}
        ledger = ShiftLedger()
        pushed: List[str] = []
        for k in range(1, spec.depth + 1):
            fragments, ledger, moved = self.extend_level(family, fragments, ledger, k)
            pushed.extend(moved)
        limit = self.limit_tiling(family, fragments, ledger, label_prefix)
        return TowerRun(family, limit, tuple(pushed))

    # ============================================
    # Audits
    # ============================================

    def audit_regular(self, run: TowerRun) -> List[str]:
        """Partition, sides, per-region type counts, theta bijectivity and labels"""
        limit = run.limit
        dim = run.family.spec.dim
        violations = []
        for tiling in limit.tilings:
            audit = self.tiling.partition_audit(tiling)
            if not audit.ok:
                violations.append(f"tiling of {tiling.window.region} is not a partition")
            if not self.tiling.sides_regular(tiling):
                violations.append(f"tiling of {tiling.window.region} has sides outside {{1, alpha}}")

        by_region: Dict[str, List[Tile]] = defaultdict(list)
        for t in limit.tower_tiles:
            for region in t.regions:
                by_region[region].append(t.tile)
        for region, tiles in sorted(by_region.items()):
            rect = limit.regions[region]
            if not self.tiling.partition_audit(RectTiling(Window.box_of(rect), tuple(tiles))).ok:
                violations.append(f"region {region} is not tiled exactly")
            counts = defaultdict(int)
            for tile in tiles:
                counts[tile.kind] += 1
            if len(counts) != 2 ** dim or len(set(counts.values())) != 1:
                violations.append(f"region {region} has unequal type counts {dict((type_name(a), n) for a, n in counts.items())}")

        labels = {t.tile.anchor: t.tile.label for t in limit.tower_tiles}
        kinds = {t.tile.anchor: t.tile.kind for t in limit.tower_tiles}
        units = set(limit.theta.unit_anchors)
        for kind in itertools.product(list(SegmentKind), repeat=dim):
            if kind == limit.theta.unit:
                continue
            theta = limit.theta.maps.get(kind, {})
            targets = {a for a, k in kinds.items() if k == kind}
            if set(theta) != units or set(theta.values()) != targets or len(set(theta.values())) != len(theta):
                violations.append(f"theta_{type_name(kind)} is not a bijection onto its type")
            if any(labels[a] != labels[b] for a, b in theta.items()):
                violations.append(f"theta_{type_name(kind)} changes fragment labels")
        return violations

    def ledger_report(self, run: TowerRun) -> LedgerReport:
        family = run.family
        spec = family.spec
        ledger = run.limit.ledger
        increments: Dict[int, QuadNum] = {}
        ok = True
        max_total = ZERO
        for sq in family.squares.values():
            step = _sup(ledger.own(sq.id, spec.dim))
            increments[sq.level] = max(increments.get(sq.level, ZERO), step)
            if step > spec.level(sq.level).eps:
                ok = False
            max_total = max(max_total, _sup(ledger.accumulated(family, sq.id)))
        eps_sum = sum((t.eps for t in spec.levels), ZERO)
        if max_total > eps_sum:
            ok = False
        return LedgerReport(max_increment=dict(sorted(increments.items())), max_total=max_total, eps_sum=eps_sum, ok=ok)

    def coverage(self, run: TowerRun) -> CoverageReport:
        """Fraction of the window inside the top-level squares"""
        family = run.family
        region = family.window.region
        covered = ZERO
        for sq in family.level(family.spec.depth):
            piece = sq.rect.intersect(region)
            if piece is not None:
                covered = covered + piece.volume()
        bound = ONE - sum((t.eps for t in family.spec.levels), ZERO)
        fraction = covered / region.volume()
        return CoverageReport(
            covered=covered,
            window=region.volume(),
            fraction=str(fraction),
            bound=str(bound),
            ok=not fraction < bound,
        )

    def audit(self, run: TowerRun) -> TowerAudit:
        return TowerAudit(
            family_violations=self.audit_family(run.family),
            regular_violations=self.audit_regular(run),
            coverage=self.coverage(run),
            ledger=self.ledger_report(run),
            pushed_windows=len(run.pushed),
        )

    def report(self, run: TowerRun, audit: TowerAudit, include_tiles: bool = False) -> TowersReport:
        """JSON report of a run; tiles and matchings only on request"""
        family = run.family
        squares = [
            SquareModel(
                id=sq.id,
                level=sq.level,
                anchor=list(sq.anchor),
                parent=sq.parent,
                shift=list(run.limit.ledger.accumulated(family, sq.id)),
            )
            for sq in sorted(family.squares.values(), key=lambda s: (-s.level, s.anchor))
        ]
        counts: Dict[str, Dict[str, int]] = defaultdict(lambda: defaultdict(int))
        for t in run.limit.tower_tiles:
            counts[t.regions[-1]][type_name(t.tile.kind)] += 1
        type_counts = {region: dict(sorted(c.items())) for region, c in sorted(counts.items())}
        return TowersReport(
            spec=family.spec,
            window=RectModel.of(family.window.region),
            squares=squares,
            type_counts=type_counts,
            tiles=[TileModel.of(t) for t in run.limit.tiles()] if include_tiles else None,
            matchings=matching_model(run.limit.theta) if include_tiles else None,
            audit=audit,
            verdict="PASS" if audit.ok else "FAIL",
        )


# Create service instance
towers_service = TowersService()
