import itertools
import logging
import math
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.config import settings
from core.exactnum import ONE, QuadNum, ZERO, dyadic, q
from core.exceptions import (
    InconsistentRatio, LabelMismatch, PreconditionError, ProviderExhausted, TypeMismatch, UnknownAnchor
)
from models.geometry import Point
from models.loe import (
    BasisRect, BlockAudit, BlockId, BlockMap, BlockPair, CoverageRow, FragmentTile, MapPiece,
    NormalizationReport, NormalizationVerdict, PointMap, Side, StageTrace
)
from models.towers import LimitTiling

logger = logging.getLogger(__name__)

ZETA_MIN = QuadNum.from_int(4)
ZETA_MAX = QuadNum.from_int(5)
# Dimension functions are drawn from {4 + j / ZETA_STEPS}
ZETA_STEPS = 100
# Distance between consecutive tile anchors along the first axis
SPACING = 6


class OrbitFragmentProvider:
    """
    Materialized tiles of one orbit fragment and its compressibility maps

    tau(j, c) summons a fresh tile for the materialized tile c. Fresh tiles
    are issued lazily, once per (j, c), so every tau_j is injective and the
    images of different tau_j are disjoint; a fresh tile carries the label
    of the tile it was summoned for.
    """

    def __init__(
        self,
        side: Side,
        core: Sequence[FragmentTile],
        seed: int = 0,
        fresh_zeta: Optional[Sequence] = None,
        budget: Optional[int] = None
    ):
        self.side = side
        self.core: List[FragmentTile] = list(core)
        for tile in self.core:
            self._check_zeta(tile.zeta)
        self._rng = np.random.default_rng(seed)
        self._fresh_zeta = tuple(q(z) for z in fresh_zeta) if fresh_zeta is not None else None
        self.budget = settings.FRESH_TILE_BUDGET if budget is None else budget
        self._tau: Dict[Tuple[int, int], FragmentTile] = {}
        self._by_index: Dict[int, FragmentTile] = {t.index: t for t in self.core}
        self._by_anchor: Dict[Point, FragmentTile] = {t.anchor: t for t in self.core}
        self._next_index = max(self._by_index, default=-1) + 1
        self._fresh_base = max((t.anchor[0] for t in self.core), default=ZERO) + SPACING

    @classmethod
    def generate(
        cls,
        side: Side,
        count: int,
        dim: int,
        seed: int = 0,
        labels: int = 1,
        zeta: Optional[Sequence] = None,
        fresh_zeta: Optional[Sequence] = None,
        budget: Optional[int] = None
    ) -> "OrbitFragmentProvider":
        """
        Fragment of `count` tiles in a row, split into `labels` consecutive orbit labels

        Args:
            side: X or Y
            count: Number of materialized tiles
            dim: d
            seed: Seed for the dimension functions
            labels: Number of orbit labels
            zeta: Dimension vector shared by all tiles; drawn per tile when absent
            fresh_zeta: Dimension vector of summoned tiles; drawn per tile when absent
            budget: Largest number of fresh tiles
        """
        rng = np.random.default_rng(seed)
        tiles = []
        for i in range(count):
            z = tuple(q(v) for v in zeta) if zeta is not None else cls._draw(rng, dim)
            anchor = (QuadNum.from_int(SPACING * i),) + (ZERO,) * (dim - 1)
            tiles.append(FragmentTile(i, f"{side.value}{i * labels // count}", anchor, z))
        return cls(side, tiles, seed=seed + 1, fresh_zeta=fresh_zeta, budget=budget)

    @staticmethod
    def _draw(rng: np.random.Generator, dim: int) -> Tuple[QuadNum, ...]:
        return tuple(
            ZETA_MIN + Fraction(int(rng.integers(0, ZETA_STEPS + 1)), ZETA_STEPS) for _ in range(dim)
        )

    @staticmethod
    def _check_zeta(zeta: Sequence[QuadNum]):
        for z in zeta:
            if z < ZETA_MIN or z > ZETA_MAX:
                raise PreconditionError(f"dimension function {z} outside [4, 5]")

    @property
    def dim(self) -> int:
        return self.core[0].dim if self.core else 0

    @property
    def fresh(self) -> List[FragmentTile]:
        return [self._tau[key] for key in sorted(self._tau, key=lambda key: self._tau[key].index)]

    def tile(self, anchor: Point) -> FragmentTile:
        try:
            return self._by_anchor[tuple(anchor)]
        except KeyError:
            raise UnknownAnchor(f"no tile of fragment {self.side.value} at {anchor}")

    def by_index(self, index: int) -> FragmentTile:
        try:
            return self._by_index[index]
        except KeyError:
            raise UnknownAnchor(f"no tile {index} in fragment {self.side.value}")

    def tau(self, j: int, index: int) -> FragmentTile:
        """
        Fresh tile tau_j(c) for the materialized tile with the given index

        Raises:
            ProviderExhausted: If the fresh-tile budget is spent
        """
        if j < 1:
            raise PreconditionError(f"compressibility maps start at j=1, got {j}")
        key = (j, index)
        tile = self._tau.get(key)
        if tile is not None:
            return tile
        if len(self._tau) >= self.budget:
            raise ProviderExhausted(f"fragment {self.side.value} refuses more than {self.budget} fresh tiles")
        owner = self.by_index(index)
        zeta = self._fresh_zeta or self._draw(self._rng, owner.dim)
        self._check_zeta(zeta)
        anchor = (self._fresh_base + SPACING * len(self._tau),) + (ZERO,) * (owner.dim - 1)
        tile = FragmentTile(self._next_index, owner.label, anchor, zeta, True, index, j)
        self._next_index += 1
        self._tau[key] = tile
        self._by_index[tile.index] = tile
        self._by_anchor[tile.anchor] = tile
        logger.debug("fragment %s: tau_%d(%d) -> tile %d", self.side.value, j, index, tile.index)
        return tile


class LoeService:
    """Service for the back-and-forth construction and normalization checks"""

    # ============================================
    # Blocks
    # ============================================

    def block_counts(self, zeta, k: int) -> int:
        """
        Smallest n with 2^-k n / zeta > 1 - 2^-(k+1)

        Args:
            zeta: Side length in [4, 5]
            k: Level

        Returns:
            n_k, which also satisfies n_k 2^-k / zeta <= 1 - 2^-(k+2)
        """
        zeta = q(zeta)
        if zeta < ZETA_MIN or zeta > ZETA_MAX:
            raise PreconditionError(f"zeta must lie in [4, 5], got {zeta}")
        if k < 0:
            raise PreconditionError(f"level must be non-negative, got {k}")
        return math.floor(zeta * (QuadNum.from_int(2 ** k) - Fraction(1, 2))) + 1

    def counts(self, tile: FragmentTile, k: int) -> Tuple[int, ...]:
        return tuple(self.block_counts(z, k) for z in tile.zeta)

    def new_blocks(self, tile: FragmentTile, k: int) -> List[BlockId]:
        """Level-k blocks of the tile outside its level-(k-1) grid, in index order"""
        n = self.counts(tile, k)
        inner = tuple(2 * m for m in self.counts(tile, k - 1)) if k > 0 else (0,) * tile.dim
        return [
            BlockId(tile.anchor, k, idx)
            for idx in itertools.product(*[range(m) for m in n])
            if not all(i < m for i, m in zip(idx, inner))
        ]

    def _suppliers(self, provider: OrbitFragmentProvider, index: int) -> Iterator[FragmentTile]:
        yield provider.by_index(index)
        j = 1
        while True:
            yield provider.tau(j, index)
            j += 1

    # ============================================
    # Seed bijection
    # ============================================

    def default_seed(self, x: OrbitFragmentProvider, y: OrbitFragmentProvider) -> Dict[int, int]:
        """Pair materialized tiles in issue order"""
        if len(x.core) != len(y.core):
            raise PreconditionError(f"fragments have {len(x.core)} and {len(y.core)} materialized tiles")
        return {a.index: b.index for a, b in zip(x.core, y.core)}

    def check_seed(self, x: OrbitFragmentProvider, y: OrbitFragmentProvider, seed: Dict[int, int]) -> Dict[str, str]:
        """
        Check the seed bijection and return the label map it induces

        Raises:
            PreconditionError: If the seed is not a bijection of the materialized tiles
            LabelMismatch: If it does not induce a bijection of labels
        """
        if set(seed) != {t.index for t in x.core} or sorted(seed.values()) != sorted(t.index for t in y.core):
            raise PreconditionError("seed must pair the materialized tiles bijectively")
        labels: Dict[str, str] = {}
        for a, b in seed.items():
            la, lb = x.by_index(a).label, y.by_index(b).label
            if labels.setdefault(la, lb) != lb:
                raise LabelMismatch(f"label {la} is sent to both {labels[la]} and {lb}")
        if len(set(labels.values())) != len(labels):
            raise LabelMismatch("seed merges two orbit labels")
        return labels

    # ============================================
    # Back and forth
    # ============================================

    def forth_step(
        self,
        state: BlockMap,
        x: OrbitFragmentProvider,
        y: OrbitFragmentProvider,
        seed: Dict[int, int],
        k: int
    ) -> BlockMap:
        """
        Map every unused level-k block of every materialized X tile

        Targets are the free level-k blocks of the paired Y tile, then of the
        tiles tau_1, tau_2, ... summoned for it.

        Raises:
            ProviderExhausted: If Y refuses fresh tiles
        """
        used_src = {p.source for p in state.pairs}
        used_tgt = {p.target for p in state.pairs}
        summoned = len(y.fresh)
        pairs: List[BlockPair] = []
        for tile in x.core:
            demand = [b for b in self.new_blocks(tile, k) if b not in used_src]
            suppliers = self._suppliers(y, seed[tile.index])
            while demand:
                supplier = next(suppliers)
                free = [b for b in self.new_blocks(supplier, k) if b not in used_tgt]
                for source, target in zip(demand, free):
                    pairs.append(BlockPair(source, target, None, f"forth-{k}"))
                    used_tgt.add(target)
                demand = demand[len(free):]
        fresh = len(y.fresh) - summoned
        measure = dyadic(k * x.dim) * len(pairs) if pairs else ZERO
        logger.info("forth step %d: %d blocks mapped, %d fresh Y tiles", k, len(pairs), fresh)
        return state.extended(pairs, StageTrace(stage=f"forth-{k}", level=k, mapped=len(pairs), fresh_tiles=fresh, measure=measure))

    def back_step(
        self,
        state: BlockMap,
        x: OrbitFragmentProvider,
        y: OrbitFragmentProvider,
        seed: Dict[int, int],
        k: int
    ) -> BlockMap:
        """
        Cover every level-k block of every materialized Y tile left out of the range

        Each such block is split into its 2^d dyadic children, every child the
        image of one level-(k+1) block of the paired X tile, then of the tiles
        tau_1, tau_2, ... summoned for it.

        Raises:
            ProviderExhausted: If X refuses fresh tiles
        """
        inverse = {b: a for a, b in seed.items()}
        covered = {p.target for p in state.pairs}
        used_src = {p.source for p in state.pairs}
        summoned = len(x.fresh)
        parts = 2 ** y.dim if y.core else 1
        pairs: List[BlockPair] = []
        for tile in y.core:
            demand = [(b, part) for b in self.new_blocks(tile, k) if b not in covered for part in range(parts)]
            suppliers = self._suppliers(x, inverse[tile.index])
            while demand:
                supplier = next(suppliers)
                free = [b for b in self.new_blocks(supplier, k + 1) if b not in used_src]
                for source, (target, part) in zip(free, demand):
                    pairs.append(BlockPair(source, target, part, f"back-{k}"))
                    used_src.add(source)
                demand = demand[len(free):]
        fresh = len(x.fresh) - summoned
        measure = dyadic((k + 1) * y.dim) * len(pairs) if pairs else ZERO
        logger.info("back step %d: %d children covered, %d fresh X tiles", k, len(pairs), fresh)
        return state.extended(pairs, StageTrace(stage=f"back-{k}", level=k, mapped=len(pairs), fresh_tiles=fresh, measure=measure))

    def run_back_and_forth(
        self,
        x: OrbitFragmentProvider,
        y: OrbitFragmentProvider,
        seed: Optional[Dict[int, int]] = None,
        levels: int = 0
    ) -> BlockMap:
        """
        Alternate forth and back steps for levels 0..K

        Args:
            x: Source fragment
            y: Target fragment
            seed: Bijection of materialized tile indices; issue order when absent
            levels: K

        Returns:
            BlockMap with one stage trace per step

        Raises:
            LabelMismatch: If the seed is not label consistent
        """
        seed = seed if seed is not None else self.default_seed(x, y)
        self.check_seed(x, y, seed)
        state = BlockMap()
        for k in range(levels + 1):
            state = self.forth_step(state, x, y, seed, k)
            state = self.back_step(state, x, y, seed, k)
        return state

    # ============================================
    # Audits
    # ============================================

    def _coverage_row(self, side: Side, tile: FragmentTile, covered: QuadNum, levels: int) -> CoverageRow:
        n = self.counts(tile, levels)
        scale = dyadic(levels)
        fractions = [scale * m / z for m, z in zip(n, tile.zeta)]
        lo, hi = ONE - dyadic(levels + 1), ONE - dyadic(levels + 2)
        expected = ONE
        for m in n:
            expected = expected * (scale * m)
        ok = covered == expected and all(lo < f <= hi for f in fractions)
        return CoverageRow(
            side=side.value, index=tile.index, label=tile.label, counts=list(n),
            fractions=[str(f) for f in fractions], covered=covered, expected=expected, ok=ok,
        )

    def audit(self, state: BlockMap, x: OrbitFragmentProvider, y: OrbitFragmentProvider, levels: int) -> BlockAudit:
        """Injectivity, measure, level discipline, labels and per-tile coverage"""
        violations = []
        sources = [p.source for p in state.pairs]
        whole = [p.target for p in state.pairs if p.part is None]
        split = [(p.target, p.part) for p in state.pairs if p.part is not None]
        injective = (
            len(set(sources)) == len(sources)
            and len(set(whole)) == len(whole)
            and len(set(split)) == len(split)
            and not set(whole) & {t for t, _ in split}
        )
        if not injective:
            violations.append("block map is not injective")

        measure_ok = all(p.source.rect().volume() == p.target_rect().volume() for p in state.pairs)
        parts = defaultdict(set)
        for target, part in split:
            parts[target].add(part)
        if any(len(s) != 2 ** y.dim for s in parts.values()):
            measure_ok = False
        if not measure_ok:
            violations.append("block map does not preserve measure")

        levels_ok = all(
            p.source.level == p.target.level if p.part is None else p.source.level == p.target.level + 1
            for p in state.pairs
        )
        if not levels_ok:
            violations.append("block levels break the forth/back discipline")

        labels_ok = True
        try:
            self.induced_label_map(self.point_map_from_blocks(state, x, y))
        except LabelMismatch:
            labels_ok = False
            violations.append("block map does not respect orbit labels")

        covered_x: Dict[Point, QuadNum] = defaultdict(lambda: ZERO)
        covered_y: Dict[Point, QuadNum] = defaultdict(lambda: ZERO)
        for p in state.pairs:
            if p.source.level <= levels:
                covered_x[p.source.anchor] = covered_x[p.source.anchor] + p.source.rect().volume()
            if p.target.level <= levels:
                covered_y[p.target.anchor] = covered_y[p.target.anchor] + p.target_rect().volume()
        rows = [self._coverage_row(Side.X, t, covered_x[t.anchor], levels) for t in x.core]
        rows += [self._coverage_row(Side.Y, t, covered_y[t.anchor], levels) for t in y.core]
        for row in rows:
            if not row.ok:
                violations.append(f"tile {row.side}{row.index} coverage {row.covered} != {row.expected} or outside the level window")

        return BlockAudit(
            injective=injective,
            measure_preserving=measure_ok,
            levels_ok=levels_ok,
            labels_ok=labels_ok,
            coverage=rows,
            violations=violations,
        )

    # ============================================
    # Point maps and normalization
    # ============================================

    def point_map_from_blocks(self, state: BlockMap, x: OrbitFragmentProvider, y: OrbitFragmentProvider) -> PointMap:
        """Affine pieces block to block (or block to dyadic child)"""
        pieces = tuple(
            MapPiece(p.source.rect(), x.tile(p.source.anchor).label, p.target_rect(), y.tile(p.target.anchor).label)
            for p in state.pairs
        )
        return PointMap(pieces)

    def induced_label_map(self, point_map: PointMap) -> Dict[str, str]:
        """
        Bijection of orbit labels induced by a map

        Raises:
            LabelMismatch: If a label is split or two labels merge
        """
        labels: Dict[str, str] = {}
        for piece in point_map.pieces:
            if labels.setdefault(piece.source_label, piece.target_label) != piece.target_label:
                raise LabelMismatch(f"label {piece.source_label} is sent to several labels")
        if len(set(labels.values())) != len(labels):
            raise LabelMismatch("two orbit labels are sent to one")
        return dict(sorted(labels.items()))

    def verify_normalization(self, point_map: PointMap, basis: Optional[Sequence[BasisRect]] = None) -> NormalizationReport:
        """
        Ratio of image measure to source measure per orbit label

        Every piece maps affinely, so the ratio is constant on a piece. With a
        basis only pieces meeting a basis rectangle of the same label count.

        Args:
            point_map: Map to check
            basis: Test rectangles; all pieces when absent

        Returns:
            NormalizationReport with verdict LOE (all ratios 1), HOE (one
            common ratio) or wHOE

        Raises:
            InconsistentRatio: If the ratio is not constant on some label
        """
        ratios: Dict[str, QuadNum] = {}
        for piece in point_map.pieces:
            if basis is not None and not any(
                b.label == piece.source_label and b.rect.overlaps(piece.source) for b in basis
            ):
                continue
            r = piece.ratio()
            if ratios.setdefault(piece.source_label, r) != r:
                raise InconsistentRatio(
                    f"label {piece.source_label} has ratios {ratios[piece.source_label]} and {r}"
                )
        values = set(ratios.values())
        if values <= {ONE}:
            verdict = NormalizationVerdict.LOE
        elif len(values) == 1:
            verdict = NormalizationVerdict.HOE
        else:
            verdict = NormalizationVerdict.WHOE
        return NormalizationReport(
            ratios=dict(sorted(ratios.items())),
            label_map=self.induced_label_map(point_map),
            pieces=len(point_map.pieces),
            verdict=verdict,
        )

    # ============================================
    # Regular tilings
    # ============================================

    def seed_pairing(self, x: LimitTiling, y: LimitTiling) -> Dict[Point, Point]:
        """
        Pair unit-type tiles label by label, in anchor order

        Raises:
            LabelMismatch: If labels or per-label unit counts differ
        """
        def units(limit: LimitTiling) -> Dict[str, List[Point]]:
            out: Dict[str, List[Point]] = defaultdict(list)
            for tile in limit.tiles():
                if tile.kind == limit.theta.unit:
                    out[tile.label].append(tile.anchor)
            return {label: sorted(v) for label, v in sorted(out.items())}

        ux, uy = units(x), units(y)
        if len(ux) != len(uy):
            raise LabelMismatch(f"fragments carry {len(ux)} and {len(uy)} labels")
        seed = {}
        for (lx, ax), (ly, ay) in zip(ux.items(), uy.items()):
            if len(ax) != len(ay):
                raise LabelMismatch(f"labels {lx} and {ly} hold {len(ax)} and {len(ay)} unit tiles")
            seed.update(zip(ax, ay))
        return seed

    def regular_tiling_loe(self, x: LimitTiling, y: LimitTiling, seed: Dict[Point, Point]) -> PointMap:
        """
        Extend a bijection of unit tiles to all tiles through the matchings

        phi(theta_a^X(c)) = theta_a^Y(phi(c)); inside a tile the map is the
        translation carrying its anchor to the image anchor.

        Args:
            x: Source regular tiling with its matchings
            y: Target regular tiling with its matchings
            seed: Bijection of unit-type anchors

        Returns:
            PointMap with one congruent piece per tile

        Raises:
            TypeMismatch: If the seed pairs tiles of different types, or a
                matching of one side has no counterpart
        """
        tiles_x = {t.anchor: t for t in x.tiles()}
        tiles_y = {t.anchor: t for t in y.tiles()}
        unit = x.theta.unit
        for cx, cy in seed.items():
            if cx not in tiles_x or cy not in tiles_y:
                raise UnknownAnchor(f"seed pairs unknown anchors {cx} and {cy}")
            if tiles_x[cx].kind != unit or tiles_y[cy].kind != unit:
                raise TypeMismatch(f"seed pairs a tile of type {tiles_x[cx].kind} with one of type {tiles_y[cy].kind}")
        if len(set(seed.values())) != len(seed):
            raise PreconditionError("seed is not injective")

        pieces = []
        pairs: Dict[Point, Point] = {}
        maps_x, maps_y = x.theta.all_maps(), y.theta.all_maps()
        for kind in sorted(maps_x):
            if kind not in maps_y:
                raise TypeMismatch(f"target has no matching for type {kind}")
            for cx, cy in sorted(seed.items()):
                ax, ay = maps_x[kind].get(cx), maps_y[kind].get(cy)
                if ax is None or ay is None:
                    raise TypeMismatch(f"type {kind} tile missing for seed pair {cx} -> {cy}")
                sx, sy = tiles_x[ax], tiles_y[ay]
                if sx.kind != sy.kind:
                    raise TypeMismatch(f"tiles at {ax} and {ay} have different types")
                pairs[ax] = ay
                pieces.append(MapPiece(sx.rect, sx.label, sy.rect, sy.label))
        logger.info("regular tiling map: %d tiles from %d unit pairs", len(pieces), len(seed))
        return PointMap(tuple(pieces), pairs)

    def theta_violations(self, point_map: PointMap, x: LimitTiling, y: LimitTiling) -> List[str]:
        """Replay phi(theta_a^X(c)) = theta_a^Y(phi(c)) for every matched unit tile"""
        out = []
        maps_y = y.theta.all_maps()
        for kind, theta in x.theta.all_maps().items():
            for c, image in theta.items():
                if c not in point_map.tile_pairs:
                    continue
                left = point_map.tile_pairs.get(image)
                right = maps_y.get(kind, {}).get(point_map.tile_pairs[c])
                if left is None or left != right:
                    out.append(f"theta does not commute at {c} for type {kind}")
        return out


# Create service instance
loe_service = LoeService()
