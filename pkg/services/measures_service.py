import itertools
import logging
from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.config import settings
from core.exactnum import ONE, QuadNum, ZERO, dyadic
from core.exceptions import NotLacunary, PreconditionError, UnknownAnchor, UnsupportedDim
from models.geometry import CrossSection, Point, Rect, RectModel, Window
from models.measures import (
    BoundedTiling, Piece, PhaseMeasure, ProductRow, RoundTripReport, SampledCell, SectionMeasure, WeightModel
)
from models.tiling import RectTiling, Tile, TileType
from services.geometry_service import clip_to_rect, geometry_service, polygon_area

logger = logging.getLogger(__name__)


def _shift_polygon(poly, t) -> Tuple:
    return tuple((x + t[0], y + t[1]) for x, y in poly)


def _bbox(piece: Piece) -> Rect:
    if isinstance(piece, Rect):
        return piece
    xs = [v[0] for v in piece]
    ys = [v[1] for v in piece]
    return Rect((min(xs), min(ys)), (max(xs), max(ys)))


class MeasuresService:
    """Service for transferring measures between a window and its cross-sections"""

    def __init__(self):
        self.geometry = geometry_service

    # ============================================
    # Bounded tilings
    # ============================================

    def _body_of(self, window: Window, domains: Dict[Point, Tuple[Piece, ...]]) -> Rect:
        """Smallest symmetric box V with every piece of W_c inside c + V"""
        half = [ZERO] * window.dim
        for c, pieces in domains.items():
            for piece in pieces:
                if isinstance(piece, SampledCell):
                    continue
                box = _bbox(piece)
                for i, (d, s) in enumerate(zip(window.displacement(c, box.center()), box.sides())):
                    half[i] = max(half[i], abs(d) + s / 2)
        return Rect(tuple(-h for h in half), tuple(half))

    def voronoi_tiling(self, section: CrossSection) -> BoundedTiling:
        """
        Voronoi bounded tiling

        Exact pieces for d in (1, 2); sampled cells for larger d, with the
        body bounded by the window itself.
        """
        window = section.window
        if window.dim in (1, 2):
            cells = self.geometry.voronoi_partition(section)
            domains = {c: tuple(pieces) for c, pieces in cells.items()}
            return BoundedTiling(section, domains, self._body_of(window, domains))
        domains = {c: (SampledCell(section, c),) for c in section.points}
        sides = window.region.sides()
        return BoundedTiling(section, domains, Rect(tuple(-s for s in sides), sides))

    def translate_tiling_of(self, section: CrossSection, body: Rect) -> BoundedTiling:
        """
        Bounded tiling by translates W_c = c + R of one rectangle

        Raises:
            PreconditionError: If the translates do not partition the window
        """
        window = section.window
        domains = {c: tuple(window.wrap_rect(body.translate(c))) for c in section.points}
        total = sum((p.volume() for pieces in domains.values() for p in pieces), ZERO)
        if total != window.volume() or not self.geometry.is_lacunary(section, body):
            raise PreconditionError(f"translates of {body} do not partition the window")
        return BoundedTiling(section, domains, body)

    def tiling_domains(self, tiling: RectTiling, section: CrossSection) -> BoundedTiling:
        """
        Bounded tiling whose domains are the tiles of a tiling, each owned by
        the unique section point inside it

        Raises:
            UnknownAnchor: If a tile holds no section point or several
        """
        domains: Dict[Point, Tuple[Piece, ...]] = {}
        for tile in tiling.tiles:
            inside = [c for c in section.points if tile.rect.contains(c)]
            if len(inside) != 1:
                raise UnknownAnchor(f"tile {tile.rect} holds {len(inside)} section points")
            domains[inside[0]] = domains.get(inside[0], ()) + (tile.rect,)
        missing = [c for c in section.points if c not in domains]
        if missing:
            raise UnknownAnchor(f"section points {missing} own no tile")
        return BoundedTiling(section, domains, self._body_of(section.window, domains))

    # ============================================
    # Evaluation
    # ============================================

    def _sampled(self, cell: SampledCell, query: Rect) -> QuadNum:
        n = settings.MONTE_CARLO_SAMPLES
        rng = np.random.default_rng(settings.DEFAULT_SEED)
        lo = np.array([x.to_float() for x in query.lo])
        span = np.array([s.to_float() for s in query.sides()])
        window = cell.section.window
        hits = 0
        for row in rng.random((n, query.dim)):
            x = tuple(QuadNum.from_fraction(Fraction(float(v))) for v in lo + row * span)
            if self.geometry.voronoi_owner(cell.section, window.reduce(x)) == cell.owner:
                hits += 1
        return query.volume() * Fraction(hits, n)

    def piece_measure(self, piece: Piece, query: Rect) -> QuadNum:
        """Lebesgue measure of piece and query, both inside the window's region"""
        if isinstance(piece, Rect):
            inter = piece.intersect(query)
            return inter.volume() if inter is not None else ZERO
        if isinstance(piece, SampledCell):
            return self._sampled(piece, query)
        if query.dim != 2:
            raise UnsupportedDim("polygon pieces live in d=2")
        clipped = clip_to_rect(piece, query)
        return polygon_area(clipped) if clipped else ZERO

    def domain_measure(self, window: Window, pieces: Iterable[Piece], query: Rect) -> QuadNum:
        total = ZERO
        parts = window.wrap_rect(query)
        for piece in pieces:
            for part in parts:
                total = total + self.piece_measure(piece, part)
        return total

    def xi(self, query: Rect, c: Point, tiling: BoundedTiling) -> QuadNum:
        """
        Lebesgue measure of W_c and A

        Args:
            query: A, wrapped into the fundamental domain on a torus
            c: Section point
            tiling: Bounded tiling

        Raises:
            UnknownAnchor: If c is not a point of the tiling's section
        """
        c = tuple(c)
        if c not in tiling.domains:
            raise UnknownAnchor(f"{c} is not a point of the cross-section")
        return self.domain_measure(tiling.window, tiling.domains[c], query)

    def measure(self, mu: PhaseMeasure, query: Rect) -> QuadNum:
        """mu(A)"""
        if mu.shift is not None:
            query = query.translate(tuple(-t for t in mu.shift))
        total = ZERO
        parts = mu.window.wrap_rect(query)
        for piece, density in mu.pieces:
            for part in parts:
                total = total + density * self.piece_measure(piece, part)
        return total

    def total_mass(self, mu: PhaseMeasure) -> QuadNum:
        return self.measure(mu, mu.window.region)

    def lebesgue(self, window: Window, density=ONE) -> PhaseMeasure:
        """density times Lebesgue measure (unit cube mass 1)"""
        return PhaseMeasure(window, ((window.region, QuadNum.coerce(density)),))

    # ============================================
    # Lift and pull
    # ============================================

    def lift(self, nu: SectionMeasure, tiling: BoundedTiling) -> PhaseMeasure:
        """
        mu_nu(A) = sum over c of nu(c) xi(A, c)

        Raises:
            PreconditionError: If nu charges a point outside the tiling's section
        """
        pieces = []
        for c in nu.support():
            if c not in tiling.domains:
                raise PreconditionError(f"{c} is charged by the measure but has no domain")
            pieces.extend((piece, nu[c]) for piece in tiling.domains[c])
        return PhaseMeasure(tiling.window, tuple(pieces))

    def pull(self, mu: PhaseMeasure, section: CrossSection, body: Rect) -> SectionMeasure:
        """
        nu_mu({c}) = mu(c + U) / lambda(U)

        Raises:
            NotLacunary: If the translates c + U overlap
        """
        if not self.geometry.is_lacunary(section, body):
            raise NotLacunary(f"translates of {body} overlap")
        vol = body.volume()
        return SectionMeasure({c: self.measure(mu, body.translate(c)) / vol for c in section.points})

    def _product_queries(self, body: Rect) -> List[Rect]:
        """U and its 2^d dyadic halves"""
        queries = [body]
        mids = body.center()
        for choice in itertools.product((0, 1), repeat=body.dim):
            lo = tuple(body.lo[i] if s == 0 else mids[i] for i, s in enumerate(choice))
            hi = tuple(mids[i] if s == 0 else body.hi[i] for i, s in enumerate(choice))
            queries.append(Rect(lo, hi))
        return queries

    def product_rows(self, nu: SectionMeasure, tiling: BoundedTiling, body: Rect) -> List[ProductRow]:
        """
        Both sides of mu_nu(c + A) = lambda(A) nu(c) for A in U and its halves

        Raises:
            PreconditionError: If some c + U is not inside W_c
        """
        vol = body.volume()
        rows = []
        for c in tiling.section.points:
            if self.xi(body.translate(c), c, tiling) != vol:
                raise PreconditionError(f"domain of {c} does not contain its translate of U")
        mu = self.lift(nu, tiling)
        for c in tiling.section.points:
            for query in self._product_queries(body):
                rows.append(ProductRow(
                    point=list(c),
                    query=RectModel.of(query),
                    lifted=self.measure(mu, query.translate(c)),
                    product=query.volume() * nu[c],
                ))
        return rows

    def product_identity_check(self, nu: SectionMeasure, tiling: BoundedTiling, body: Rect) -> bool:
        """Whether the lifted measure on U + C is lambda restricted to U times nu"""
        return all(row.lifted == row.product for row in self.product_rows(nu, tiling, body))

    def mass_ratio(self, mu: PhaseMeasure, section: CrossSection, body: Rect) -> Optional[QuadNum]:
        """mu(X) over nu_mu(C); None when the pulled measure vanishes"""
        pulled = self.pull(mu, section, body).total()
        if pulled.sign() == 0:
            return None
        return self.total_mass(mu) / pulled

    def round_trip(self, nu: SectionMeasure, tiling: BoundedTiling, body: Rect) -> RoundTripReport:
        """Lift, check the product identity, pull back and compare"""
        mu = self.lift(nu, tiling)
        rows = self.product_rows(nu, tiling, body)
        pulled = self.pull(mu, tiling.section, body)
        product_ok = all(row.lifted == row.product for row in rows)
        round_ok = all(pulled[c] == nu[c] for c in tiling.section.points)
        logger.info("measure round trip over %d points: product=%s round_trip=%s",
                    len(tiling.section), product_ok, round_ok)
        return RoundTripReport(
            weights=[WeightModel(point=list(c), weight=nu[c]) for c in tiling.section.points],
            pulled=[WeightModel(point=list(c), weight=pulled[c]) for c in tiling.section.points],
            product_rows=rows,
            product_identity=product_ok,
            round_trip=round_ok,
            window_mass=self.total_mass(mu),
            section_mass=pulled.total(),
            mass_ratio=self.mass_ratio(mu, tiling.section, body),
            verdict="PASS" if product_ok and round_ok else "FAIL",
        )

    # ============================================
    # Translations
    # ============================================

    def translate_measure(self, nu: SectionMeasure, window: Window, t: Sequence[QuadNum]) -> SectionMeasure:
        return SectionMeasure({
            window.reduce(tuple(x + s for x, s in zip(c, t))): w for c, w in nu.weights.items()
        })

    def translate_phase(self, mu: PhaseMeasure, t: Sequence[QuadNum]) -> PhaseMeasure:
        shift = tuple(t) if mu.shift is None else tuple(a + b for a, b in zip(mu.shift, t))
        return PhaseMeasure(mu.window, mu.pieces, shift)

    def _wrap_polygon(self, window: Window, poly) -> List[Tuple]:
        """Pieces of a translated polygon moved back into the fundamental domain"""
        if not window.is_torus:
            clipped = clip_to_rect(poly, window.box)
            return [tuple(clipped)] if clipped else []
        region = window.region
        out = []
        for kx, ky in itertools.product((-1, 0, 1), repeat=2):
            off = (window.periods[0] * kx, window.periods[1] * ky)
            clipped = clip_to_rect(poly, region.translate((-off[0], -off[1])))
            if clipped:
                out.append(_shift_polygon(clipped, off))
        return out

    def translate_tiling(self, tiling: BoundedTiling, t: Sequence[QuadNum]) -> BoundedTiling:
        """Push every domain and its owner through x -> x + t"""
        window = tiling.window
        t = tuple(t)
        section = tiling.section.translate(t)
        domains: Dict[Point, Tuple[Piece, ...]] = {}
        for c, pieces in tiling.domains.items():
            moved: List[Piece] = []
            for piece in pieces:
                if isinstance(piece, Rect):
                    moved.extend(window.wrap_rect(piece.translate(t)))
                elif isinstance(piece, SampledCell):
                    moved.append(SampledCell(section, window.reduce(tuple(x + s for x, s in zip(piece.owner, t)))))
                else:
                    moved.extend(self._wrap_polygon(window, _shift_polygon(piece, t)))
            domains[window.reduce(tuple(x + s for x, s in zip(c, t)))] = tuple(moved)
        return BoundedTiling(section, domains, tiling.body)

    # ============================================
    # Fragment bookkeeping
    # ============================================

    def fragment_label_count(self, tiles: Iterable[Tile]) -> Dict[str, int]:
        """Tiles per fragment label"""
        return dict(sorted(Counter(tile.label for tile in tiles).items()))

    def restrict_to_unit(self, nu: SectionMeasure, unit_points: Iterable[Point], dim: int) -> SectionMeasure:
        """2^d nu restricted to the anchors of the unit-type tiles"""
        scale = QuadNum.from_int(2 ** dim)
        return SectionMeasure({tuple(p): nu[p] * scale for p in unit_points if nu[p].sign() > 0})

    def spread_from_unit(
        self,
        nu: SectionMeasure,
        thetas: Dict[TileType, Dict[Point, Point]],
        dim: int
    ) -> SectionMeasure:
        """
        2^-d times the sum over types a of the push-forward of nu by theta_a

        Args:
            nu: Measure on the unit-type anchors
            thetas: Per type a bijection from unit-type anchors to type-a anchors
            dim: d

        Raises:
            PreconditionError: If nu charges a point some theta_a misses
        """
        scale = dyadic(dim)
        out: Dict[Point, QuadNum] = {}
        for kind, theta in thetas.items():
            for c in nu.support():
                if c not in theta:
                    raise PreconditionError(f"theta for type {kind} misses {c}")
                target = theta[c]
                out[target] = out.get(target, ZERO) + nu[c] * scale
        return SectionMeasure(out)


# Create service instance
measures_service = MeasuresService()
