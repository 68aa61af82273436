import logging
import xml.etree.ElementTree as ET
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.config import settings
from models.geometry import Rect
from models.loe import BlockMap
from models.tiling import Tile, type_name
from models.towers import TowerRun

logger = logging.getLogger(__name__)

TYPE_COLORS = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948", "#ff9da7"]
LEVEL_STROKES = ["#222222", "#aa0000", "#0000aa", "#007700", "#aa00aa"]


def _plane(rect: Rect) -> Tuple[float, float, float, float]:
    """x, y, width, height; d=1 rectangles are drawn as unit-height strips"""
    x0 = rect.lo[0].to_float()
    w = rect.sides()[0].to_float()
    if rect.dim == 1:
        return x0, 0.0, w, 1.0
    return x0, rect.lo[1].to_float(), w, rect.sides()[1].to_float()


class SvgService:
    """Render tilings, Voronoi cells, towers and block maps; floats appear only here"""

    def __init__(self, scale: Optional[float] = None):
        self.scale = scale or settings.SVG_SCALE

    def _document(self, boxes: List[Tuple[float, float, float, float]]) -> ET.Element:
        xs = [b[0] for b in boxes] + [b[0] + b[2] for b in boxes]
        ys = [b[1] for b in boxes] + [b[1] + b[3] for b in boxes]
        lo_x, lo_y = min(xs, default=0.0), min(ys, default=0.0)
        width = (max(xs, default=1.0) - lo_x) * self.scale
        height = (max(ys, default=1.0) - lo_y) * self.scale
        svg = ET.Element("svg", {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": f"{width:.2f}",
            "height": f"{height:.2f}",
            "viewBox": f"{lo_x * self.scale:.2f} {-(lo_y * self.scale + height):.2f} {width:.2f} {height:.2f}",
        })
        return svg

    def _rect(self, parent: ET.Element, box, attrs: Dict[str, str], title: Optional[str] = None):
        x, y, w, h = box
        node = ET.SubElement(parent, "rect", {
            "x": f"{x * self.scale:.3f}",
            "y": f"{-(y + h) * self.scale:.3f}",
            "width": f"{w * self.scale:.3f}",
            "height": f"{h * self.scale:.3f}",
            **attrs,
        })
        if title:
            ET.SubElement(node, "title").text = title
        return node

    def write(self, svg: ET.Element, path: str) -> str:
        ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
        logger.info("SVG written to %s", path)
        return path

    def tiles(self, tiles: Iterable[Tile], outlines: Sequence[Rect] = ()) -> ET.Element:
        """Tiles colored by type, with optional outlines drawn on top"""
        tiles = list(tiles)
        boxes = [_plane(t.rect) for t in tiles] + [_plane(r) for r in outlines]
        svg = self._document(boxes)
        kinds = sorted({type_name(t.kind) for t in tiles if t.kind is not None})
        colors = {k: TYPE_COLORS[i % len(TYPE_COLORS)] for i, k in enumerate(kinds)}
        for tile in tiles:
            name = type_name(tile.kind) if tile.kind is not None else ""
            self._rect(svg, _plane(tile.rect), {
                "fill": colors.get(name, "#cccccc"), "stroke": "#ffffff", "stroke-width": "0.3",
            }, f"{name} {tile.label}")
        for i, rect in enumerate(outlines):
            self._rect(svg, _plane(rect), {
                "fill": "none", "stroke": LEVEL_STROKES[i % len(LEVEL_STROKES)], "stroke-width": "1",
            })
        return svg

    def towers(self, run: TowerRun) -> ET.Element:
        """Limit tiling with the square of every level outlined"""
        family = run.family
        squares = sorted(family.squares.values(), key=lambda s: (-s.level, s.anchor))
        svg = self.tiles(run.limit.tiles())
        for sq in squares:
            self._rect(svg, _plane(sq.rect), {
                "fill": "none",
                "stroke": LEVEL_STROKES[sq.level % len(LEVEL_STROKES)],
                "stroke-width": "1",
            }, sq.id)
        return svg

    def voronoi(self, cells: Dict[tuple, list]) -> ET.Element:
        """Voronoi pieces: intervals (d=1) or convex polygons (d=2), one color per owner"""
        boxes = []
        for pieces in cells.values():
            for piece in pieces:
                if isinstance(piece, Rect):
                    boxes.append(_plane(piece))
                else:
                    xs = [v[0].to_float() for v in piece]
                    ys = [v[1].to_float() for v in piece]
                    boxes.append((min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys)))
        svg = self._document(boxes)
        for i, (owner, pieces) in enumerate(sorted(cells.items())):
            color = TYPE_COLORS[i % len(TYPE_COLORS)]
            for piece in pieces:
                if isinstance(piece, Rect):
                    self._rect(svg, _plane(piece), {"fill": color, "stroke": "none"})
                else:
                    points = " ".join(f"{v[0].to_float() * self.scale:.3f},{-v[1].to_float() * self.scale:.3f}" for v in piece)
                    ET.SubElement(svg, "polygon", {"points": points, "fill": color, "stroke": "none"})
            if len(owner) == 2:
                ET.SubElement(svg, "circle", {
                    "cx": f"{owner[0].to_float() * self.scale:.3f}",
                    "cy": f"{-owner[1].to_float() * self.scale:.3f}",
                    "r": "1.5", "fill": "#000000",
                })
        return svg

    def blocks(self, state: BlockMap, x_tiles: Sequence[Rect], y_tiles: Sequence[Rect]) -> ET.Element:
        """X tiles on top, Y tiles below; mapped blocks shaded by stage on both sides"""
        below = 2.0 if all(r.dim == 1 for r in x_tiles) else 8.0

        def lower(box):
            return box[0], box[1] - below, box[2], box[3]

        sources = [_plane(p.source.rect()) for p in state.pairs]
        targets = [lower(_plane(p.target_rect())) for p in state.pairs]
        outlines = [_plane(r) for r in x_tiles] + [lower(_plane(r)) for r in y_tiles]
        svg = self._document(outlines + sources + targets)
        stages = sorted({p.stage for p in state.pairs})
        colors = {s: TYPE_COLORS[i % len(TYPE_COLORS)] for i, s in enumerate(stages)}
        for pair, src, tgt in zip(state.pairs, sources, targets):
            for box in (src, tgt):
                self._rect(svg, box, {"fill": colors[pair.stage], "fill-opacity": "0.6", "stroke": "none"})
        for box in outlines:
            self._rect(svg, box, {"fill": "none", "stroke": "#222222", "stroke-width": "0.5"})
        return svg


# Create service instance
svg_service = SvgService()
