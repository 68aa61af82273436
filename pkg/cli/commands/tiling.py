"""
Tiling Commands
"""
from typing import Dict, List, Optional

import click
from pydantic import BaseModel

from cli.common import QUAD, dim_option, eps_option, finish, guarded, output_options
from core.exactnum import KAPPA, QuadNum
from models.geometry import Rect, RectModel, Window
from models.run import RunConfig
from models.tiling import InscribedGridReport, PartitionAudit, TileModel
from services.svg_service import svg_service
from services.tiling_service import tiling_service

router = click.Group()


class TilingReport(BaseModel):
    """JSON output of the tile and canonical commands"""
    window: RectModel
    tiles: int
    min_side: QuadNum
    max_side: QuadNum
    splittable_length: Optional[QuadNum] = None
    type_counts: Optional[Dict[str, int]] = None
    sides_regular: bool
    audit: PartitionAudit
    inscribed: Optional[InscribedGridReport] = None
    tile_list: Optional[List[TileModel]] = None


@router.command("tile")
@dim_option()
@click.option("--side", type=QUAD, default="10", show_default=True, help="Side r of the box window [0, r)^d")
@click.option("--target", type=QUAD, default="1", show_default=True, help="Target side length L'")
@eps_option()
@click.option("--body", type=QUAD, help="Half side of a body inscribed into every tile")
@click.option("--list-tiles", is_flag=True, help="Include every tile in the output")
@output_options
@guarded("tile")
def tile(d, side, target, eps, body, list_tiles, out, svg, fmt):
    """Tile a box window with rectangles whose sides are eps-close to L'"""
    config = RunConfig(command="tile", d=d, eps=str(eps), out=out, svg=svg, format=fmt, options={
        "side": str(side), "target": str(target), "body": str(body) if body is not None else None,
    })
    window = Window.box_of(Rect.cube(0, side, d))
    tiling = tiling_service.tile_window_bounded_sides(window, target, eps)
    inscribed = None
    if body is not None:
        rect = Rect.symmetric(body, d)
        tiling_service.inscribe_grid(tiling, rect, eps)
        inscribed = tiling_service.covered_fractions(tiling, rect)

    audit = tiling_service.partition_audit(tiling)
    report = TilingReport(
        window=RectModel.of(window.region),
        tiles=len(tiling),
        min_side=tiling.min_side(),
        max_side=tiling.max_side(),
        splittable_length=tiling_service.splittable_length(target, eps),
        sides_regular=tiling_service.sides_regular(tiling),
        audit=audit,
        inscribed=inscribed,
        tile_list=[TileModel.of(t) for t in tiling.tiles] if list_tiles else None,
    )
    if svg and d == 2:
        svg_service.write(svg_service.tiles(tiling.tiles), svg)
    finish(config, report, audit.ok)


@router.command("canonical")
@dim_option()
@click.option("--k", "k", type=click.IntRange(min=1), default=2, show_default=True,
              help="Side of the square in units of 1+alpha")
@click.option("--list-tiles", is_flag=True, help="Include every tile in the output")
@output_options
@guarded("canonical")
def canonical(d, k, list_tiles, out, svg, fmt):
    """Canonical regular tiling of [0, K(1+alpha))^d"""
    config = RunConfig(command="canonical", d=d, out=out, svg=svg, format=fmt, options={"k": k})
    rect = Rect.cube(0, KAPPA * k, d)
    tiling = tiling_service.canonical_tiling(rect)
    audit = tiling_service.partition_audit(tiling)
    counts = tiling.type_counts()
    report = TilingReport(
        window=RectModel.of(rect),
        tiles=len(tiling),
        min_side=tiling.min_side(),
        max_side=tiling.max_side(),
        type_counts=counts,
        sides_regular=tiling_service.sides_regular(tiling),
        audit=audit,
        tile_list=[TileModel.of(t) for t in tiling.tiles] if list_tiles else None,
    )
    if svg and d == 2:
        svg_service.write(svg_service.tiles(tiling.tiles), svg)
    equal = len(set(counts.values())) == 1 and len(counts) == 2 ** d
    finish(config, report, audit.ok and report.sides_regular and equal)
