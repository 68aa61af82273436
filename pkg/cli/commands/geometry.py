"""
Cross-section and Voronoi Commands
"""
from typing import List, Optional

import click
from pydantic import BaseModel

from cli.common import POINT, QUAD, dim_option, finish, guarded, output_options, point_text
from core.exactnum import QuadNum, ZERO
from models.crosssection import CrossSectionReport, LacunaryConfig
from models.geometry import CellMeasure, CrossSection, Rect, RectModel, Window
from models.run import RunConfig
from services.crosssection_service import crosssection_service
from services.geometry_service import geometry_service
from services.svg_service import svg_service

router = click.Group()


def _window(d: int, side: QuadNum, box: bool) -> Window:
    if box:
        return Window.box_of(Rect.cube(0, side, d))
    return Window.torus([side] * d)


@router.command("cross-section")
@dim_option()
@click.option("--side", type=QUAD, default="10", show_default=True, help="Period L of the torus, or side of the box")
@click.option("--box", is_flag=True, help="Use the box [0, L)^d instead of the torus")
@click.option("--body", type=QUAD, default="1", show_default=True, help="Half side of the lacunarity body U")
@click.option("--mesh", type=QUAD, default="1", show_default=True, help="Grid mesh of the first round")
@click.option("--rounds", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="Shuffle seed; lexicographic grid order when absent")
@click.option("--point", "points", type=POINT, multiple=True, help="Starting point; repeatable")
@click.option("--candidate", "candidates", type=POINT, multiple=True, help="Explicit candidate; repeatable")
@output_options
@guarded("cross-section")
def cross_section(d, side, box, body, mesh, rounds, seed, points, candidates, out, svg, fmt):
    """
    Greedily extend a lacunary cross-section and certify cocompactness

    Candidates come from --candidate in the given order, or from a grid
    whose mesh halves every round.
    """
    config = RunConfig(command="cross-section", d=d, seed=seed, levels=rounds, out=out, svg=svg, format=fmt, options={
        "side": str(side), "box": box, "body": str(body), "mesh": str(mesh),
        "points": [point_text(p) for p in points], "candidates": [point_text(p) for p in candidates],
    })
    window = _window(d, side, box)
    cfg = LacunaryConfig(
        body=Rect.symmetric(body, d),
        mesh=mesh,
        seed=seed,
        candidates=list(candidates) if candidates else None,
    )
    start = CrossSection.lexicographic(list(points), window)
    section = crosssection_service.extend_to_maximal(start, cfg, rounds)
    certificate = crosssection_service.certificate(section, cfg)
    lacunary = geometry_service.is_lacunary(section, cfg.body)
    report = CrossSectionReport(
        points=[list(p) for p in section.points],
        lacunarity_body=RectModel.of(cfg.body),
        lacunary=lacunary,
        cocompactness_radius_certificate=certificate,
        rounds=rounds,
    )
    if svg and d in (1, 2) and section.points:
        svg_service.write(svg_service.voronoi(geometry_service.voronoi_partition(section)), svg)
    finish(config, report, lacunary)


class VoronoiReport(BaseModel):
    """JSON output of the voronoi command"""
    window: RectModel
    torus: bool
    cells: List[CellMeasure]
    total: QuadNum
    window_volume: QuadNum
    partition_ok: Optional[bool] = None


@router.command("voronoi")
@dim_option()
@click.option("--side", type=QUAD, default="4", show_default=True, help="Period L of the torus, or side of the box")
@click.option("--box", is_flag=True, help="Use the box [0, L)^d instead of the torus")
@click.option("--point", "points", type=POINT, multiple=True, help="Section point; repeatable")
@click.option("--mode", type=click.Choice(["exact2d", "montecarlo"]), default="exact2d", show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Monte-Carlo sample count")
@click.option("--seed", type=int, default=0, show_default=True, help="Monte-Carlo seed")
@output_options
@guarded("voronoi")
def voronoi(d, side, box, points, mode, samples, seed, out, svg, fmt):
    """
    Measure every Voronoi cell of a cross-section

    Without --point the section is the grid of even integer points.
    """
    window = _window(d, side, box)
    if not points:
        grid = CrossSection.lexicographic([], window)
        cfg = LacunaryConfig(body=Rect.symmetric(1, d), mesh=QuadNum.from_int(2))
        points = crosssection_service.extend_to_maximal(grid, cfg).points
    config = RunConfig(command="voronoi", d=d, seed=seed, out=out, svg=svg, format=fmt, options={
        "side": str(side), "box": box, "mode": mode, "samples": samples,
        "points": [point_text(p) for p in points],
    })
    section = CrossSection.lexicographic(list(points), window)
    cells = [geometry_service.voronoi_cell_measure(section, c, mode, samples, seed) for c in section.points]
    total = sum((cell.value for cell in cells), ZERO)
    exact = mode == "exact2d"
    report = VoronoiReport(
        window=RectModel.of(window.region),
        torus=window.is_torus,
        cells=cells,
        total=total,
        window_volume=window.volume(),
        partition_ok=total == window.volume() if exact else None,
    )
    if svg and d in (1, 2):
        svg_service.write(svg_service.voronoi(geometry_service.voronoi_partition(section)), svg)
    finish(config, report, total == window.volume() if exact else True)
