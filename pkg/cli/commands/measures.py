"""
Measures Commands
"""
import itertools
from fractions import Fraction

import click

from cli.common import POINT, QUAD, dim_option, finish, guarded, output_options, point_text
from core.exactnum import QuadNum
from core.exceptions import PreconditionError
from models.geometry import CrossSection, Rect, Window
from models.measures import SectionMeasure
from models.run import RunConfig
from services.measures_service import measures_service

router = click.Group()


@click.group("measures")
def measures():
    """Lift and pull measures between a window and a cross-section"""


@measures.command("round-trip")
@dim_option(default=1, choices=(1, 2))
@click.option("--side", type=QUAD, default="2", show_default=True, help="Period L of the torus")
@click.option("--point", "points", type=POINT, multiple=True, help="Section point; the integer grid when absent")
@click.option("--weight", "weights", type=QUAD, multiple=True, help="Rational weight per point; uniform when absent")
@click.option("--body", type=QUAD, default="1/4", show_default=True, help="Half side of U")
@click.option("--tiling", "tiling_kind", type=click.Choice(["voronoi", "translates"]), default="voronoi",
              show_default=True, help="Bounded tiling used for the lift")
@click.option("--cell", type=QUAD, default="1/2", show_default=True, help="Half side of the translated domain")
@output_options
@guarded("measures round-trip")
def round_trip(d, side, points, weights, body, tiling_kind, cell, out, svg, fmt):
    """
    Lift a section measure to the torus, check the product identity and pull it back
    """
    window = Window.torus([side] * d)
    if not points:
        ticks = [QuadNum.from_int(i) for i in range(int(side.to_float()) + 1) if QuadNum.from_int(i) < side]
        points = tuple(itertools.product(ticks, repeat=d))
    section = CrossSection.lexicographic(list(points), window)
    if weights and len(weights) != len(section):
        raise PreconditionError(f"{len(weights)} weights for {len(section)} points")
    if weights:
        nu = SectionMeasure(dict(zip(section.points, weights)))
    else:
        share = QuadNum.from_fraction(Fraction(1, len(section)))
        nu = SectionMeasure({c: share for c in section.points})

    config = RunConfig(command="measures round-trip", d=d, out=out, svg=svg, format=fmt, options={
        "side": str(side), "body": str(body), "tiling": tiling_kind, "cell": str(cell),
        "points": [point_text(p) for p in section.points],
        "weights": [str(nu[c]) for c in section.points],
    })
    if tiling_kind == "voronoi":
        tiling = measures_service.voronoi_tiling(section)
    else:
        tiling = measures_service.translate_tiling_of(section, Rect.symmetric(cell, d))
    report = measures_service.round_trip(nu, tiling, Rect.symmetric(body, d))
    finish(config, report, report.verdict == "PASS")


router.add_command(measures)
