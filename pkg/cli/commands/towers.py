"""
Towers Commands
"""
import click

from cli.common import QUAD, dim_option, finish, guarded, levels_option, output_options, seed_option
from core.exceptions import PreconditionError
from models.geometry import Rect, Window
from models.run import RunConfig
from services.svg_service import svg_service
from services.towers_service import towers_service

router = click.Group()


@router.command("towers")
@dim_option()
@levels_option(minimum=1)
@seed_option
@click.option("--side", type=QUAD, default=None, help="Side of the box window; 4 l_K when absent")
@click.option("--tiles", "include_tiles", is_flag=True, help="Include tiles and matchings in the output")
@output_options
@guarded("towers")
def towers(d, levels, seed, side, include_tiles, out, svg, fmt):
    """
    Build a tower hierarchy with eps_k = 2^-k and its regular tiling

    The run passes when every family, tiling, coverage and shift audit holds.
    """
    config = RunConfig(command="towers", d=d, seed=seed, levels=levels, out=out, svg=svg, format=fmt, options={
        "side": str(side) if side is not None else None, "tiles": include_tiles,
    })
    spec = towers_service.build_spec(d, levels)
    violations = towers_service.validate_spec(spec)
    if violations:
        raise PreconditionError("; ".join(violations))
    window = Window.box_of(Rect.cube(0, side, d)) if side is not None else towers_service.default_window(spec)
    run = towers_service.regular_tiling(spec, window, seed)
    audit = towers_service.audit(run)
    report = towers_service.report(run, audit, include_tiles)
    if svg and d in (1, 2):
        svg_service.write(svg_service.towers(run), svg)
    finish(config, report, audit.ok)
