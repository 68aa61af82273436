"""
Back-and-forth Commands
"""
import click

from cli.common import dim_option, finish, guarded, levels_option, output_options, seed_option
from core.config import settings
from models.loe import LoeReport, NormalizationVerdict, PipelineReport, Side
from models.run import RunConfig
from services.loe_service import OrbitFragmentProvider, loe_service
from services.svg_service import svg_service
from services.towers_service import towers_service

router = click.Group()


@router.command("loe")
@dim_option()
@levels_option()
@seed_option
@click.option("--tiles", type=click.IntRange(min=1), default=settings.FRAGMENT_TILES, show_default=True,
              help="Materialized tiles per fragment")
@click.option("--labels", type=click.IntRange(min=1), default=1, show_default=True, help="Orbit labels per fragment")
@output_options
@guarded("loe")
def loe(d, levels, seed, tiles, labels, out, svg, fmt):
    """
    Run the measure-preserving back-and-forth between two random fragments

    Fragment X is drawn with the seed and Y with the next seed. The run
    passes when every block audit holds and all ratios equal 1.
    """
    config = RunConfig(command="loe", d=d, seed=seed, levels=levels, out=out, svg=svg, format=fmt, options={
        "tiles": tiles, "labels": labels,
    })
    x = OrbitFragmentProvider.generate(Side.X, tiles, d, seed, labels)
    y = OrbitFragmentProvider.generate(Side.Y, tiles, d, seed + 1, labels)
    state = loe_service.run_back_and_forth(x, y, levels=levels)
    audit = loe_service.audit(state, x, y, levels)
    normalization = loe_service.verify_normalization(loe_service.point_map_from_blocks(state, x, y))
    passed = audit.ok and normalization.verdict == NormalizationVerdict.LOE
    report = LoeReport(
        dim=d,
        levels=levels,
        core_tiles=tiles,
        fresh_tiles={Side.X.value: len(x.fresh), Side.Y.value: len(y.fresh)},
        stages=list(state.stages),
        audit=audit,
        normalization=normalization,
        verdict="PASS" if passed else "FAIL",
    )
    if svg and d in (1, 2):
        x_rects = [t.rect for t in x.core + x.fresh]
        y_rects = [t.rect for t in y.core + y.fresh]
        svg_service.write(svg_service.blocks(state, x_rects, y_rects), svg)
    finish(config, report, passed)


@router.command("pipeline")
@dim_option()
@levels_option(default=1, minimum=1)
@seed_option
@output_options
@guarded("pipeline")
def pipeline(d, levels, seed, out, svg, fmt):
    """
    Towers, regular tilings, the matching-driven map and its normalization

    Two regular tilings are built with seeds s and s+1; their unit tiles are
    paired label by label and the map is extended through the matchings.
    """
    config = RunConfig(command="pipeline", d=d, seed=seed, levels=levels, out=out, svg=svg, format=fmt)
    spec = towers_service.build_spec(d, levels)
    run_x = towers_service.regular_tiling(spec, seed=seed, label_prefix=Side.X.value)
    run_y = towers_service.regular_tiling(spec, seed=seed + 1, label_prefix=Side.Y.value)
    audit_x, audit_y = towers_service.audit(run_x), towers_service.audit(run_y)

    pairs = loe_service.seed_pairing(run_x.limit, run_y.limit)
    point_map = loe_service.regular_tiling_loe(run_x.limit, run_y.limit, pairs)
    violations = loe_service.theta_violations(point_map, run_x.limit, run_y.limit)
    normalization = loe_service.verify_normalization(point_map)

    passed = (
        audit_x.ok and audit_y.ok and not violations
        and normalization.verdict == NormalizationVerdict.LOE
        and len(point_map.tile_pairs) == len(run_x.limit.tiles())
    )
    report = PipelineReport(
        dim=d,
        levels=levels,
        source_tiles=len(run_x.limit.tiles()),
        target_tiles=len(run_y.limit.tiles()),
        source_audit=audit_x,
        target_audit=audit_y,
        seed_pairs=len(pairs),
        mapped_tiles=len(point_map.tile_pairs),
        theta_violations=violations,
        normalization=normalization,
        verdict="PASS" if passed else "FAIL",
    )
    if svg and d in (1, 2):
        svg_service.write(svg_service.towers(run_x), svg)
    finish(config, report, passed)
