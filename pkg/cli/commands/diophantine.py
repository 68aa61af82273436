"""
Diophantine Commands
"""
import click
from pydantic import BaseModel, Field

from cli.common import QUAD, eps_option, finish, guarded, output_options
from core.exactnum import QuadNum
from models.diophantine import ApproxResult, IntervalExtension, SegmentPartition, ThresholdReport
from models.run import RunConfig
from services.diophantine_service import diophantine_service

router = click.Group()


class ApproxReport(BaseModel):
    x: QuadNum
    eps: str
    m1: int
    m2: int
    err: QuadNum

    @classmethod
    def of(cls, x: QuadNum, eps: QuadNum, result: ApproxResult) -> "ApproxReport":
        return cls(x=x, eps=str(eps), m1=result.m1, m2=result.m2, err=result.err)


class PartitionReport(BaseModel):
    length: QuadNum
    ones: int
    alphas: int
    partition: SegmentPartition
    nodes: list[QuadNum] = Field(..., description="Segment endpoints")


@router.command("approx")
@click.option("--x", "x", type=QUAD, required=True, help="Value to approximate")
@eps_option()
@output_options
@guarded("approx")
def approx(x, eps, out, svg, fmt):
    """
    Approximate x by m1 + m2*alpha within eps

    An exact representation is returned with zero error.
    """
    config = RunConfig(command="approx", eps=str(eps), out=out, svg=svg, format=fmt, options={"x": str(x)})
    result = diophantine_service.approx(x, eps)
    finish(config, ApproxReport.of(x, eps, result))


@router.command("n-of-eps")
@eps_option()
@output_options
@guarded("n-of-eps")
def n_of_eps(eps, out, svg, fmt):
    """Certified threshold N(eps) above which every value is approximable"""
    config = RunConfig(command="n-of-eps", eps=str(eps), out=out, svg=svg, format=fmt)
    report: ThresholdReport = diophantine_service.threshold_report(eps)
    finish(config, report)


@router.command("partition")
@click.option("--length", type=QUAD, required=True, help="m1 + m2*sqrt2 with non-negative integers")
@click.option("--start", type=QUAD, default="0", show_default=True)
@output_options
@guarded("partition")
def partition(length, start, out, svg, fmt):
    """Canonical {1, alpha} partition of a representable length"""
    config = RunConfig(command="partition", out=out, svg=svg, format=fmt,
                       options={"length": str(length), "start": str(start)})
    parts = diophantine_service.partition_exact(length, start)
    ones, alphas = parts.counts()
    finish(config, PartitionReport(length=length, ones=ones, alphas=alphas, partition=parts, nodes=parts.nodes()))


@router.command("extend")
@click.option("--a", "a", type=QUAD, required=True, help="Start of the inner interval")
@click.option("--inner", type=click.IntRange(min=0), required=True, help="Inner length in units of 1+alpha")
@click.option("--outer", type=click.IntRange(min=1), required=True, help="Outer length in units of 1+alpha")
@eps_option()
@output_options
@guarded("extend")
def extend(a, inner, outer, eps, out, svg, fmt):
    """Shift an inner tiled interval by less than eps and extend its tiling outwards"""
    config = RunConfig(command="extend", eps=str(eps), out=out, svg=svg, format=fmt,
                       options={"a": str(a), "inner": inner, "outer": outer})
    extension: IntervalExtension = diophantine_service.extend_interval(a, inner, outer, eps)
    finish(config, extension)
