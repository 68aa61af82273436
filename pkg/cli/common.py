"""
Shared option types, flags and output handling for the commands
"""
import functools
import logging
from pathlib import Path
from typing import Callable, Optional

import click
from pydantic import BaseModel

from core.config import settings
from core.exactnum import QuadNum
from core.exceptions import ToolkitError
from models.geometry import Point, as_point
from models.run import CommandResult, ErrorModel, ErrorResult, OutputFormat, RunConfig, Verdict

logger = logging.getLogger(__name__)


# ============================================
# Parameter types
# ============================================

class QuadParam(click.ParamType):
    """Exact number such as 3, 0.1, 1/2 or 1+sqrt2"""
    name = "number"

    def convert(self, value, param, ctx):
        if isinstance(value, QuadNum):
            return value
        try:
            return QuadNum.parse(str(value))
        except ValueError as e:
            self.fail(str(e), param, ctx)


class PointParam(click.ParamType):
    """Comma separated coordinates such as 0,1/2"""
    name = "point"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return as_point(QuadNum.parse(part) for part in str(value).split(","))
        except ValueError as e:
            self.fail(str(e), param, ctx)


QUAD = QuadParam()
POINT = PointParam()


# ============================================
# Common flags
# ============================================

def dim_option(default: Optional[int] = None, choices=(1, 2, 3)):
    return click.option(
        "--d", "d", type=click.Choice([str(c) for c in choices]), default=str(default or settings.DEFAULT_DIM),
        show_default=True, callback=lambda ctx, param, v: int(v), help="Dimension",
    )


def seed_option(f):
    return click.option("--seed", type=int, default=settings.DEFAULT_SEED, show_default=True, help="Random seed")(f)


def levels_option(default: Optional[int] = None, minimum: int = 0):
    return click.option(
        "--levels", type=click.IntRange(min=minimum), default=default if default is not None else settings.DEFAULT_LEVELS,
        show_default=True, help="Level budget K",
    )


def eps_option(default: Optional[str] = None):
    return click.option(
        "--eps", type=QUAD, default=default or settings.DEFAULT_EPS, show_default=True, help="Epsilon",
    )


def output_options(f):
    """--out, --svg and --format"""
    f = click.option(
        "--format", "fmt", type=click.Choice([o.value for o in OutputFormat]), default=OutputFormat.JSON.value,
        show_default=True, help="Output format",
    )(f)
    f = click.option("--svg", type=click.Path(dir_okay=False), help="Write an SVG drawing to this path")(f)
    f = click.option("-o", "--out", type=click.Path(dir_okay=False), help="Write the JSON envelope to this path")(f)
    return f


# ============================================
# Output
# ============================================

def _text(envelope: CommandResult) -> str:
    lines = [f"command: {envelope.command}", f"verdict: {envelope.verdict.value}"]
    result = envelope.result
    data = result.model_dump(mode="json") if isinstance(result, BaseModel) else result
    if isinstance(data, dict):
        for key, value in data.items():
            if isinstance(value, (str, int, float, bool)):
                lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _write(config: RunConfig, text: str) -> None:
    if config.out:
        Path(config.out).write_text(text + "\n", encoding="utf-8")
        logger.info("JSON written to %s", config.out)
    else:
        click.echo(text)


def finish(config: RunConfig, result, passed: bool = True) -> None:
    """
    Write the envelope and leave with the verdict's exit code

    Raises:
        SystemExit: With code 1 when the run did not pass
    """
    envelope = CommandResult(
        schema=settings.SCHEMA_VERSION,
        command=config.command,
        config=config,
        verdict=Verdict.PASS if passed else Verdict.FAIL,
        result=result,
    )
    if config.format == OutputFormat.TEXT:
        _write(config, _text(envelope))
    else:
        _write(config, envelope.model_dump_json(indent=2, by_alias=True))
    if not passed:
        raise SystemExit(1)


def fail(command: str, error: ToolkitError) -> None:
    """Write the error envelope to stdout and exit with the error's code"""
    logger.error("%s failed: %s", command, error.detail)
    envelope = ErrorResult(
        schema=settings.SCHEMA_VERSION,
        command=command,
        error=ErrorModel(name=error.name, detail=error.detail),
    )
    click.echo(envelope.model_dump_json(indent=2, by_alias=True))
    raise SystemExit(error.exit_code)


def guarded(command: str) -> Callable:
    """Turn toolkit errors raised by a command body into error envelopes"""
    def decorator(fn: Callable) -> Callable:
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except click.ClickException:
                raise
            except ToolkitError as e:
                fail(command, e)
            except Exception as e:
                fail(command, ToolkitError(detail=f"Failed to run {command}: {e}"))
        return wrapper
    return decorator


def point_text(p: Point) -> str:
    return ",".join(str(x) for x in p)
