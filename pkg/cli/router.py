import click

from cli.commands import diophantine, geometry, loe, measures, tiling, towers
from core.config import settings
from core.logger import setup_logging


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(settings.VERSION, prog_name=settings.PROJECT_NAME)
def cli():
    """Exact constructions on orbit fragments: sections, tilings, towers and the back-and-forth"""
    setup_logging()


def include_router(group: click.Group, router: click.Group) -> None:
    """Register every command of a command module on the main group"""
    for name, command in router.commands.items():
        group.add_command(command, name)


# Include all command modules
include_router(cli, diophantine.router)
include_router(cli, geometry.router)
include_router(cli, measures.router)
include_router(cli, tiling.router)
include_router(cli, towers.router)
include_router(cli, loe.router)
