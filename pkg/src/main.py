import logging
import sys

import click

from src.commands.compare import compare_command
from src.commands.critical_points import critical_points_command
from src.commands.solve import solve_command
from src.commands.sweep import sweep_command
from src.config import get_settings
from src.services.errors import NetsecError


class NetsecCLI(click.Group):
    """Click group that maps library errors to their exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except NetsecError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(exc.exit_code)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


@click.group(cls=NetsecCLI)
def cli():
    """Equilibria of interdependent security games under probability weighting."""
    configure_logging(get_settings().log)


cli.add_command(critical_points_command)
cli.add_command(solve_command)
cli.add_command(compare_command)
cli.add_command(sweep_command)


if __name__ == "__main__":
    cli()
