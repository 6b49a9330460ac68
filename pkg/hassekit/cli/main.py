"""Root command of hassekit."""

from pathlib import Path
from typing import Optional

import click

from ..core.config import configure_bounds, load_bounds
from ..logger import init_logging, level_for, logger
from .algebras import etale, multinorm, quat
from .common import CONTEXT_SETTINGS, Settings, run_command
from .demo import demo
from .embed import embed
from .forms import hilbert, qf


@click.group(context_settings=CONTEXT_SETTINGS, epilog="""
Usage Examples:
  hassekit --json hilbert --a 13 --b 17 --place 17
  hassekit qf invariants --form '{"diag": ["1", "-1", "3"]}'
  hassekit embed split --etale algebra.json --target-diag 1,-1,2,-2
  hassekit quat ram --alpha -1 --beta -1
  hassekit --json demo example-7-5
  hassekit demo theorem-b --v-size 2
""")
@click.option(
    "--json", "-j", "as_json", is_flag=True, help="Machine-readable JSON output"
)
@click.option("--bound", type=click.IntRange(min=1), default=None,
              help="Cap on global witness candidates")
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON config file with a 'bounds' section")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.pass_context
@run_command
def cli(
    ctx: click.Context,
    as_json: bool,
    bound: Optional[int],
    config_path: Optional[Path],
    verbose: bool,
) -> None:
    """Local invariants and certified local-global verdicts for involutions."""
    init_logging(level=level_for(verbose))
    bounds = load_bounds(config_path).with_overrides(witness_cap=bound)
    configure_bounds(bounds)
    logger.debug(f"Active bounds: {bounds}")
    ctx.obj = Settings(as_json, bounds)


cli.add_command(hilbert)
cli.add_command(qf)
cli.add_command(etale)
cli.add_command(quat)
cli.add_command(multinorm)
cli.add_command(embed)
cli.add_command(demo)


if __name__ == "__main__":
    cli()
