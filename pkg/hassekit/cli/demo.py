"""Worked examples, rebuilt and re-verified on every run."""

import click

from ..core.demos import example_4_6, example_7_5, theorem_b
from .common import CONTEXT_SETTINGS, Settings, emit, pass_settings, run_command


@click.group(context_settings=CONTEXT_SETTINGS)
def demo() -> None:
    """Reproduce the worked examples with fresh certificates."""


@demo.command("example-7-5")
@click.option("--p1", default=13, show_default=True, help="Prime = 1 mod 4")
@click.option(
    "--p2", default=17, show_default=True, help="Prime = 1 mod 4, square at p1"
)
@pass_settings
@run_command
def demo_example_7_5(settings: Settings, p1: int, p2: int) -> None:
    """Locally embeddable everywhere, globally obstructed."""
    emit(settings, example_7_5(p1, p2, settings.bounds))


@demo.command("example-4-6")
@pass_settings
@run_command
def demo_example_4_6(settings: Settings) -> None:
    """Multinorm failure for Q(sqrt 13, sqrt 17) and the algebra ramified at 3, 23."""
    emit(settings, example_4_6(bounds=settings.bounds))


@demo.command("theorem-b")
@click.option("--v-size", default=2, show_default=True, type=click.IntRange(min=2),
              help="Even number of ramified places where the centre splits")
@pass_settings
@run_command
def demo_theorem_b(settings: Settings, v_size: int) -> None:
    """Table of delta classes, each realised by a twisted global a."""
    emit(settings, theorem_b(v_size, settings.bounds))
