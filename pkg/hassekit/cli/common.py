"""Shared plumbing for the command groups: settings, output and exit codes."""

import functools
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable, Iterator, List, TypeVar, cast

import click

from ..core.config import Bounds
from ..core.errors import BoundExceededError, CertificationError, DomainError
from ..core.serialize import dumps
from ..logger import logger

CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DOMAIN = 2
EXIT_BOUND = 3

F = TypeVar("F", bound=Callable[..., Any])


@dataclass(frozen=True)
class Settings:
    """Options of the root command, shared by every subcommand."""

    as_json: bool
    bounds: Bounds


pass_settings = click.make_pass_decorator(Settings)


def _human_lines(payload: Any, indent: int = 0) -> Iterator[str]:
    pad = "  " * indent
    if isinstance(payload, dict):
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (dict, list)) and value and not _is_flat(value):
                yield f"{pad}{key}:"
                yield from _human_lines(value, indent + 1)
            else:
                yield f"{pad}{key}: {_flat(value)}"
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, (dict, list)) and not _is_flat(item):
                yield f"{pad}-"
                yield from _human_lines(item, indent + 1)
            else:
                yield f"{pad}- {_flat(item)}"
    else:
        yield f"{pad}{payload}"


def _is_flat(value: Any) -> bool:
    if isinstance(value, list):
        return all(not isinstance(v, (dict, list)) for v in value)
    return False


def _flat(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(str(v) for v in value) + "]"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def emit(settings: Settings, payload: Any) -> None:
    """Print a result as JSON (``--json``) or as an indented listing."""
    if settings.as_json:
        click.echo(dumps(payload))
        return
    for line in _human_lines(payload):
        click.echo(line)


def split_csv(text: str) -> List[str]:
    """``"13, 17"`` -> ``["13", "17"]``; empty text gives an empty list."""
    return [part.strip() for part in text.split(",") if part.strip()]


def run_command(func: F) -> F:
    """Map library exceptions to exit codes 1, 2 and 3."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except json.JSONDecodeError as e:
            logger.error(f"malformed JSON: {e}")
            click.echo(
                f"Error: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                err=True,
            )
            sys.exit(EXIT_FAILURE)
        except DomainError as e:
            logger.error(str(e))
            click.echo(dumps(e.to_dict()))
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_DOMAIN)
        except BoundExceededError as e:
            logger.error(str(e))
            click.echo(dumps(e.to_dict()))
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_BOUND)
        except click.ClickException:
            raise
        except CertificationError as e:
            logger.exception("Certification failed")
            click.echo(dumps(e.to_dict()))
            sys.exit(EXIT_FAILURE)
        except Exception as e:
            logger.exception("Unexpected error occurred")
            click.echo(f"Unexpected error: {e}", err=True)
            sys.exit(EXIT_FAILURE)

    return cast(F, wrapper)
