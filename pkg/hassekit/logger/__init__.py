"""Logging setup for hassekit.

Each core module logs search progress (pool sizes, checkpoint primes,
certificate verdicts) under its own ``hassekit.core.*`` name; the command
line only decides how much of it reaches the stream.
"""

import logging
import sys
from typing import Optional, TextIO

DEFAULT_FMT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
DATE_FMT = "%Y-%m-%d %H:%M:%S"


def level_for(verbose: bool) -> int:
    """INFO when the user asked for progress, WARNING otherwise."""
    return logging.INFO if verbose else logging.WARNING


def init_logging(
    level: int = logging.INFO,
    fmt: str = DEFAULT_FMT,
    stream: Optional[TextIO] = None,
) -> None:
    """Configure the root logger once per process.

    Args:
        level: Logging level (default: INFO)
        fmt: Log message format string
        stream: Destination of the records (default: stderr, which keeps
            stdout free for JSON)
    """
    logging.basicConfig(
        level=level,
        format=fmt,
        datefmt=DATE_FMT,
        stream=stream if stream is not None else sys.stderr,
        force=True,
    )
    logging.captureWarnings(True)


logger = logging.getLogger("hassekit")
