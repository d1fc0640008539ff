"""Logging configuration using rich for readable terminal output."""

import logging

from rich.console import Console
from rich.logging import RichHandler

logging.basicConfig(
    level=logging.INFO,
    format="%(message)s",
    datefmt="[%X]",
    handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True)],
)

logger: logging.Logger = logging.getLogger("tiedmulti")


def set_verbosity(*, verbose: bool = False, quiet: bool = False) -> None:
    """Adjust the package log level from CLI flags (verbose wins)."""
    if verbose:
        logger.setLevel(logging.DEBUG)
    elif quiet:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)
