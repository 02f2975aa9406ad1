"""Process-wide logging setup for the CLI."""

import logging

from .config import LOG_LEVEL

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def setup_logging(level: str = LOG_LEVEL, quiet: bool = False) -> None:
    """Configure the root logger once.

    Args:
        level: Level name such as "INFO" or "DEBUG"
        quiet: If True, only warnings and errors are emitted
    """
    effective = logging.WARNING if quiet else getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(level=effective, format=LOG_FORMAT, force=True)
