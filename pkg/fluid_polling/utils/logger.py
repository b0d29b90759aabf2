"""
Logging setup for Fluid Polling
"""

import logging
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

from fluid_polling.utils.config import Config

_configured = False


def setup_logging(level: Optional[str] = None) -> None:
    """Install a Rich log handler on the package logger

    Args:
        level: Log level name; defaults to Config.LOG_LEVEL
    """
    global _configured
    logger = logging.getLogger("fluid_polling")
    logger.setLevel((level or Config.LOG_LEVEL).upper())
    if not _configured:
        handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
        _configured = True


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)
