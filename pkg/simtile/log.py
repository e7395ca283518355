"""
Logging Module

structlog setup for the library and the command line. Records go to stderr so
that stdout stays reserved for the single document a command prints.
"""

import logging
import sys
from typing import Optional

import structlog

from simtile.config import LOG_FORMAT, LOG_LEVEL


def setup_logging(level: Optional[str] = None, fmt: Optional[str] = None):
    """
    Configure stdlib logging and structlog

    Args:
        level: Log level name (defaults to SIMTILE_LOG_LEVEL)
        fmt: 'json' or 'console' (defaults to SIMTILE_LOG_FORMAT)

    Returns:
        Configured structlog logger for the package
    """
    level = (level or LOG_LEVEL).upper()
    fmt = fmt or LOG_FORMAT
    log_level = getattr(logging, level, logging.WARNING)

    logging.basicConfig(
        level=log_level,
        stream=sys.stderr,
        format="%(message)s",
        force=True,
    )

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer() if fmt == "json" else structlog.dev.ConsoleRenderer(colors=False),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )

    return structlog.get_logger("simtile")
