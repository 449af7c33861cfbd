"""dictConfig-based logging for the CLI and the gateway."""

from __future__ import annotations

from logging.config import dictConfig
from typing import Any, Dict, Optional

from common import settings


def build_logging_config(level: Optional[str] = None) -> Dict[str, Any]:
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "default": {
                "format": settings.LOG_FORMAT,
            },
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "default",
            },
        },
        "root": {"handlers": ["console"], "level": (level or settings.LOG_LEVEL).upper()},
    }


def configure_logging(level: Optional[str] = None) -> None:
    """Install the console handler on the root logger. Entry points call this once."""
    dictConfig(build_logging_config(level))
