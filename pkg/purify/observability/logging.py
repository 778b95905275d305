from __future__ import annotations

import logging
import uuid
from contextvars import ContextVar
from logging.config import dictConfig

from pythonjsonlogger import jsonlogger

run_id: ContextVar[str | None] = ContextVar("run_id", default=None)


def bind_run_id(value: str | None = None) -> str:
    """Set the run identifier attached to subsequent log records."""
    value = value or uuid.uuid4().hex[:12]
    run_id.set(value)
    return value


class RunIdFilter(logging.Filter):
    """Attach the current run ID to each log record."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = run_id.get() or "unbound"
        return True


def configure_logging(level: str = "INFO", json_output: bool = True) -> None:
    formatter: dict[str, object]
    if json_output:
        formatter = {
            "()": jsonlogger.JsonFormatter,
            "fmt": "%(asctime)s %(levelname)s %(name)s %(message)s %(run_id)s",
        }
    else:
        formatter = {
            "format": "%(asctime)s %(levelname)-7s [%(run_id)s] %(name)s: %(message)s"
        }
    dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "filters": {"with_run_id": {"()": RunIdFilter}},
            "formatters": {"default": formatter},
            "handlers": {
                "default": {
                    "class": "logging.StreamHandler",
                    "stream": "ext://sys.stderr",
                    "formatter": "default",
                    "filters": ["with_run_id"],
                }
            },
            "root": {"handlers": ["default"], "level": level},
            "loggers": {
                # scipy.optimize chatter stays out of run logs
                "scipy": {"level": "WARNING"},
            },
        }
    )
