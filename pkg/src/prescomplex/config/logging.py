"""Structured logging for prescomplex.

Every record is a structlog event rendered as a JSON line or as console
output, written to stderr. Barcodes are the only thing a run writes to
stdout, so two runs on the same input produce byte-identical stdout
whatever the log level.
"""

import logging
import sys
from typing import Any

import structlog
from structlog.types import Processor

LOG_FORMATS = ("json", "pretty")

# numba (pulled in by galois) logs its compiler passes at DEBUG.
_NOISY_LOGGERS = ("numba", "galois", "joblib")


def _shared_processors() -> list[Processor]:
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
    ]


def _renderers(log_format: str) -> list[Processor]:
    if log_format == "json":
        return [structlog.processors.dict_tracebacks, structlog.processors.JSONRenderer()]
    return [structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty())]


def configure_logging(
    log_level: str = "WARNING",
    log_format: str = "json",
    service_name: str = "prescomplex",
) -> None:
    """Route structlog events through stdlib logging on stderr.

    Args:
        log_level: Level name (DEBUG, INFO, WARNING, ERROR, CRITICAL);
            unknown names fall back to WARNING
        log_format: "json" or "pretty"
        service_name: Bound as ``service`` on every event

    Raises:
        ValueError: If log_format is not "json" or "pretty"
    """
    if log_format not in LOG_FORMATS:
        raise ValueError(f"log_format must be 'json' or 'pretty', got: {log_format}")

    level = getattr(logging, log_level.upper(), None)
    if not isinstance(level, int):
        level = logging.WARNING

    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=level, force=True)
    for name in _NOISY_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))

    structlog.contextvars.bind_contextvars(service=service_name)
    structlog.configure(
        processors=_shared_processors() + _renderers(log_format),
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def bind_run_context(**values: Any) -> None:
    """Attach ``values`` (command name, field, input path) to every later event."""
    structlog.contextvars.bind_contextvars(**values)


def clear_run_context(*keys: str) -> None:
    structlog.contextvars.unbind_contextvars(*keys)


def get_logger(name: str | None = None) -> Any:
    """Get a configured logger instance.

    Example:
        >>> logger = get_logger(__name__)
        >>> logger.info("presentation_computed", generators=6, relations=3)
    """
    return structlog.get_logger(name)
