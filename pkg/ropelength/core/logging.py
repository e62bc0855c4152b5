"""Structured logging for the ropelength tools.

Every line goes to stderr; stdout carries reports, CSV and curve files.
"""
from __future__ import annotations

import logging
import math
import sys
from contextlib import AbstractContextManager
from typing import Any, MutableMapping

import structlog


def _stderr_logger(*_args: object) -> structlog.PrintLogger:
    # Resolved per logger so a replaced sys.stderr is honoured.
    return structlog.PrintLogger(sys.stderr)


def _non_finite_as_text(
    _logger: Any, _method: str, event_dict: MutableMapping[str, Any]
) -> MutableMapping[str, Any]:
    """Render ``inf`` and ``nan`` floats as ``"inf"``/``"nan"``.

    Thickness of a straight polyline and POCA lengths of searches that
    found nothing are infinite; strict JSON has no literal for them.
    """
    for key, value in event_dict.items():
        if isinstance(value, float) and not math.isfinite(value):
            event_dict[key] = repr(value)
    return event_dict


def setup_logging(debug: bool = False) -> None:
    """Configure structlog on stderr.

    Args:
        debug: When ``True`` use console renderer and DEBUG level;
            otherwise use JSON renderer and INFO level.
    """
    renderer = (
        structlog.dev.ConsoleRenderer()
        if debug
        else structlog.processors.JSONRenderer()
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="iso"),
            _non_finite_as_text,
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.DEBUG if debug else logging.INFO
        ),
        context_class=dict,
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def curve_context(label: str, edges: int) -> AbstractContextManager[None]:
    """Tag every log line emitted inside the block with the curve's label.

    Example::

        with curve_context("trefoil", 512):
            thickness(curve)
    """
    return structlog.contextvars.bound_contextvars(curve=label, edges=edges)


def get_logger(name: str) -> structlog.BoundLogger:
    """Return a structlog logger named *name* (typically ``__name__``)."""
    return structlog.get_logger(name)
