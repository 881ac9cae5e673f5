"""
Structured logging helpers.

Algebraic payloads (renderings of elements, term maps) can grow very large;
this wrapper abbreviates them before they reach the log handlers and attaches
a timestamp and component name to every structured context.
"""

import logging
from typing import Any, Dict, Mapping
from datetime import datetime, timezone

from app.utils.config import get_settings


class StructuredLogger:
    """
    Logger that abbreviates large payloads and enriches the extra context.
    """

    def __init__(self, logger_name: str, payload_limit: int = None):
        self.logger = logging.getLogger(logger_name)
        self.payload_limit = payload_limit or get_settings().log_payload_limit

    def _abbreviate(self, value: Any) -> Any:
        """
        Shorten a single value: long strings keep a prefix, term maps report their size.
        """
        if isinstance(value, str):
            if len(value) > self.payload_limit:
                return f"{value[: self.payload_limit]}... [{len(value)} chars]"
            return value
        if isinstance(value, Mapping):
            if len(value) > 8:
                return f"<{len(value)} terms>"
            return {str(k): self._abbreviate(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)) and len(value) > 8:
            return f"<{len(value)} items>"
        return value

    def _abbreviate_dict(self, data: Dict[str, Any]) -> Dict[str, Any]:
        return {key: self._abbreviate(value) for key, value in data.items()}

    def _safe_format_message(self, message: str, *args) -> str:
        """
        Format a `{}`-style message with abbreviated arguments.
        """
        try:
            safe_args = [self._abbreviate(arg) for arg in args]
            return message.format(*safe_args) if args else message
        except Exception:
            return f"[LOG FORMATTING ERROR] {message}"

    def _handle_extra_context(self, kwargs):
        """Handle extra context for structured logging."""
        extra = kwargs.pop("extra", {})
        if extra:
            safe_extra = self._abbreviate_dict(extra)
            safe_extra.update(
                {
                    "timestamp": datetime.now(timezone.utc).isoformat(),
                    "component": self.logger.name,
                }
            )
            kwargs["extra"] = safe_extra
        return kwargs

    def info(self, message: str, *args, **kwargs):
        safe_message = self._safe_format_message(message, *args)
        kwargs = self._handle_extra_context(kwargs)
        self.logger.info(safe_message, **kwargs)

    def debug(self, message: str, *args, **kwargs):
        if not self.logger.isEnabledFor(logging.DEBUG):
            return
        safe_message = self._safe_format_message(message, *args)
        kwargs = self._handle_extra_context(kwargs)
        self.logger.debug(safe_message, **kwargs)

    def warning(self, message: str, *args, **kwargs):
        safe_message = self._safe_format_message(message, *args)
        kwargs = self._handle_extra_context(kwargs)
        self.logger.warning(safe_message, **kwargs)

    def error(self, message: str, *args, **kwargs):
        safe_message = self._safe_format_message(message, *args)
        kwargs = self._handle_extra_context(kwargs)
        self.logger.error(safe_message, **kwargs)

    def critical(self, message: str, *args, **kwargs):
        safe_message = self._safe_format_message(message, *args)
        kwargs = self._handle_extra_context(kwargs)
        self.logger.critical(safe_message, **kwargs)


def get_structured_logger(name: str) -> StructuredLogger:
    """
    Create a structured logger for a module.
    """
    return StructuredLogger(name)


def configure_logging(level: str = None) -> None:
    """Install the process-wide handler format shared by the API and the CLI."""
    logging.basicConfig(
        level=getattr(logging, (level or get_settings().log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
