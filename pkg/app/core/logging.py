from __future__ import annotations

import logging
import sys
import json
from pathlib import Path
from logging.handlers import RotatingFileHandler
from datetime import datetime, timezone
from typing import Any, Dict, Optional
from app.core.config import settings
from app.core.run_context import current_run_id, current_trial_id

_LOGGING_CONFIGURED = False  # guard to avoid duplicate setup


class JSONFormatter(logging.Formatter):
    """Custom JSON Formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="milliseconds"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)
        run_id = getattr(record, "run_id", None) or current_run_id.get()
        if run_id:
            log_data["run_id"] = run_id
        trial_id = getattr(record, "trial_id", None) or current_trial_id.get()
        if trial_id:
            log_data["trial_id"] = trial_id
        if hasattr(record, "extra_data"):
            log_data["extra_data"] = record.extra_data
        return json.dumps(log_data, ensure_ascii=False, default=str)


def _resolve_level(level: Optional[str] = None, default: str = "INFO") -> int:
    level_name = str(level or getattr(settings, "LOG_LEVEL", default)).upper()
    return getattr(logging, level_name, logging.INFO)


def _formatter() -> logging.Formatter:
    if settings.LOG_FORMAT == "json":
        return JSONFormatter()
    return logging.Formatter("%(asctime)s %(levelname)-8s %(name)s %(message)s")


def _file_handler(target: str) -> Optional[RotatingFileHandler]:
    """Rotating handler for ``target``; a suffix-less path is treated as a directory."""
    log_path = Path(target).expanduser()
    if not log_path.suffix:
        log_path = log_path / "glmb.log"
    try:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        return RotatingFileHandler(
            log_path,
            maxBytes=settings.LOG_MAX_SIZE,
            backupCount=settings.LOG_BACKUP_COUNT,
            encoding="utf-8",
            delay=True,
        )
    except OSError as exc:
        logging.getLogger(__name__).warning(f"file logging disabled, cannot open {log_path}: {exc}")
        return None


def setup_logging(level: Optional[str] = None, file_path: Optional[str] = None) -> None:
    """
    Install console (and optionally rotating file) handlers on the root logger.

    ``level`` and ``file_path`` override the settings for this process; an
    empty ``file_path`` disables file logging. Later calls are no-ops.
    """
    global _LOGGING_CONFIGURED
    if _LOGGING_CONFIGURED:
        return
    _LOGGING_CONFIGURED = True

    resolved = _resolve_level(level)
    formatter = _formatter()
    root = logging.getLogger()
    root.setLevel(resolved)
    root.handlers.clear()

    # stderr keeps stdout free for CLI output
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    target = settings.LOG_FILE_PATH if file_path is None else file_path
    if target:
        file_handler = _file_handler(str(target))
        if file_handler is not None:
            handlers.append(file_handler)
    for handler in handlers:
        handler.setLevel(resolved)
        handler.setFormatter(formatter)
        root.addHandler(handler)

    for noisy in ("uvicorn", "uvicorn.access"):
        logging.getLogger(noisy).setLevel(logging.WARNING)
