"""Unified Logging Configuration Module

Priority Order: Environment Variables > config.toml > Defaults

Environment Variables:
- SDPLOC_DEBUG=1 → force level=DEBUG
- SDPLOC_LOG_LEVEL=INFO → set level
- SDPLOC_LOG_FILE=/path/to/log → override file path
- SDPLOC_LOG_FORMAT=text → override format (json|text)

Usage:
    # In main.py (initialization)
    from utils.logger import setup_logger
    logger = setup_logger(config.get("logging", {}))

    # In other modules
    from utils.logger import get_logger
    logger = get_logger("conic.solver")
    logger.info("Message")
"""
import json
import logging
import logging.handlers
import os
import sys
from pathlib import Path
from typing import Optional

ROOT_NAME = "sdploc"

# Global logger instance
_logger: Optional[logging.Logger] = None


def _resolve_log_file(raw_path: str) -> Path:
    """Resolve log path relative to app root, not current working directory."""
    app_root = Path(__file__).resolve().parent.parent
    path = Path(raw_path)
    if path.is_absolute():
        return path
    return app_root / path


def _level(name: str, default: int = logging.WARNING) -> int:
    value = getattr(logging, str(name).upper(), default)
    return value if isinstance(value, int) else default


class JSONFormatter(logging.Formatter):
    """JSON log formatter for machine-parseable logs"""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON

        Output format:
        {
            "time": "2026-01-31 10:30:45",
            "level": "INFO",
            "name": "sdploc.conic.solver",
            "msg": "Solve finished: Optimal in 23 iterations",
            "file": "solver.py:42"
        }
        """
        log_data = {
            "time": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "name": record.name,
            "msg": record.getMessage(),
            "file": f"{record.filename}:{record.lineno}",
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, ensure_ascii=False)


def setup_logger(config: dict) -> logging.Logger:
    """Configure global logger instance

    This should be called ONCE at application startup (in main.py).

    Args:
        config: The [logging] section from config.toml
            - enabled (bool): Whether logging is enabled (default: True)
            - level (str): File log level (default: WARNING)
            - format (str): Log format (json|text, default: json)
            - file (str): Log file path (default: log/sdploc.log)
            - max_bytes (int): Max file size before rotation (default: 10MB)
            - backup_count (int): Number of backup files to keep (default: 3)
            - console_level (str): stderr diagnostics level (default: WARNING,
              "OFF" disables the console handler)

    Returns:
        Configured logger instance
    """
    global _logger

    if _logger is not None:
        return _logger

    enabled = config.get("enabled", True)

    # Level priority: SDPLOC_DEBUG > SDPLOC_LOG_LEVEL > config.level > WARNING
    if os.getenv("SDPLOC_DEBUG") == "1":
        level = logging.DEBUG
    elif level_str := os.getenv("SDPLOC_LOG_LEVEL"):
        level = _level(level_str)
    else:
        level = _level(config.get("level", "WARNING"))

    format_type = os.getenv("SDPLOC_LOG_FORMAT", config.get("format", "json"))
    raw_log_file = os.getenv("SDPLOC_LOG_FILE", config.get("file", "log/sdploc.log"))
    log_file = _resolve_log_file(raw_log_file)

    max_bytes = config.get("max_bytes", 10485760)  # 10MB
    backup_count = config.get("backup_count", 3)
    console_level = str(config.get("console_level", "WARNING"))

    _logger = logging.getLogger(ROOT_NAME)
    for stale in _logger.handlers[:]:
        _logger.removeHandler(stale)
    _logger.setLevel(level)
    _logger.propagate = False

    if not enabled:
        _logger.addHandler(logging.NullHandler())
        return _logger

    if format_type == "json":
        formatter = JSONFormatter(datefmt="%Y-%m-%d %H:%M:%S")
    else:
        formatter = logging.Formatter(
            "[%(asctime)s] %(levelname)s: %(message)s (%(name)s @ %(filename)s:%(lineno)d)",
            datefmt="%Y-%m-%d %H:%M:%S"
        )

    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.handlers.RotatingFileHandler(
        str(log_file),
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding="utf-8"
    )
    handler.setLevel(level)
    handler.setFormatter(formatter)
    _logger.addHandler(handler)

    # Diagnostics to stderr; stdout is reserved for the console summary
    if console_level.upper() != "OFF":
        console = logging.StreamHandler(sys.stderr)
        console.setLevel(_level(console_level))
        console.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        _logger.addHandler(console)

    return _logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get logger instance

    Args:
        name: Optional logger name suffix (e.g., "router" -> "sdploc.router")

    Note:
        Library modules call this at import time, before setup_logger() runs.
        The returned child logger picks up handlers once setup happens.
    """
    base = _logger if _logger is not None else logging.getLogger(ROOT_NAME)
    if _logger is None and not base.handlers:
        base.addHandler(logging.NullHandler())
    if name:
        return base.getChild(name)
    return base


def reset_logger():
    """Reset global logger (for testing only)"""
    global _logger
    if _logger:
        for handler in _logger.handlers[:]:
            handler.close()
            _logger.removeHandler(handler)
        _logger = None
