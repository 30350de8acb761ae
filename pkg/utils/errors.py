"""Exception hierarchy

Every error raised by sdploc derives from LocalizationError so the CLI can map
the whole family onto exit codes in one place (see main.py).
"""
from typing import Optional


class LocalizationError(Exception):
    """Base class for all sdploc errors"""


class ConfigError(LocalizationError, ValueError):
    """Invalid generation / experiment / CLI configuration"""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class EmptyGraph(LocalizationError):
    """No measurement edge survived construction (radio range too small)"""


class FormatError(LocalizationError, ValueError):
    """Malformed instance or sweep file"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(f"{prefix}{message}")


class InstanceIOError(LocalizationError, OSError):
    """Instance or result file could not be read or written"""


class DimensionError(LocalizationError, ValueError):
    """Matrix / vector shape does not match the expected layout"""


class BadStatus(LocalizationError):
    """A solve result with an unusable status was handed to an extractor"""


class LengthMismatch(LocalizationError, ValueError):
    """Two sequences that must be aligned have different lengths"""


class NotNormalized(LocalizationError, ValueError):
    """A probability vector does not sum to one"""


class EmptyInput(LocalizationError, ValueError):
    """An operation that needs at least one value received none"""
