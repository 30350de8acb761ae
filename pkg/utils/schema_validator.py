"""
Schema validator
Validates instance files and sweep configs against config/schema/*.json
"""
import json
from pathlib import Path
from typing import Any, Dict, NamedTuple, Optional
try:
    from jsonschema import Draft7Validator
    HAS_JSONSCHEMA = True
except ImportError:
    HAS_JSONSCHEMA = False

from utils.logger import get_logger

logger = get_logger("schema_validator")

SCHEMA_DIR = Path(__file__).parent.parent / "config" / "schema"


class SchemaIssue(NamedTuple):
    message: str
    field: Optional[str]


def _field_path(error) -> Optional[str]:
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else None


class SchemaValidator:
    """One Draft-7 validator per schema file (stem is the schema name)"""

    def __init__(self, schema_dir: Path = SCHEMA_DIR):
        self.schemas: Dict[str, dict] = {}
        self._validators: Dict[str, Any] = {}
        self._load_schemas(schema_dir)

    def _load_schemas(self, schema_dir: Path):
        if not schema_dir.exists():
            return
        for schema_file in sorted(schema_dir.glob("*.json")):
            with open(schema_file) as f:
                self.schemas[schema_file.stem] = json.load(f)

    def validate(self, name: str, data: Any) -> Optional[SchemaIssue]:
        """
        Validate `data` against schema `name`

        Returns:
            The first issue (deepest path first), None when valid or when
            jsonschema is not installed
        """
        if not HAS_JSONSCHEMA:
            logger.warning("jsonschema not installed, skipping schema validation")
            return None

        schema = self.schemas.get(name)
        if schema is None:
            return SchemaIssue(f"No schema found: {name}", None)

        validator = self._validators.get(name)
        if validator is None:
            validator = self._validators[name] = Draft7Validator(schema)

        errors = sorted(validator.iter_errors(data), key=lambda e: (-len(e.absolute_path), list(map(str, e.absolute_path))))
        if not errors:
            return None
        first = errors[0]
        return SchemaIssue(first.message, _field_path(first))


# Global validator instance
_validator: Optional[SchemaValidator] = None


def get_validator() -> SchemaValidator:
    global _validator
    if _validator is None:
        _validator = SchemaValidator()
    return _validator


def validate_instance(data: Dict[str, Any]) -> Optional[SchemaIssue]:
    return get_validator().validate("instance", data)


def validate_sweep(data: Dict[str, Any]) -> Optional[SchemaIssue]:
    return get_validator().validate("sweep", data)
