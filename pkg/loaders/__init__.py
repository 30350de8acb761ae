"""Loaders Package

Exports:
- config: config.toml loader
- validator: GenConfig / experiment validation

instance (instance files) and sweep (sweep config files) are imported
directly; they depend on features/ and would make this package circular.
"""

from . import config
from . import validator

__all__ = ['config', 'validator']
