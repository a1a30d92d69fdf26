"""Command-line runner."""

from .config import RunConfig, parse_config, serialize, validate
from .runner import run

__all__ = ["RunConfig", "parse_config", "serialize", "validate", "run"]
