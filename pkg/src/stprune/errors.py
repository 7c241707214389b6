"""Exception taxonomy shared across the library.

Every error raised by stprune derives from :class:`StpruneError`, so callers
(including the CLI) can distinguish validation failures from genuine I/O
problems with a single except clause.
"""

from __future__ import annotations


class StpruneError(Exception):
    """Base class for all stprune-specific errors."""


class DimensionError(StpruneError):
    """Shape or length mismatch between related inputs, or an empty input."""


class PreconditionError(StpruneError):
    """An operation was called outside its stated domain (bad k, empty set, ...)."""


class FormatError(StpruneError):
    """Malformed tensor file. Carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ConfigError(StpruneError):
    """Inconsistent or invalid configuration (budget splits, ring size, scene spec)."""


class DegenerateRingError(PreconditionError):
    """Ring has fewer than two views and single-view mode was not enabled."""


class OracleScaleError(PreconditionError):
    """Exhaustive-search size caps exceeded."""


class ConsistencyError(StpruneError):
    """Cross-referenced artifacts disagree (e.g. refs that do not address the scene)."""
