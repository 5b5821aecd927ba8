"""Shared error taxonomy.

Every failure the package raises on purpose derives from StrvError so the
command-line layer can map domain failures to a single exit code.
"""

from __future__ import annotations


class StrvError(Exception):
    """Base class for all domain errors raised by this package."""


class ContractViolation(StrvError, ValueError):
    """An argument or call sequence broke a documented precondition."""


class FormatError(StrvError):
    """A binary or JSON artifact does not match its documented layout."""


class UnsupportedVersion(FormatError):
    """An artifact declares a format version newer than this build reads."""


class EmptyRoiError(StrvError):
    """A region mask selected zero voxels."""


class DegenerateSupportError(StrvError):
    """A support draw contains fewer than two classes."""


class StratificationError(StrvError):
    """A split or draw cannot satisfy its per-class minimum."""


class BudgetExceededError(StrvError):
    """An enumeration was refused because it exceeds the configured budget."""


class ConfigError(StrvError):
    """A configuration file or flag combination is invalid."""
