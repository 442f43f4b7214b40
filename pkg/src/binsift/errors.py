"""Exception types shared across the pipeline."""

from __future__ import annotations


class CurationError(Exception):
    """Base class for data and configuration errors raised by this package."""


class RowError(CurationError):
    """A single malformed or invariant-violating input row.

    Carries the 1-based line number of the offending row so rejects can be
    traced back to the source file.
    """

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


class SchemaError(CurationError):
    """An input file is missing required columns."""


class HierarchyError(CurationError):
    """Bad hierarchy input: malformed edge, unknown relation token, or a cycle."""


class UnknownLabelError(CurationError):
    """A task-spec label id is not present in the hierarchy's label registry."""


class ConfigError(CurationError):
    """Bad run configuration: missing files, unknown keys, malformed values."""
