"""Exception types raised by widgetmatch."""

from __future__ import annotations


class WidgetMatchError(Exception):
    """Base class for all library errors."""


class FileError(WidgetMatchError):
    """An input file is missing or unreadable."""

    def __init__(self, path, reason: str) -> None:
        self.path = str(path)
        super().__init__(f"{self.path}: {reason}")


class FormatError(WidgetMatchError):
    """A document is malformed or violates a model invariant."""

    def __init__(self, message: str, path=None, line: int | None = None) -> None:
        self.path = None if path is None else str(path)
        self.line = line
        if self.path is not None:
            location = self.path if line is None else f"{self.path}:{line}"
            location += ": "
        else:
            location = "" if line is None else f"line {line}: "
        super().__init__(location + message)


class ConfigError(WidgetMatchError):
    """A pipeline configuration or priority table is invalid."""


class ConsistencyError(WidgetMatchError):
    """An oracle or result does not agree with the models it refers to."""


class PlanError(WidgetMatchError):
    """A mutation cannot be applied to the given model."""
