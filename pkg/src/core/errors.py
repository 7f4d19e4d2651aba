"""Exception hierarchy shared by every LesionFuse module."""

from pathlib import Path
from typing import Optional, Union


class LesionFuseError(Exception):
    """Base class for errors raised by LesionFuse."""


class InputValidationError(LesionFuseError, ValueError):
    """Input violates a documented precondition."""


class RecordParseError(InputValidationError):
    """A line or row of an input file could not be parsed."""

    def __init__(
        self,
        message: str,
        path: Optional[Union[str, Path]] = None,
        line: Optional[int] = None,
    ) -> None:
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path is not None:
            location = self.path if line is None else f"{self.path}:{line}"
        elif line is not None:
            location = f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)


class EvaluationError(LesionFuseError):
    """Metrics are undefined for the given inputs (e.g. no annotations)."""
