"""
Exception hierarchy shared by every workbench module
"""
from typing import Any, Optional, Sequence, Tuple


class WorkbenchError(Exception):
    """Base class for all errors raised by the workbench."""


class TreeSyntaxError(WorkbenchError):
    """Concrete syntax could not be parsed (trees and transducer files)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownSymbolError(WorkbenchError):
    pass


class ArityError(WorkbenchError):
    pass


class InvalidPathError(WorkbenchError):
    pass


class TransducerError(WorkbenchError):
    """A transducer is malformed or has no rule for a demanded pair."""


class CircularityError(WorkbenchError):
    """An attribute instance was demanded while it was being computed."""

    def __init__(self, message: str, cycle: Sequence[Tuple[str, Tuple[int, ...]]] = ()):
        self.cycle = tuple(cycle)
        super().__init__(message)


class UndefinedInheritedError(WorkbenchError):
    """An inherited attribute was demanded at the root of the input tree."""


class PreconditionError(WorkbenchError):
    pass


class ConstructionError(WorkbenchError):
    """A construction hit an internal consistency check."""


class AlphabetMismatchError(WorkbenchError):
    pass


class ConfigError(WorkbenchError):
    pass


class StageError(WorkbenchError):
    """Wraps the failure of one pipeline stage."""

    def __init__(self, stage_index: int, cause: BaseException):
        self.stage_index = stage_index
        self.cause: Any = cause
        super().__init__(f"stage {stage_index} failed: {cause}")
