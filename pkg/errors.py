"""
Body Fat Bench - Error hierarchy
Every error carries the CLI exit code it maps to.
"""
from typing import Optional, Sequence


class BodyFatError(Exception):
    """Base error for the library and CLI"""
    exit_code: int = 1

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def with_stage(self, stage: str) -> "BodyFatError":
        """Tag the pipeline stage unless an inner stage already did"""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class ConfigurationError(BodyFatError, ValueError):
    """Invalid configuration: unknown feature, bad arity, bad sub-config"""
    exit_code = 2


class DataError(BodyFatError):
    """Problem with input data"""
    exit_code = 3


class ParseError(DataError):
    """Malformed dataset file, located by row and column"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DomainError(DataError, ValueError):
    """Input outside the domain of a formula or metric"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class NumericalError(BodyFatError):
    """Solver failure"""
    exit_code = 4


class SingularDesignError(NumericalError):
    """Rank-deficient design matrix"""

    def __init__(self, message: str, columns: Sequence[str] = ()):
        if columns:
            message = f"{message}; collinear columns: {', '.join(columns)}"
        super().__init__(message)
        self.columns = list(columns)


class DivergenceError(NumericalError):
    """Iterative training blew up"""

    def __init__(self, message: str, epoch: int):
        super().__init__(f"{message} at epoch {epoch}")
        self.epoch = epoch


class ArtifactIOError(BodyFatError):
    """Artifact could not be read or written"""
    exit_code = 5
