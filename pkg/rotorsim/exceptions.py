"""Exceptions for the rotorsim package."""
from typing import Optional

from .const import EXIT_IO, EXIT_NUMERICAL, EXIT_USAGE


class RotorSimError(Exception):
    """Base error for rotorsim."""

    exit_code = EXIT_NUMERICAL


class DomainError(RotorSimError, ValueError):
    """Physical input outside the domain of an operation."""

    exit_code = EXIT_USAGE


class ConfigError(RotorSimError):
    """Invalid run configuration."""

    exit_code = EXIT_USAGE

    def __init__(self, message: str, field_path: Optional[str] = None):
        """Initialize with the dotted path of the offending field."""
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class DataError(RotorSimError):
    """Unreadable or malformed trace data."""

    exit_code = EXIT_IO

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        """Initialize with the file and line the problem was found on."""
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = str(path)
            if line is not None:
                location = f"{location}:{line}"
            message = f"{location}: {message}"
        super().__init__(message)


class IntegratorError(RotorSimError):
    """Trajectory integration became unstable or unphysical."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, trajectory_index: Optional[int] = None, seed=None):
        """Initialize with the failing trajectory and its seed."""
        self.trajectory_index = trajectory_index
        self.seed = seed
        self.reason = message
        if seed is not None:
            message = f"{message} (trajectory seed {seed})"
        elif trajectory_index is not None:
            message = f"{message} (trajectory {trajectory_index})"
        super().__init__(message)

    def with_seed(self, seed) -> "IntegratorError":
        """Return a copy of this error naming the trajectory seed."""
        return IntegratorError(self.reason, self.trajectory_index, seed)


class FitError(RotorSimError):
    """Structurally invalid fit problem."""

    exit_code = EXIT_USAGE
