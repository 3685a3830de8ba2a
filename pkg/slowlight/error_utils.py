"""
Error types and error transformation utilities.

Defines the exception hierarchy raised by the library and converts exceptions
into messages and exit codes suitable for the command line.
"""
from typing import Tuple

from pydantic import ValidationError

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_REGIME_FAILURE = 2
EXIT_NUMERICAL_FAILURE = 3


class SlowLightError(Exception):
    """Base class for all library errors."""


class ConfigError(SlowLightError, ValueError):
    """Configuration could not be parsed or violates a type invariant."""

    def __init__(self, message: str, key: str = None, line: int = None, column: int = None):
        self.key = key
        self.line = line
        self.column = column
        location = []
        if line is not None:
            location.append(f"line {line}")
            if column is not None:
                location.append(f"column {column}")
        prefix = ", ".join(location)
        if key:
            prefix = f"{prefix}: {key}" if prefix else key
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ParameterError(ConfigError):
    """Physical parameters for which derived quantities are undefined."""


class GridError(SlowLightError, ValueError):
    """A time or propagation grid violates its invariants."""


class StepSizeError(GridError):
    """Time step too coarse for the fastest coherence rate."""


class NumericalError(SlowLightError, ArithmeticError):
    """Non-finite values or a singular system during a run."""

    def __init__(self, message: str, slice_index: int = None):
        self.slice_index = slice_index
        if slice_index is not None:
            message = f"{message} (z-slice {slice_index})"
        super().__init__(message)


class AnalysisError(SlowLightError, ValueError):
    """A result quantity is undefined for the given input."""


class RegimeError(SlowLightError):
    """One or more validity conditions failed."""


def exit_code_for(exception: Exception) -> int:
    """
    Map an exception to the CLI exit code.

    Args:
        exception: The exception that ended the command

    Returns:
        1 for configuration problems, 2 for regime failures, 3 for numerical failures
    """
    if isinstance(exception, (ConfigError, ValidationError)):
        return EXIT_CONFIG_ERROR
    if isinstance(exception, RegimeError):
        return EXIT_REGIME_FAILURE
    if isinstance(exception, (GridError, NumericalError, AnalysisError, ArithmeticError)):
        return EXIT_NUMERICAL_FAILURE
    if isinstance(exception, (FileNotFoundError, PermissionError)):
        return EXIT_CONFIG_ERROR
    return EXIT_NUMERICAL_FAILURE


def transform_error_for_user(exception: Exception) -> Tuple[str, str]:
    """
    Transform exceptions into messages fit for the command line.

    Args:
        exception: The original exception

    Returns:
        Tuple of (user_message, error_type)
        - user_message: Message naming the offending key, field or slice
        - error_type: Exception class name for logging/debugging
    """
    error_type = type(exception).__name__

    if isinstance(exception, ValidationError):
        return _handle_pydantic_error(exception)

    if isinstance(exception, SlowLightError):
        return str(exception), error_type

    if isinstance(exception, FileNotFoundError):
        return f"File not found: {exception.filename}", error_type

    if isinstance(exception, PermissionError):
        return f"Permission denied: {exception.filename}", error_type

    if isinstance(exception, (FloatingPointError, ZeroDivisionError, OverflowError)):
        return f"Numerical failure: {exception}", error_type

    return (
        "An unexpected error occurred while running the simulation. "
        "Re-run with --log-level DEBUG for details.",
        error_type
    )


def _handle_pydantic_error(error: ValidationError) -> Tuple[str, str]:
    """Handle Pydantic validation errors specifically."""
    try:
        errors = error.errors()
        if not errors:
            return "Invalid configuration.", "ValidationError"

        messages = []
        for item in errors:
            path = ".".join(str(part) for part in item.get('loc', ()) if part != '__root__')
            msg = item.get('msg', '')
            if msg.startswith("Value error, "):
                msg = msg[len("Value error, "):]
            if item.get('type') == 'extra_forbidden':
                msg = "unknown key"
            messages.append(f"{path}: {msg}" if path else msg)

        return "Invalid configuration: " + "; ".join(messages), "ValidationError"

    except Exception:
        return "Invalid configuration.", "ValidationError"
