"""Custom exception hierarchy for the ropelength toolkit."""
from __future__ import annotations

from typing import Any, Optional


class RopelengthError(Exception):
    """Base application error.

    All domain-specific exceptions inherit from this class so that the
    command-line front end can map any failure onto a message and a
    process exit status.

    Attributes:
        message: Human-readable error description.
        code: Machine-readable error code string.
        exit_code: Process exit status used by the CLI.
        details: Optional structured details payload.
    """

    def __init__(
        self,
        message: str,
        code: str = "INTERNAL_ERROR",
        exit_code: int = 1,
        details: Optional[Any] = None,
    ) -> None:
        self.message = message
        self.code = code
        self.exit_code = exit_code
        self.details = details
        super().__init__(message)


class InvalidPositionError(RopelengthError):
    """Raised when a curve position names a missing component or edge."""

    def __init__(
        self,
        message: str = "Invalid curve position",
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(
            message=message, code="INVALID_POSITION", details=details
        )


class NoTurningAngleError(RopelengthError):
    """Raised when a turning angle is requested at an open endpoint."""

    def __init__(
        self,
        message: str = "Endpoint of an open component has no turning angle",
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(
            message=message, code="NO_TURNING_ANGLE", details=details
        )


class InvalidInputError(RopelengthError):
    """Raised for degenerate geometry or out-of-range parameters."""

    def __init__(
        self,
        message: str = "Invalid input",
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(message=message, code="INVALID_INPUT", details=details)


class PreconditionError(RopelengthError):
    """Raised when an edge pair is equal or shares a vertex."""

    def __init__(
        self,
        message: str = "Precondition violated",
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(
            message=message, code="PRECONDITION_FAILED", details=details
        )


class DegenerateCurveError(RopelengthError):
    """Raised when a quantity is undefined because thickness is zero."""

    def __init__(
        self,
        message: str = "Curve has zero thickness",
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(
            message=message,
            code="DEGENERATE_CURVE",
            exit_code=2,
            details=details,
        )


class CurveFileError(RopelengthError):
    """Raised when a curve file cannot be parsed or written.

    ``line`` is the 1-based line number of the offending input line, or
    ``None`` when the failure is not tied to a line.
    """

    def __init__(
        self,
        message: str = "Malformed curve file",
        line: Optional[int] = None,
        details: Optional[Any] = None,
    ) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(
            message=message,
            code="CURVE_FILE_ERROR",
            details=details if details is not None else {"line": line},
        )
