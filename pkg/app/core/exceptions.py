"""
Custom exception classes for the lab.

Every exception carries the CLI exit code it maps to:
0 success, 1 domain error, 2 resource error, 3 failed check.
"""
from typing import Optional, Any, Dict


EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_RESOURCE_ERROR = 2
EXIT_CHECK_FAILED = 3


class AppException(Exception):
    """Base exception for lab errors."""

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_CHECK_FAILED,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class DomainError(AppException):
    """Raised when an input violates an operation's precondition."""

    def __init__(self, message: str, field: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        merged = dict(details or {})
        if field:
            merged["field"] = field
        super().__init__(
            message=message,
            exit_code=EXIT_DOMAIN_ERROR,
            details=merged
        )


class PoleError(DomainError):
    """Raised when a function is evaluated at one of its poles."""

    def __init__(self, function: str, point: Any):
        super().__init__(
            message=f"{function} has a pole at {point}",
            details={"function": function, "point": str(point)}
        )


class ResourceError(AppException):
    """Raised when a computation would exceed a configured cost cap."""

    def __init__(self, resource: str, requested: Any, limit: Any):
        super().__init__(
            message=f"{resource} exceeds cap: requested {requested}, limit {limit}",
            exit_code=EXIT_RESOURCE_ERROR,
            details={"resource": resource, "requested": str(requested), "limit": str(limit)}
        )


class CheckFailedError(AppException):
    """Raised when a check suite finds a violated identity or tolerance."""

    def __init__(self, check: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"Check '{check}' failed: {message}",
            exit_code=EXIT_CHECK_FAILED,
            details={"check": check, **(details or {})}
        )


class InternalError(AppException):
    """Raised when an identity that holds exactly is violated numerically."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            exit_code=EXIT_CHECK_FAILED,
            details=details
        )
