"""
Global error handling for the command line.

Every handler writes one JSON error document to stderr and returns the exit
code of the process.
"""
import logging
import sys
import traceback

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import EXIT_CHECK_FAILED, EXIT_DOMAIN_ERROR, AppException
from app.schemas.common import ErrorResponse

logger = logging.getLogger(__name__)


def _emit(error: ErrorResponse) -> None:
    sys.stderr.write(error.model_dump_json() + "\n")
    sys.stderr.flush()


def app_exception_handler(exc: AppException) -> int:
    """
    Handler for lab exceptions.

    Args:
        exc: Application exception

    Returns:
        The exception's exit code
    """
    logger.error(exc.message)
    _emit(ErrorResponse(message=exc.message, details=exc.details))
    return exc.exit_code


def validation_exception_handler(exc: ValidationError) -> int:
    """
    Handler for pydantic validation errors raised outside the argument parsers.

    Args:
        exc: Validation error

    Returns:
        Domain-error exit code
    """
    errors = [
        {
            "field": ".".join(str(loc) for loc in error["loc"]),
            "message": error["msg"],
            "type": error["type"]
        }
        for error in exc.errors()
    ]
    logger.error(f"Validation error: {errors}")
    _emit(ErrorResponse(message="Validation error", details={"errors": errors}))
    return EXIT_DOMAIN_ERROR


def generic_exception_handler(exc: Exception) -> int:
    """
    Handler for uncaught exceptions.

    Args:
        exc: Exception

    Returns:
        Check-failed exit code
    """
    logger.error(f"Unhandled exception: {str(exc)}")
    logger.error(traceback.format_exc())
    _emit(ErrorResponse(
        message="Internal error",
        details={"error": str(exc), "type": type(exc).__name__} if settings.DEBUG else {"error": str(exc)}
    ))
    return EXIT_CHECK_FAILED


def handle_exception(exc: Exception) -> int:
    """Dispatch an exception to its handler and return the exit code."""
    if isinstance(exc, AppException):
        return app_exception_handler(exc)
    if isinstance(exc, ValidationError):
        return validation_exception_handler(exc)
    return generic_exception_handler(exc)
