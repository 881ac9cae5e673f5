"""
Mapping of engine errors onto HTTP errors.
"""

from fastapi import HTTPException, status

from app.models.api_models import ErrorResponse
from app.utils.exceptions import HopfCyclicError


def domain_error(exc: HopfCyclicError) -> HTTPException:
    return HTTPException(
        status_code=status.HTTP_400_BAD_REQUEST,
        detail=ErrorResponse(error_code=exc.error_code, message=exc.message, details=exc.details).model_dump(),
    )


def internal_error(message: str) -> HTTPException:
    return HTTPException(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        detail=ErrorResponse(error_code="INTERNAL_ERROR", message=message).model_dump(),
    )
