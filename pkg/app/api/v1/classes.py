"""
Characteristic class endpoints (codimension 1).
"""

from fastapi import APIRouter, HTTPException, status

from app.models.api_models import ErrorResponse, NamedCocycleResponse
from app.models.reports import VerificationReport
from app.services.characteristic_classes import NAMED_COCYCLES, named_cocycle, verify_all
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

router = APIRouter(prefix="/v1/classes", tags=["classes"])


@router.get("/health")
def classes_health_check():
    return {"status": "healthy", "service": "classes", "cocycles": sorted(NAMED_COCYCLES)}


@router.get("/verify", response_model=VerificationReport, response_model_by_alias=True)
def verify_classes() -> VerificationReport:
    report = verify_all()
    logger.info("Class suite served", extra={"pass": report.passed})
    return report


@router.get("/{name}", response_model=NamedCocycleResponse)
def get_cocycle(name: str) -> NamedCocycleResponse:
    if name not in NAMED_COCYCLES:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=ErrorResponse(
                error_code="UNKNOWN_COCYCLE",
                message=f"no cocycle named '{name}'",
                details={"known": sorted(NAMED_COCYCLES)},
            ).model_dump(),
        )
    cocycle = named_cocycle(name)
    return NamedCocycleResponse(name=name, degree=cocycle.cochain.degree, rendering=cocycle.cochain.format())
