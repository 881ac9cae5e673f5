"""
Cyclic endpoints: b, B, tau_n and the cocycle test on cochains, and the
seeded cyclic-relation suite.
"""

from fastapi import APIRouter

from app.api.errors import domain_error, internal_error
from app.api.v1.algebra import modular_pair
from app.cli.expr_parser import parse_tensor
from app.models.api_models import AlgebraResponse, CocycleResponse, LambdaRequest, TensorRequest
from app.models.reports import VerificationReport
from app.services.cyclic_complex import CyclicContext, verify_cyclic_relations
from app.utils.exceptions import HopfCyclicError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

router = APIRouter(prefix="/v1/cyclic", tags=["cyclic"])


def _apply(request: TensorRequest, operation: str) -> AlgebraResponse:
    try:
        ctx = CyclicContext(request.codim, modular_pair(request.character, request.codim))
        c = parse_tensor(request.expression, request.codim)
        result = {"hochschild-b": ctx.hochschild_b, "connes-b": ctx.connes_B, "cyclic-operator": ctx.cyclic}[operation](c)
    except HopfCyclicError as exc:
        logger.warning("Cyclic request rejected", extra={"operation": operation, "error_code": exc.error_code})
        raise domain_error(exc)
    except Exception as exc:
        logger.error("Cyclic request failed", extra={"operation": operation, "error": str(exc)})
        raise internal_error(f"{operation} failed")
    return AlgebraResponse(result=result.format(), degree=result.degree)


@router.post("/hochschild-b", response_model=AlgebraResponse)
def hochschild_b(request: TensorRequest) -> AlgebraResponse:
    return _apply(request, "hochschild-b")


@router.post("/connes-b", response_model=AlgebraResponse)
def connes_b(request: TensorRequest) -> AlgebraResponse:
    return _apply(request, "connes-b")


@router.post("/cyclic-operator", response_model=AlgebraResponse)
def cyclic_operator(request: TensorRequest) -> AlgebraResponse:
    return _apply(request, "cyclic-operator")


@router.post("/is-cocycle", response_model=CocycleResponse)
def is_cocycle(request: TensorRequest) -> CocycleResponse:
    try:
        ctx = CyclicContext(request.codim, modular_pair(request.character, request.codim))
        c = parse_tensor(request.expression, request.codim)
        verdict = ctx.is_cyclic_cocycle(c)
    except HopfCyclicError as exc:
        raise domain_error(exc)
    return CocycleResponse(expression=c.format(), degree=c.degree, is_cocycle=verdict)


@router.post("/verify-lambda", response_model=VerificationReport, response_model_by_alias=True)
def verify_lambda(request: LambdaRequest) -> VerificationReport:
    """Cyclic-category relations on seeded random cochains."""
    ctx = CyclicContext(request.codim, modular_pair(request.character, request.codim))
    report = verify_cyclic_relations(ctx, request.n_max, request.trials, request.seed)
    logger.info("Lambda suite served", extra={"codim": request.codim, "pass": report.passed})
    return report


@router.get("/health")
def cyclic_health_check():
    return {"status": "healthy", "service": "cyclic"}
