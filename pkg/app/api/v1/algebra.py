"""
Algebra endpoints: normal form, coproduct, antipode and twisted antipode of
elements of H_n.
"""

from typing import Callable

from fastapi import APIRouter

from app.api.errors import domain_error, internal_error
from app.cli.expr_parser import parse_element
from app.models.api_models import AlgebraResponse, CharacterChoice, ExpressionRequest
from app.services.algebra_core import HopfElement
from app.services.hopf_ops import ModularPair, antipode, coproduct, twisted_antipode
from app.utils.exceptions import HopfCyclicError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

router = APIRouter(prefix="/v1/algebra", tags=["algebra"])


def modular_pair(character: CharacterChoice, codim: int) -> ModularPair:
    return ModularPair.standard(codim) if character == CharacterChoice.MODULAR else ModularPair.untwisted(codim)


def _evaluate(request: ExpressionRequest, operation: str, fn: Callable[[HopfElement], object], degree: int) -> AlgebraResponse:
    try:
        h = parse_element(request.expression, request.codim)
        result = fn(h)
    except HopfCyclicError as exc:
        logger.warning("Algebra request rejected", extra={"operation": operation, "error_code": exc.error_code})
        raise domain_error(exc)
    except Exception as exc:
        logger.error("Algebra request failed", extra={"operation": operation, "error": str(exc)})
        raise internal_error(f"{operation} failed")
    logger.info("Algebra request served", extra={"operation": operation, "codim": request.codim})
    return AlgebraResponse(result=result.format(), degree=degree)


@router.post("/normal-form", response_model=AlgebraResponse)
def normal_form(request: ExpressionRequest) -> AlgebraResponse:
    """PBW normal form of the expression."""
    return _evaluate(request, "normal-form", lambda h: h, 1)


@router.post("/coproduct", response_model=AlgebraResponse)
def coproduct_endpoint(request: ExpressionRequest) -> AlgebraResponse:
    return _evaluate(request, "coproduct", coproduct, 2)


@router.post("/antipode", response_model=AlgebraResponse)
def antipode_endpoint(request: ExpressionRequest) -> AlgebraResponse:
    return _evaluate(request, "antipode", antipode, 1)


@router.post("/twisted-antipode", response_model=AlgebraResponse)
def twisted_antipode_endpoint(request: ExpressionRequest) -> AlgebraResponse:
    """S~ = delta * S for the requested modular pair."""
    pair = modular_pair(request.character, request.codim)
    return _evaluate(request, "twisted-antipode", lambda h: twisted_antipode(pair, h), 1)


@router.get("/health")
def algebra_health_check():
    return {"status": "healthy", "service": "algebra"}
