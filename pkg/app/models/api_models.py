"""
API models for the algebra, cyclic and classes endpoints.
"""

from datetime import datetime
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field


class CharacterChoice(str, Enum):
    """Modular pair: (delta, 1) or the untwisted (epsilon, 1)."""

    MODULAR = "modular"
    COUNIT = "counit"


class ExpressionRequest(BaseModel):
    """An element of H_n in the expression language."""

    expression: str = Field(
        ...,
        min_length=1,
        max_length=4000,
        description="Element expression, e.g. 'X*d1' or 'd[1;1,2]*Y[2,1]'",
    )
    codim: int = Field(1, ge=1, le=4, description="Codimension n")
    character: CharacterChoice = Field(CharacterChoice.MODULAR, description="Modular pair for the twisted antipode")

    model_config = ConfigDict(
        json_schema_extra={"example": {"expression": "X*d1", "codim": 1, "character": "modular"}}
    )


class TensorRequest(BaseModel):
    """A cochain in the expression language, slots joined by 'ox'."""

    expression: str = Field(
        ...,
        min_length=1,
        max_length=4000,
        description="Tensor expression, e.g. 'd1 ox X + 1/2 d1^2 ox Y'",
    )
    codim: int = Field(1, ge=1, le=4, description="Codimension n")
    character: CharacterChoice = Field(CharacterChoice.MODULAR, description="Modular pair of the cyclic module")

    model_config = ConfigDict(
        json_schema_extra={"example": {"expression": "d1 ox X + 1/2 d1^2 ox Y", "codim": 1, "character": "modular"}}
    )


class AlgebraResponse(BaseModel):
    """Canonical rendering of a result."""

    result: str = Field(..., description="Canonical rendering")
    degree: int = Field(..., description="Tensor degree of the result")


class CocycleResponse(BaseModel):
    """Outcome of the cocycle test b c = 0 and (-1)^n tau_n c = c."""

    expression: str = Field(..., description="Canonical rendering of the input")
    degree: int = Field(..., description="Cochain degree")
    is_cocycle: bool = Field(..., description="Whether the input is a cyclic cocycle")


class LambdaRequest(BaseModel):
    """Parameters of the cyclic-relation suite."""

    codim: int = Field(1, ge=1, le=3, description="Codimension n")
    n_max: int = Field(2, ge=1, le=3, description="Highest cochain degree")
    trials: int = Field(10, ge=1, le=100, description="Random cochains per degree")
    seed: int = Field(0, description="Seed")
    character: CharacterChoice = Field(CharacterChoice.MODULAR, description="Modular pair")


class NamedCocycleResponse(BaseModel):
    name: str = Field(..., description="Cocycle name")
    degree: int = Field(..., description="Cochain degree")
    rendering: str = Field(..., description="Canonical rendering")


class ErrorResponse(BaseModel):
    """Standard error response model."""

    error_code: str = Field(..., description="Error code")
    message: str = Field(..., description="Human-readable error message")
    details: Optional[Dict[str, Any]] = Field(None, description="Additional error details")


class HealthResponse(BaseModel):
    """Health check response model."""

    status: str = Field(..., description="Service status")
    service: str = Field(..., description="Service name")
    version: str = Field(..., description="Service version")
    timestamp: datetime = Field(default_factory=datetime.utcnow, description="Health check timestamp")
    environment: str = Field(..., description="Environment name")
