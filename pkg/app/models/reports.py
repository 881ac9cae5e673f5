"""
Report models shared by the verification services, the CLI and the HTTP API.
"""

from typing import Any, Dict, List, Optional, Union
from pydantic import BaseModel, ConfigDict, Field


class RelationCheck(BaseModel):
    """Outcome of one exact identity family."""

    model_config = ConfigDict(populate_by_name=True)

    relation: str = Field(..., description="Identity that was checked")
    degree: int = Field(0, description="Cochain degree (0 when not applicable)")
    trials: int = Field(0, description="Number of inputs checked")
    passed: bool = Field(..., alias="pass", description="Whether every trial passed")
    counterexample: Optional[str] = Field(None, description="First failing input, rendered")


class NumericCheck(BaseModel):
    """Outcome of one floating-point identity."""

    model_config = ConfigDict(populate_by_name=True)

    identity: str = Field(..., description="Identity that was checked")
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    grid: int = Field(..., description="Quadrature nodes per axis")
    drift: float = Field(0.0, description="Change under grid doubling")
    passed: bool = Field(..., alias="pass")


class VerificationReport(BaseModel):
    """Versioned aggregate report."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(1, alias="schema")
    suite: str = Field(..., description="Suite name")
    passed: bool = Field(..., alias="pass")
    checks: List[Union[RelationCheck, NumericCheck]] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_checks(
        cls,
        suite: str,
        checks: List[Union[RelationCheck, NumericCheck]],
        details: Optional[Dict[str, Any]] = None,
    ) -> "VerificationReport":
        return cls(
            suite=suite,
            passed=all(check.passed for check in checks),
            checks=checks,
            details=details or {},
        )

    def first_failure(self) -> Optional[Union[RelationCheck, NumericCheck]]:
        return next((check for check in self.checks if not check.passed), None)

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, exclude_none=True)
