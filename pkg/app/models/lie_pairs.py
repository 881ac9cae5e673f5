"""
Schema of the Lie pair input file.

    {"dim": 2, "names": ["X", "Y"],
     "brackets": [[1, 0, [{"k": 0, "coeff": 1}]]],
     "subalgebra": [1],
     "module": {"dim": 1, "action": [[[0]], [[1]]]}}

Indices are 0-based. Coefficients are integers or "p/q" strings.
"""

from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, Field

Rational = Union[int, str]


class BracketTerm(BaseModel):
    """One term coeff * e_k of a bracket."""

    k: int = Field(..., ge=0, description="Index of the basis element")
    coeff: Rational = Field(1, description="Integer or 'p/q' coefficient")


class ModuleDocument(BaseModel):
    """Right module: one dim x dim matrix per basis element, m . e = rho(e) m."""

    dim: int = Field(..., ge=1, description="Module dimension")
    action: List[List[List[Rational]]] = Field(..., description="Action matrices, one per basis element")


class LiePairDocument(BaseModel):
    """A Lie algebra by structure constants, a subalgebra and an optional module."""

    dim: int = Field(..., ge=1, description="Dimension of g")
    names: Optional[List[str]] = Field(None, description="Basis names, e_0.. by default")
    brackets: List[Tuple[int, int, List[BracketTerm]]] = Field(
        default_factory=list, description="Nonzero brackets [e_i, e_j]"
    )
    subalgebra: List[int] = Field(default_factory=list, description="Basis indices spanning h")
    module: Optional[ModuleDocument] = Field(None, description="Coefficients; trivial 1-dimensional if absent")
