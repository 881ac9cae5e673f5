"""
Domain exceptions. Every error carries a stable `error_code` and a details
dict so the HTTP layer and the CLI can report it without string parsing.
"""

from typing import Any, Dict, Optional


class HopfCyclicError(Exception):
    """Base class for all engine errors."""

    error_code = "HOPFCYCLIC_ERROR"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class IndexOutOfRangeError(HopfCyclicError):
    error_code = "INDEX_OUT_OF_RANGE"


class CodimensionMismatchError(HopfCyclicError):
    error_code = "CODIMENSION_MISMATCH"


class UnsupportedCodimensionError(HopfCyclicError):
    error_code = "UNSUPPORTED_CODIMENSION"


class DegreeError(HopfCyclicError):
    error_code = "INVALID_DEGREE"


class NotInvertibleError(HopfCyclicError):
    error_code = "NOT_INVERTIBLE"


class SingularJetError(HopfCyclicError):
    error_code = "SINGULAR_JET"


class SupportError(HopfCyclicError):
    error_code = "SUPPORT_OUTSIDE_BOX"


class QuadratureConvergenceError(HopfCyclicError):
    error_code = "QUADRATURE_NOT_CONVERGED"


class TruncationOverflowError(HopfCyclicError):
    error_code = "TRUNCATION_OVERFLOW"


class InvalidLiePairError(HopfCyclicError):
    error_code = "INVALID_LIE_PAIR"


class InconsistentScalarError(HopfCyclicError):
    error_code = "INCONSISTENT_SCALAR"


class ExpressionSyntaxError(HopfCyclicError):
    """Parse failure with a 1-based source position."""

    error_code = "SYNTAX_ERROR"

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(
            f"{message} (line {line}, column {column})",
            {"line": line, "column": column},
        )
        self.line = line
        self.column = column
