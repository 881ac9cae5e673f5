"""
Expression language for Hopf elements and tensors.

    X ox Y - Y ox X - d1*Y ox Y
    d2 - 1/2 d1^2
    d[1;1,2;2]*X[2] ox (Y[1,2] + 2)

`ox` binds tighter than `+`/`-`; a parenthesized sum may stand in a slot and
is expanded multilinearly. Products are kept as written and only put into PBW
normal form by `to_cochain`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Tuple

import lark
from lark import Token, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from app.services.algebra_core import Delta, GeneratorSymbol, HopfElement, HorizX, VertY, accumulate, check_symbol, normal_form
from app.services.characteristic_classes import ABBREVIATIONS
from app.services.hopf_ops import TensorCochain
from app.utils.exceptions import ExpressionSyntaxError, HopfCyclicError

Word = Tuple[GeneratorSymbol, ...]

grammar = r"""
  start : sum

  sum : lead (ADDOP tensor_term)*
  lead : ADDOP? tensor_term

  tensor_term : slot ("ox" slot)*

  slot : coeff monomial?              -> scaled
       | monomial                     -> plain
       | coeff? "(" sum ")"           -> group

  monomial : factor ("*" factor)*
  factor : gen ("^" NUMBER)?
  coeff : NUMBER ("/" NUMBER)?

  gen : XSYM ("[" NUMBER "]")?                           -> x_gen
      | YSYM ("[" NUMBER "," NUMBER "]")?                -> y_gen
      | "d" "[" NUMBER ";" NUMBER "," NUMBER (";" idxlist)? "]" -> d_gen
      | DSHORT                                           -> d_short

  idxlist : NUMBER ("," NUMBER)*

  ADDOP : "+" | "-"
  XSYM : "X"
  YSYM : "Y"
  DSHORT : /d[0-9]+/
  NUMBER : /[0-9]+/

  %import common.WS
  %ignore WS
"""

_parser = lark.Lark(grammar, start="start", parser="lalr", propagate_positions=True)


@dataclass
class TensorExpr:
    """Parsed expression: words per slot, exact coefficients, not yet normal-ordered."""

    degree: int
    terms: Dict[Tuple[Word, ...], Fraction] = field(default_factory=dict)

    def scaled(self, value: Fraction) -> "TensorExpr":
        return TensorExpr(self.degree, {k: c * value for k, c in self.terms.items() if c * value})

    def tensor(self, other: "TensorExpr") -> "TensorExpr":
        out: Dict[Tuple[Word, ...], Fraction] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                accumulate(out, {k1 + k2: c1 * c2})
        return TensorExpr(self.degree + other.degree, out)

    def to_cochain(self, codim: int = 1) -> TensorCochain:
        result = TensorCochain.zero(self.degree, codim)
        for key, coeff in self.terms.items():
            slots = [normal_form({word: 1}, codim) for word in key]
            result = result + coeff * TensorCochain.tensor_of(*slots)
        return result


class _ExprBuilder(Transformer):
    def __init__(self, codim: int):
        super().__init__()
        self.codim = codim

    def _shorthand(self, token: Token, symbol: GeneratorSymbol) -> GeneratorSymbol:
        if self.codim != 1:
            raise ExpressionSyntaxError(
                f"shorthand '{token}' needs codim 1, use the indexed form", token.line, token.column
            )
        return symbol

    def _checked(self, token: Token, make) -> GeneratorSymbol:
        try:
            return check_symbol(make(), self.codim)
        except HopfCyclicError as exc:
            exc.details.update({"line": token.line, "column": token.column})
            raise

    def x_gen(self, items):
        if len(items) == 1:
            return (self._shorthand(items[0], HorizX(1)),)
        k = items[1]
        return (self._checked(k, lambda: HorizX(int(k))),)

    def y_gen(self, items):
        if len(items) == 1:
            return (self._shorthand(items[0], VertY(1, 1)),)
        i, j = items[1:]
        return (self._checked(i, lambda: VertY(int(i), int(j))),)

    def d_gen(self, items):
        i, j, k = items[:3]
        tail = tuple(items[3]) if len(items) > 3 else ()
        return (self._checked(i, lambda: Delta(int(i), int(j), int(k), tail)),)

    def d_short(self, items):
        (token,) = items
        symbol = ABBREVIATIONS.get(str(token))
        if symbol is None:
            raise ExpressionSyntaxError(f"unknown abbreviation '{token}'", token.line, token.column)
        return (self._shorthand(token, symbol),)

    def idxlist(self, items):
        return [int(item) for item in items]

    def factor(self, items):
        word = items[0]
        return word * int(items[1]) if len(items) > 1 else word

    def monomial(self, items):
        word: Word = ()
        for part in items:
            word += part
        return word

    def coeff(self, items):
        numerator = int(items[0])
        if len(items) == 1:
            return Fraction(numerator)
        if int(items[1]) == 0:
            raise ExpressionSyntaxError("zero denominator", items[1].line, items[1].column)
        return Fraction(numerator, int(items[1]))

    def scaled(self, items):
        value = items[0]
        word = items[1] if len(items) > 1 else ()
        return TensorExpr(1, {(word,): value} if value else {})

    def plain(self, items):
        return TensorExpr(1, {(items[0],): Fraction(1)})

    def group(self, items):
        return items[-1].scaled(items[0]) if len(items) > 1 else items[0]

    def tensor_term(self, items):
        result = items[0]
        for slot in items[1:]:
            result = result.tensor(slot)
        return result

    def lead(self, items):
        term = items[-1]
        return term.scaled(Fraction(-1)) if len(items) > 1 and items[0] == "-" else term

    def sum(self, items):
        result = items[0]
        for op, term in zip(items[1::2], items[2::2]):
            if term.degree != result.degree:
                raise ExpressionSyntaxError(
                    f"cannot add tensors of degree {result.degree} and {term.degree}", op.line, op.column
                )
            accumulate(result.terms, term.terms, -1 if op == "-" else 1)
        return result

    def start(self, items):
        return items[0]


def parse(src: str, codim: int = 1) -> TensorExpr:
    """Parse `src`; errors carry the line and column of the offending token."""
    try:
        tree = _parser.parse(src)
    except (UnexpectedEOF, UnexpectedToken) as exc:
        if isinstance(exc, UnexpectedToken) and exc.token.type != "$END":
            raise ExpressionSyntaxError(f"unexpected input {str(exc.token)!r}", exc.line, exc.column) from exc
        lines = src.splitlines() or [""]
        raise ExpressionSyntaxError("unexpected end of input", len(lines), len(lines[-1]) + 1) from exc
    except UnexpectedInput as exc:
        raise ExpressionSyntaxError(
            f"unexpected input {src[exc.pos_in_stream:exc.pos_in_stream + 1]!r}"
            if getattr(exc, "pos_in_stream", None) is not None else "unexpected input",
            exc.line,
            exc.column,
        ) from exc
    try:
        return _ExprBuilder(codim).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, HopfCyclicError):
            raise exc.orig_exc from None
        raise


def parse_tensor(src: str, codim: int = 1) -> TensorCochain:
    return parse(src, codim).to_cochain(codim)


def parse_element(src: str, codim: int = 1) -> HopfElement:
    expr = parse(src, codim)
    if expr.degree != 1:
        raise ExpressionSyntaxError(f"expected an element, got a tensor of degree {expr.degree}")
    return expr.to_cochain(codim).as_element()
