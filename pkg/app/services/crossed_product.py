"""
The crossed product of frame functions by formal diffeomorphisms and the
action of the transverse Hopf algebra on it.

Terms are f U*_phi with the multiplication rule

    f1 U*_phi1 . f2 U*_phi2 = f1 (f2 o phi1~) U*_(phi2 phi1)

X and Y act on f as horizontal and vertical derivations, a delta generator
multiplies f by the matching gamma(phi).
"""

import random
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Tuple

import sympy

from app.models.reports import RelationCheck, VerificationReport
from app.services.algebra_core import (
    GeneratorSymbol,
    HopfElement,
    HorizX,
    PBWMonomial,
    VertY,
    X1,
    Y11,
    delta_n,
    generators,
    random_element,
)
from app.services.hopf_ops import coproduct
from app.services.jets import (
    FormalDiffeo,
    FrameFunction,
    JetContext,
    compose,
    gamma_of,
    random_diffeo,
    random_frame_function,
)
from app.utils.exceptions import CodimensionMismatchError, DegreeError, UnsupportedCodimensionError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)


class CrossedElement:
    """Finite sum of f U*_phi, merged by phi, zero terms dropped."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: JetContext, terms: Iterable[Tuple[FrameFunction, FormalDiffeo]] = ()):
        self.ctx = ctx
        merged: Dict[FormalDiffeo, FrameFunction] = {}
        for f, phi in terms:
            if f.ctx is not ctx or phi.ctx is not ctx:
                raise CodimensionMismatchError("crossed term from a different jet context")
            merged[phi] = merged[phi] + f if phi in merged else f
        self.terms: Dict[FormalDiffeo, FrameFunction] = {phi: f for phi, f in merged.items() if not f.is_zero()}

    @classmethod
    def term(cls, f: FrameFunction, phi: Optional[FormalDiffeo] = None) -> "CrossedElement":
        return cls(f.ctx, [(f, phi or f.ctx.identity())])

    @classmethod
    def one(cls, ctx: JetContext) -> "CrossedElement":
        return cls(ctx, [(FrameFunction.constant(ctx, 1), ctx.identity())])

    def items(self) -> Iterable[Tuple[FrameFunction, FormalDiffeo]]:
        return ((f, phi) for phi, f in self.terms.items())

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        return CrossedElement(self.ctx, list(self.items()) + list(other.items()))

    def __neg__(self) -> "CrossedElement":
        return CrossedElement(self.ctx, [(-f, phi) for f, phi in self.items()])

    def __sub__(self, other: "CrossedElement") -> "CrossedElement":
        return self + (-other)

    def scale(self, value) -> "CrossedElement":
        return CrossedElement(self.ctx, [(f * value, phi) for f, phi in self.items()])

    def __mul__(self, other: "CrossedElement") -> "CrossedElement":
        return multiply_crossed(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrossedElement):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def format(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({f.format()}) U*[{phi.format()}]" for f, phi in self.items())

    def __repr__(self) -> str:
        return f"CrossedElement({self.format()})"


def multiply_crossed(a: CrossedElement, b: CrossedElement) -> CrossedElement:
    if a.ctx is not b.ctx:
        raise CodimensionMismatchError("crossed operands come from different jet contexts")
    out = []
    for f1, phi1 in a.items():
        for f2, phi2 in b.items():
            out.append((f1 * f2.pullback(phi1), compose(phi2, phi1)))
    return CrossedElement(a.ctx, out)


def act_symbol(symbol: GeneratorSymbol, f: FrameFunction, phi: FormalDiffeo) -> FrameFunction:
    if isinstance(symbol, HorizX):
        return f.horizontal(symbol.k)
    if isinstance(symbol, VertY):
        return f.vertical(symbol.i, symbol.j)
    return gamma_of(phi, symbol) * f


def act_monomial(monomial: PBWMonomial, f: FrameFunction, phi: FormalDiffeo) -> FrameFunction:
    """A PBW monomial acts right to left."""
    for symbol in reversed(monomial):
        if f.is_zero():
            break
        f = act_symbol(symbol, f, phi)
    return f


def act(h: HopfElement, a: CrossedElement) -> CrossedElement:
    if h.codim != a.ctx.codim:
        raise CodimensionMismatchError(
            f"element of codimension {h.codim} acting in codimension {a.ctx.codim}",
        )
    out = []
    for monomial, coeff in h.terms.items():
        for f, phi in a.items():
            out.append((act_monomial(monomial, f, phi) * coeff, phi))
    return CrossedElement(a.ctx, out)


def verify_hopf_action(h: HopfElement, a: CrossedElement, b: CrossedElement) -> bool:
    """h(ab) = sum h(1)(a) h(2)(b), exactly in the truncated ring."""
    lhs = act(h, a * b)
    rhs = CrossedElement(a.ctx)
    for (left, right), coeff in coproduct(h).terms.items():
        left_part = act(HopfElement({left: 1}, h.codim), a)
        right_part = act(HopfElement({right: 1}, h.codim), b)
        rhs = rhs + (left_part * right_part).scale(coeff)
    if lhs != rhs:
        logger.debug("Hopf action failed", extra={"h": h.format(), "difference": (lhs - rhs).format()})
        return False
    return True


def random_crossed(ctx: JetContext, rng: random.Random, terms: int = 2) -> CrossedElement:
    out = []
    for _ in range(terms):
        phi = ctx.identity() if rng.random() < 0.25 else random_diffeo(ctx, rng)
        out.append((random_frame_function(ctx, rng), phi))
    return CrossedElement(ctx, out)


def verify_action_suite(
    codim: int = 1,
    random_elements: int = 20,
    seed: int = 0,
    eps_order: Optional[int] = None,
    tail_cap: int = 1,
) -> VerificationReport:
    """Module-algebra law for every generator and for random degree-2 elements."""
    if eps_order is None:
        eps_order = 4 if codim == 1 else 2
    ctx = JetContext(codim, eps_order=eps_order)
    checks: List[RelationCheck] = []
    generator_cases = [
        (repr(symbol), HopfElement.generator(symbol, codim)) for symbol in generators(codim, tail_cap)
    ]
    random_cases = [
        (f"random[{index}]", random_element(random.Random(f"{seed}:element:{index}"), codim, 2, terms=2, tail_cap=tail_cap))
        for index in range(random_elements)
    ]

    def check(name: str, elements: List[Tuple[str, HopfElement]]) -> None:
        failure = None
        for index, (label, h) in enumerate(elements):
            rng = random.Random(f"{seed}:{name}:{index}")
            a, b = random_crossed(ctx, rng), random_crossed(ctx, rng)
            if not verify_hopf_action(h, a, b):
                failure = f"{label}: {h.format()}"
                break
        checks.append(
            RelationCheck(relation=name, degree=0, trials=len(elements), passed=failure is None, counterexample=failure)
        )

    check("h(ab) = h(1)(a) h(2)(b) on generators", generator_cases)
    check("h(ab) = h(1)(a) h(2)(b) on random elements", random_cases)

    rng = random.Random(f"{seed}:associativity")
    a, b, c = (random_crossed(ctx, rng) for _ in range(3))
    associative = (a * b) * c == a * (b * c)
    checks.append(RelationCheck(relation="(ab)c = a(bc)", trials=1, passed=associative))

    report = VerificationReport.from_checks("action", checks, {"codim": codim, "eps_order": eps_order})
    logger.info("Action suite finished", extra={"codim": codim, "pass": report.passed})
    return report


def _codim_one(ctx: JetContext) -> None:
    if ctx.codim != 1:
        raise UnsupportedCodimensionError("closed forms are available only in codimension 1", {"codim": ctx.codim})


def schwarzian_series(phi: FormalDiffeo) -> FrameFunction:
    """{phi; x} = phi'''/phi' - 3/2 (phi''/phi')^2 as a truncated series."""
    ctx = phi.ctx
    _codim_one(ctx)
    x = ctx.x[0]
    first = phi.components[0].diff(x)
    inverse = ctx.inverse(first)
    ratio2 = ctx.mul(first.diff(x), inverse)
    ratio3 = ctx.mul(first.diff(x).diff(x), inverse)
    return FrameFunction(ctx, ratio3 - ctx.mul(ctx.mul(ratio2, ratio2), ctx.const(Fraction(3, 2))))


def verify_schwarzian_action(phi: FormalDiffeo, f: Optional[FrameFunction] = None) -> bool:
    """(d2 - 1/2 d1^2)(f U*_phi) = y^2 {phi; x} f U*_phi."""
    ctx = phi.ctx
    _codim_one(ctx)
    f = f or FrameFunction.constant(ctx, 1)
    h = HopfElement.generator(delta_n(2)) - HopfElement.generator(delta_n(1)) ** 2 * Fraction(1, 2)
    y = ctx.y[0][0]
    expected = FrameFunction(ctx, ctx.mul(y * y, schwarzian_series(phi).num)) * f
    return act(h, CrossedElement.term(f, phi)) == CrossedElement.term(expected, phi)


def rank_columns(degree_cap: int) -> List[PBWMonomial]:
    """delta_K Z_I of degree <= cap over {d1..d_cap, X, Y}, in PBW order."""
    symbols = [delta_n(order) for order in range(1, degree_cap + 1)] + [X1, Y11]
    columns = [PBWMonomial(())]
    for degree in range(1, degree_cap + 1):
        columns.extend(PBWMonomial(combo) for combo in combinations_with_replacement(symbols, degree))
    return columns


def rank_sanity(degree_cap: int, sample_count: int, seed: int = 0, eps_order: Optional[int] = None) -> bool:
    """
    Full column rank of PBW operators evaluated on random crossed terms at random
    points; each eps coefficient of each sample contributes one row over Q.
    """
    if not 0 <= degree_cap <= 3:
        raise DegreeError(f"rank check supports degree caps 0..3, got {degree_cap}")
    ctx = JetContext(1, eps_order=eps_order)
    x, y, eps = ctx.x[0], ctx.y[0][0], ctx.eps
    columns = rank_columns(degree_cap)
    rows: List[List[sympy.Rational]] = []
    for sample in range(sample_count):
        rng = random.Random(f"{seed}:rank:{sample}")
        monomials = [ctx.ring.one, x, y, x * x, x * y, y * y]
        num = ctx.const(rng.randint(1, 3))
        for monomial in monomials[1:]:
            num += monomial * rng.randint(-3, 3)
        f = FrameFunction(ctx, num)
        c2, c3 = rng.choice([-2, -1, 1, 2]), rng.choice([-2, -1, 1, 2])
        phi = FormalDiffeo(ctx, [x + eps * (x * x * c2 + x ** 3 * c3)])
        while True:
            point = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            frame = Fraction(rng.choice([-1, 1]) * rng.randint(1, 5), rng.randint(1, 4))
            if f.evaluate([point], [[frame]]).coefficients[0]:
                break
        values = [act_monomial(column, f, phi).evaluate([point], [[frame]]) for column in columns]
        for k in range(ctx.prec):
            rows.append([sympy.Rational(v.coefficients[k].numerator, v.coefficients[k].denominator) for v in values])
    rank = sympy.Matrix(rows).rank() if rows else 0
    logger.info(
        "Rank check finished",
        extra={"degree_cap": degree_cap, "samples": sample_count, "columns": len(columns), "rank": rank},
    )
    return rank == len(columns)
