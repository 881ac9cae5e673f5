"""
Codimension-1 Hopf-cyclic cocycles and their verification suite.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from app.models.reports import RelationCheck, VerificationReport
from app.services.algebra_core import X1, Y11, HopfElement, delta_n
from app.services.cyclic_complex import CyclicContext, is_normalized
from app.services.hopf_ops import ModularPair, TensorCochain
from app.utils.exceptions import UnsupportedCodimensionError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

# d_n in codimension 1 is d[1;1,1;1,...,1] with n-1 tail entries
ABBREVIATIONS = {f"d{n}": delta_n(n) for n in range(1, 10)}


def _x() -> HopfElement:
    return HopfElement.generator(X1)


def _y() -> HopfElement:
    return HopfElement.generator(Y11)


def _d(n: int) -> HopfElement:
    return HopfElement.generator(delta_n(n))


@dataclass(frozen=True)
class NamedCocycle:
    name: str
    cochain: TensorCochain


def godbillon_vey() -> TensorCochain:
    return TensorCochain.from_element(_d(1))


def schwarzian() -> TensorCochain:
    return TensorCochain.from_element(_d(2) - Fraction(1, 2) * _d(1) ** 2)


def hochschild_c() -> TensorCochain:
    return TensorCochain.tensor_of(_d(1), _x()) + Fraction(1, 2) * TensorCochain.tensor_of(_d(1) ** 2, _y())


def fundamental() -> TensorCochain:
    x, y, d1 = _x(), _y(), _d(1)
    return (
        TensorCochain.tensor_of(x, y)
        - TensorCochain.tensor_of(y, x)
        - TensorCochain.tensor_of(d1 * y, y)
    )


NAMED_COCYCLES: Dict[str, Callable[[], TensorCochain]] = {
    "godbillon_vey": godbillon_vey,
    "schwarzian": schwarzian,
    "hochschild_c": hochschild_c,
    "fundamental": fundamental,
}


def named_cocycle(name: str) -> NamedCocycle:
    return NamedCocycle(name=name, cochain=NAMED_COCYCLES[name]())


def verify_all(ctx: Optional[CyclicContext] = None) -> VerificationReport:
    """Run every codimension-1 class identity against a cyclic context."""
    ctx = ctx or CyclicContext(1, ModularPair.standard(1))
    if ctx.codim != 1:
        raise UnsupportedCodimensionError(
            "characteristic classes are defined only for codimension 1", {"codim": ctx.codim}
        )
    gv, sch, c, pi = godbillon_vey(), schwarzian(), hochschild_c(), fundamental()
    d1, x, y = _d(1), _x(), _y()
    checks: List[RelationCheck] = []

    def check(name: str, degree: int, condition: Callable[[], bool], sample: TensorCochain) -> None:
        passed = condition()
        checks.append(
            RelationCheck(relation=name, degree=degree, trials=1, passed=passed, counterexample=None if passed else sample.format())
        )

    d1_d1_y = TensorCochain.tensor_of(d1, d1, y)
    check("b(d1) = 0", 1, lambda: ctx.hochschild_b(gv).is_zero(), gv)
    check("t1(d1) = -d1", 1, lambda: ctx.cyclic(gv) == -gv, gv)
    check("d1 cyclic cocycle", 1, lambda: ctx.is_cyclic_cocycle(gv), gv)
    check("b(d1 ox X) = d1 ox d1 ox Y", 2, lambda: ctx.hochschild_b(TensorCochain.tensor_of(d1, x)) == d1_d1_y, c)
    check(
        "b(d1^2 ox Y) = -2 d1 ox d1 ox Y", 2,
        lambda: ctx.hochschild_b(TensorCochain.tensor_of(d1 ** 2, y)) == -2 * d1_d1_y, c,
    )
    check("b(c) = 0", 2, lambda: ctx.hochschild_b(c).is_zero(), c)
    check("B(c) = d2 - 1/2 d1^2", 2, lambda: ctx.connes_B(c) == sch, c)
    check("B(Y) = 1", 1, lambda: ctx.connes_B(TensorCochain.from_element(y)) == TensorCochain.scalar(1), sch)
    check("-t1(d2') = d2'", 1, lambda: -1 * ctx.cyclic(sch) == sch, sch)
    check("d2' cyclic cocycle", 1, lambda: ctx.is_cyclic_cocycle(sch), sch)
    check("b(Pi) = 0", 2, lambda: ctx.hochschild_b(pi).is_zero(), pi)
    check("t2(Pi) = Pi", 2, lambda: ctx.cyclic(pi) == pi, pi)
    check("Pi cyclic cocycle", 2, lambda: ctx.is_cyclic_cocycle(pi), pi)
    for name, builder in NAMED_COCYCLES.items():
        cochain = builder()
        check(f"{name} normalized", cochain.degree, lambda cochain=cochain: is_normalized(cochain), cochain)

    report = VerificationReport.from_checks("classes", checks, {"pair": ctx.pair.name})
    logger.info("Class suite finished", extra={"pair": ctx.pair.name, "pass": report.passed})
    return report
