"""
Exterior forms with sympy coefficients, and the Godbillon-Vey form pulled back
along the geodesic 2-jet map of the interpolated connection.
"""

import random
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy
from numpy.polynomial.legendre import leggauss
from sympy.combinatorics import Permutation

from app.models.reports import NumericCheck, VerificationReport
from app.services.characteristic_classes import godbillon_vey
from app.services.numeric_trace import (
    F1_BOX,
    F2_BOX,
    X_SYM,
    Y_SYM,
    NumericCrossed,
    NumericFunction,
    PolynomialDiffeo,
    TraceValue,
    chi_tau_value,
    composite_rule,
    evaluate_expr,
    get_diffeo,
    invert_diffeo,
    make_test_function,
    numeric_check,
)
from app.utils.config import get_settings
from app.utils.exceptions import DegreeError, SupportError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

T_SYM = sympy.Symbol("t", real=True)
Y1_SYM = sympy.Symbol("y1", real=True)

Key = Tuple[int, ...]


def _sorted_with_sign(indices: Sequence[int]) -> Tuple[int, Key]:
    if len(set(indices)) != len(indices):
        return 0, ()
    order = sorted(range(len(indices)), key=lambda position: indices[position])
    sign = Permutation(order).signature() if len(order) > 1 else 1
    return sign, tuple(indices[position] for position in order)


class DifferentialForm:
    """Homogeneous form sum c_I dx^I over a named coordinate list."""

    __slots__ = ("coords", "degree", "components")

    def __init__(self, coords: Sequence[sympy.Symbol], degree: int, components: Optional[Mapping[Key, sympy.Expr]] = None):
        self.coords: Tuple[sympy.Symbol, ...] = tuple(coords)
        self.degree = degree
        self.components: Dict[Key, sympy.Expr] = {}
        for key, coeff in (components or {}).items():
            if len(key) != degree:
                raise DegreeError(f"component {key} in a {degree}-form")
            sign, ordered = _sorted_with_sign(key)
            if sign:
                self._add(ordered, sign * sympy.sympify(coeff))

    def _add(self, key: Key, coeff: sympy.Expr) -> None:
        total = sympy.expand(self.components.get(key, 0) + coeff)
        if total == 0:
            self.components.pop(key, None)
        else:
            self.components[key] = total

    @classmethod
    def function(cls, coords: Sequence[sympy.Symbol], expr) -> "DifferentialForm":
        return cls(coords, 0, {(): expr})

    @classmethod
    def differential(cls, coords: Sequence[sympy.Symbol], symbol: sympy.Symbol) -> "DifferentialForm":
        return cls(coords, 1, {(list(coords).index(symbol),): 1})

    def _check(self, other: "DifferentialForm") -> None:
        if self.coords != other.coords:
            raise DegreeError("forms live on different coordinate lists")

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check(other)
        if other.degree != self.degree:
            raise DegreeError(f"cannot add a {self.degree}-form and a {other.degree}-form")
        out = DifferentialForm(self.coords, self.degree, self.components)
        for key, coeff in other.components.items():
            out._add(key, coeff)
        return out

    def __neg__(self) -> "DifferentialForm":
        return self * -1

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def __mul__(self, scalar) -> "DifferentialForm":
        return DifferentialForm(self.coords, self.degree, {k: c * scalar for k, c in self.components.items()})

    __rmul__ = __mul__

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check(other)
        out = DifferentialForm(self.coords, self.degree + other.degree)
        for k1, c1 in self.components.items():
            for k2, c2 in other.components.items():
                sign, key = _sorted_with_sign(k1 + k2)
                if sign:
                    out._add(key, sign * c1 * c2)
        return out

    __xor__ = wedge

    def d(self) -> "DifferentialForm":
        out = DifferentialForm(self.coords, self.degree + 1)
        for key, coeff in self.components.items():
            for index, symbol in enumerate(self.coords):
                derivative = sympy.diff(coeff, symbol)
                if derivative == 0:
                    continue
                sign, ordered = _sorted_with_sign((index,) + key)
                if sign:
                    out._add(ordered, sign * derivative)
        return out

    def pullback(self, new_coords: Sequence[sympy.Symbol], mapping: Mapping[sympy.Symbol, sympy.Expr]) -> "DifferentialForm":
        """Pull back along coords -> expressions in `new_coords`; unmapped coordinates map to themselves."""
        images = [sympy.sympify(mapping.get(symbol, symbol)) for symbol in self.coords]
        differentials = [
            DifferentialForm(new_coords, 1, {(j,): sympy.diff(image, u) for j, u in enumerate(new_coords)})
            for image in images
        ]
        substitution = dict(zip(self.coords, images))
        out = DifferentialForm(new_coords, self.degree)
        for key, coeff in self.components.items():
            term = DifferentialForm.function(new_coords, coeff.subs(substitution, simultaneous=True))
            for index in key:
                term = term.wedge(differentials[index])
            out = out + term
        return out

    def coefficient(self, *symbols: sympy.Symbol) -> sympy.Expr:
        sign, key = _sorted_with_sign([self.coords.index(s) for s in symbols])
        return sign * self.components.get(key, sympy.Integer(0))

    def evaluate(self, point: Mapping[sympy.Symbol, float]) -> Dict[Key, float]:
        return {key: float(coeff.subs(point)) for key, coeff in self.components.items()}

    def is_zero(self) -> bool:
        return not self.components

    def __repr__(self) -> str:
        if not self.components:
            return "0"
        parts = []
        for key, coeff in sorted(self.components.items()):
            basis = "^".join(f"d{self.coords[i]}" for i in key)
            parts.append(f"({coeff})" + (f" {basis}" if basis else ""))
        return " + ".join(parts)


JET_COORDS = (X_SYM, Y_SYM, Y1_SYM)
SIMPLEX_COORDS = (T_SYM, X_SYM, Y_SYM)


def gv_form() -> DifferentialForm:
    """y^-3 dx ^ dy ^ dy1 on 2-jets of curves s -> x + s y + s^2 y1."""
    return DifferentialForm(JET_COORDS, 3, {(0, 1, 2): Y_SYM ** -3})


def _polynomial(phi) -> PolynomialDiffeo:
    if not isinstance(phi, PolynomialDiffeo):
        raise SupportError("the symbolic pullback needs a polynomial diffeo", {"diffeo": phi.name})
    return phi


def geodesic_jet_map(phi: PolynomialDiffeo) -> Dict[sympy.Symbol, sympy.Expr]:
    """
    2-jet of the geodesic of (1 - t) nabla_0 + t nabla_0^phi:
    x + y s - t (log phi')'(x) y^2 s^2.
    """
    expr = _polynomial(phi).sympy_expr(X_SYM)
    christoffel = T_SYM * sympy.diff(sympy.log(sympy.diff(expr, X_SYM)), X_SYM)
    return {X_SYM: X_SYM, Y_SYM: Y_SYM, Y1_SYM: -christoffel * Y_SYM ** 2}


def gv_pullback(phi: PolynomialDiffeo) -> DifferentialForm:
    return gv_form().pullback(SIMPLEX_COORDS, geodesic_jet_map(phi))


DEFAULT_SAMPLES = ((0.5, 0.3, 1.2), (0.25, -0.4, 0.8), (0.9, 0.1, 2.0))


def gv_pullback_check(phi, samples: Iterable[Tuple[float, float, float]] = DEFAULT_SAMPLES, tol: float = 1e-10) -> bool:
    """Symbolic pullback against -(1/y) (log phi')'(x) dt^dx^dy at each sample."""
    return all(check.passed for check in gv_pullback_checks(phi, samples, tol))


def gv_pullback_checks(phi, samples: Iterable[Tuple[float, float, float]] = DEFAULT_SAMPLES, tol: float = 1e-10) -> List[NumericCheck]:
    pulled = gv_pullback(_polynomial(phi))
    coefficient = sympy.lambdify((T_SYM, X_SYM, Y_SYM), pulled.coefficient(T_SYM, X_SYM, Y_SYM), "numpy")
    checks = []
    for t, x, y in samples:
        lhs = float(coefficient(t, x, y))
        rhs = float(-phi.log_derivative(np.array(x), 1) / y)
        abs_err = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs))
        checks.append(
            NumericCheck(
                identity=f"pullback of gv at (t, x, y) = ({t}, {x}, {y})",
                lhs=lhs, rhs=rhs, abs_err=abs_err, rel_err=abs_err / scale if scale else 0.0,
                grid=0, passed=abs_err <= tol * max(1.0, scale),
            )
        )
    return checks


def gv_pairing(phi, f0: NumericFunction, f1: NumericFunction, t_nodes: int = 8) -> TraceValue:
    """int_0^1 dt int f0 (f1 o phi~) against the pulled-back gv form, over the support of f0."""
    phi = _polynomial(phi)
    settings = get_settings()
    coefficient = sympy.lambdify(
        (T_SYM, X_SYM, Y_SYM), gv_pullback(phi).coefficient(T_SYM, X_SYM, Y_SYM), "numpy"
    )
    reference, weights = leggauss(t_nodes)
    t_points, t_weights = (reference + 1.0) / 2.0, weights / 2.0
    expr0, expr1 = f0.simple_expr(), f1.simple_expr()
    box = f0.terms[0][1][0].support

    def integrate(nodes: int) -> float:
        px, wx = composite_rule(box.x_lo, box.x_hi, nodes, settings.quad_panels)
        py, wy = composite_rule(box.y_lo, box.y_hi, nodes, settings.quad_panels)
        xx, yy = np.meshgrid(px, py, indexing="ij")
        jacobian = phi.derivatives(xx)[0]
        density = evaluate_expr(expr0, xx, yy) * evaluate_expr(expr1, phi.value(xx), jacobian * yy)
        total = 0.0
        for t, weight in zip(t_points, t_weights):
            values = density * np.broadcast_to(coefficient(t, xx, yy), xx.shape)
            total += weight * float(np.einsum("i,ij,j->", wx, values, wy))
        return total

    coarse, fine = integrate(settings.quad_nodes), integrate(2 * settings.quad_nodes)
    return TraceValue(value=fine, drift=abs(fine - coarse), grid=settings.quad_nodes * settings.quad_panels)


def verify_gv(diffeo: str = "cubic", seed: int = 0, tol: Optional[float] = None) -> VerificationReport:
    """Pointwise pullback identity and the pairing against chi_tau(d1)."""
    tol = get_settings().quad_tolerance if tol is None else tol
    phi = _polynomial(get_diffeo(diffeo))
    checks: List[NumericCheck] = gv_pullback_checks(phi)
    rng = random.Random(f"{seed}:gv")
    f0, f1 = make_test_function(rng, F1_BOX), make_test_function(rng, F2_BOX)
    pairing = gv_pairing(phi, f0, f1)
    chi = chi_tau_value(godbillon_vey(), [NumericCrossed.term(f0, phi), NumericCrossed.term(f1, invert_diffeo(phi))])
    checks.append(numeric_check("gv pairing = chi(d1)(a0, a1)", pairing, chi, tol))
    report = VerificationReport.from_checks("gv-pullback", checks, {"diffeo": phi.name, "seed": seed})
    logger.info("Godbillon-Vey check finished", extra={"diffeo": phi.name, "pass": report.passed})
    return report
