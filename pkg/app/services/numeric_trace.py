"""
Floating-point model of the codimension-1 crossed product: globally invertible
maps of the line, compactly supported test functions on the frame bundle,
the invariant trace and the characteristic map.

A numeric function is a sum of products of pieces. A piece is a sympy
expression in (x, y) times gamma factors y^n (log phi')^(n)(x), pulled back
along a chain of maps; pieces are evaluated pointwise with numpy and the
trace integrates f dx dy / y^2 with a composite Gauss-Legendre rule.
"""

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss

from app.models.reports import NumericCheck, VerificationReport
from app.services.algebra_core import X1, Y11, HopfElement, HorizX, VertY, delta_n
from app.services.characteristic_classes import fundamental, godbillon_vey
from app.services.hopf_ops import ModularPair, TensorCochain, twisted_antipode
from app.utils.config import get_settings
from app.utils.exceptions import (
    DegreeError,
    QuadratureConvergenceError,
    SingularJetError,
    SupportError,
    UnsupportedCodimensionError,
)
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

X_SYM, Y_SYM = sympy.symbols("x y", real=True)


class bump(sympy.Function):
    """exp(-1/(1 - t^2)) for |t| < 1 and 0 elsewhere."""

    def fdiff(self, argindex=1):
        t = self.args[0]
        return bump(t) * (-2 * t / (1 - t ** 2) ** 2)


def _np_bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


@lru_cache(maxsize=512)
def _compiled(expr: sympy.Expr) -> Callable:
    return sympy.lambdify((X_SYM, Y_SYM), expr, modules=[{"bump": _np_bump}, "numpy"])


def evaluate_expr(expr: sympy.Expr, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(_compiled(expr)(x, y), dtype=float), np.shape(x)).copy()
    # 0 * inf at the edge of a bump support is the limit 0
    return np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)


# Global diffeomorphisms of the line


class GlobalDiffeo(ABC):
    """Increasing diffeomorphism of R with numeric derivatives up to order 3."""

    name: str

    @property
    @abstractmethod
    def key(self) -> Tuple:
        ...

    @abstractmethod
    def value(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def derivatives(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        ...

    @abstractmethod
    def inverse_value(self, u: np.ndarray) -> np.ndarray:
        ...

    @property
    def is_identity(self) -> bool:
        return self.key == IDENTITY.key

    def log_derivative(self, x: np.ndarray, order: int) -> np.ndarray:
        """(log phi')^(order) for order 1 or 2."""
        d1, d2, d3 = self.derivatives(x)
        first = d2 / d1
        if order == 1:
            return first
        if order == 2:
            return d3 / d1 - first ** 2
        raise DegreeError(f"log-derivative of order {order} is not available", {"diffeo": self.name})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GlobalDiffeo) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class PolynomialDiffeo(GlobalDiffeo):
    """Polynomial with everywhere positive derivative; coefficients low to high."""

    def __init__(self, name: str, coefficients: Sequence[float]):
        self.name = name
        self.polynomial = Polynomial([float(c) for c in coefficients]).trim()
        if self.polynomial.degree() % 2 == 0 or self.polynomial.coef[-1] <= 0:
            raise SingularJetError(f"{name} must have odd degree and positive leading coefficient")
        first = self.polynomial.deriv()
        if first.degree() > 0 and any(abs(r.imag) < 1e-12 for r in first.roots()):
            raise SingularJetError(f"{name} has a critical point on the real line")
        self._derivs = (first, first.deriv(), first.deriv().deriv())

    @property
    def key(self) -> Tuple:
        return ("poly", tuple(float(c) for c in self.polynomial.coef))

    def value(self, x):
        return self.polynomial(x)

    def derivatives(self, x):
        return tuple(np.broadcast_to(d(x), np.shape(x)).astype(float) for d in self._derivs)

    def inverse_value(self, u):
        return _safeguarded_newton(self, u)

    def sympy_expr(self, x: sympy.Symbol = X_SYM) -> sympy.Expr:
        return sum(sympy.nsimplify(c) * x ** k for k, c in enumerate(self.polynomial.coef))


class InverseDiffeo(GlobalDiffeo):
    """phi^-1, with derivatives from phi at phi^-1(u)."""

    def __init__(self, base: GlobalDiffeo):
        self.base = base
        self.name = f"{base.name}^-1"

    @property
    def key(self) -> Tuple:
        return ("inverse", self.base.key)

    def value(self, u):
        return self.base.inverse_value(u)

    def derivatives(self, u):
        g = self.base.inverse_value(u)
        f1, f2, f3 = self.base.derivatives(g)
        g1 = 1.0 / f1
        g2 = -f2 * g1 ** 3
        g3 = -f3 * g1 ** 4 + 3.0 * f2 ** 2 * g1 ** 5
        return g1, g2, g3

    def inverse_value(self, x):
        return self.base.value(x)


class ComposedDiffeo(GlobalDiffeo):
    """outer o inner."""

    def __init__(self, outer: GlobalDiffeo, inner: GlobalDiffeo):
        self.outer, self.inner = outer, inner
        self.name = f"{outer.name}.{inner.name}"

    @property
    def key(self) -> Tuple:
        return ("compose", self.outer.key, self.inner.key)

    def value(self, x):
        return self.outer.value(self.inner.value(x))

    def derivatives(self, x):
        g = self.inner.value(x)
        g1, g2, g3 = self.inner.derivatives(x)
        f1, f2, f3 = self.outer.derivatives(g)
        return (
            f1 * g1,
            f2 * g1 ** 2 + f1 * g2,
            f3 * g1 ** 3 + 3.0 * f2 * g1 * g2 + f1 * g3,
        )

    def inverse_value(self, u):
        return self.inner.inverse_value(self.outer.inverse_value(u))


def _safeguarded_newton(phi: PolynomialDiffeo, u) -> np.ndarray:
    """Newton iteration kept inside a shrinking bracket, bisecting when a step leaves it."""
    tolerance = get_settings().newton_tolerance
    u = np.asarray(u, dtype=float)
    lo = np.full(u.shape, -1.0)
    hi = np.full(u.shape, 1.0)
    for _ in range(200):
        low_bad = phi.value(lo) > u
        high_bad = phi.value(hi) < u
        if not (low_bad.any() or high_bad.any()):
            break
        lo = np.where(low_bad, 2.0 * lo, lo)
        hi = np.where(high_bad, 2.0 * hi, hi)
    x = 0.5 * (lo + hi)
    for _ in range(200):
        residual = phi.value(x) - u
        lo = np.where(residual < 0, x, lo)
        hi = np.where(residual > 0, x, hi)
        step = x - residual / phi.derivatives(x)[0]
        outside = (step <= lo) | (step >= hi)
        updated = np.where(outside, 0.5 * (lo + hi), step)
        converged = np.all(np.abs(updated - x) <= tolerance * (1.0 + np.abs(x)))
        x = updated
        if converged:
            return x
    logger.warning("Newton inverse stopped at the iteration limit", extra={"diffeo": phi.name})
    return x


def compose_diffeos(phi: GlobalDiffeo, psi: GlobalDiffeo) -> GlobalDiffeo:
    """phi o psi, cancelling identities and inverse pairs."""
    if phi.is_identity:
        return psi
    if psi.is_identity:
        return phi
    if isinstance(phi, InverseDiffeo) and phi.base == psi:
        return IDENTITY
    if isinstance(psi, InverseDiffeo) and psi.base == phi:
        return IDENTITY
    return ComposedDiffeo(phi, psi)


def invert_diffeo(phi: GlobalDiffeo) -> GlobalDiffeo:
    if phi.is_identity:
        return phi
    if isinstance(phi, InverseDiffeo):
        return phi.base
    return InverseDiffeo(phi)


IDENTITY = PolynomialDiffeo("identity", [0.0, 1.0])

DIFFEO_LIBRARY: Dict[str, GlobalDiffeo] = {
    "identity": IDENTITY,
    "affine": PolynomialDiffeo("affine", [0.2, 1.5]),
    "cubic": PolynomialDiffeo("cubic", [0.0, 1.0, 0.0, 1.0]),
    "quintic": PolynomialDiffeo("quintic", [0.0, 1.0, 0.0, 1.0 / 3.0, 0.0, 0.2]),
}


def get_diffeo(name: str) -> GlobalDiffeo:
    """Library map by name; `name^-1` selects the numeric inverse."""
    if name.endswith("^-1"):
        return invert_diffeo(get_diffeo(name[:-3]))
    try:
        return DIFFEO_LIBRARY[name]
    except KeyError:
        raise SupportError(f"unknown diffeo '{name}'", {"known": sorted(DIFFEO_LIBRARY)}) from None


def odd_polynomial(name: str, coefficients: Sequence[float]) -> PolynomialDiffeo:
    return PolynomialDiffeo(name, coefficients)


# Support boxes


@dataclass(frozen=True)
class Box:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    @classmethod
    def trace_box(cls) -> "Box":
        settings = get_settings()
        return cls(-settings.trace_box_x, settings.trace_box_x, settings.trace_box_y_min, settings.trace_box_y_max)

    def intersect(self, other: "Box") -> Optional["Box"]:
        box = Box(max(self.x_lo, other.x_lo), min(self.x_hi, other.x_hi), max(self.y_lo, other.y_lo), min(self.y_hi, other.y_hi))
        return box if box.x_lo < box.x_hi and box.y_lo < box.y_hi else None

    def contains(self, other: "Box") -> bool:
        return (
            self.x_lo <= other.x_lo and other.x_hi <= self.x_hi
            and self.y_lo <= other.y_lo and other.y_hi <= self.y_hi
        )

    def preimage(self, phi: GlobalDiffeo, samples: int = 2049, margin: float = 0.02) -> "Box":
        """Bounding box of phi~^-1(self), widened in y by `margin`."""
        x_lo, x_hi = (float(v) for v in phi.inverse_value(np.array([self.x_lo, self.x_hi])))
        jacobian = phi.derivatives(np.linspace(x_lo, x_hi, samples))[0]
        y_lo = self.y_lo / float(jacobian.max())
        y_hi = self.y_hi / float(jacobian.min())
        pad = margin * (y_hi - y_lo)
        return Box(x_lo, x_hi, max(y_lo - pad, 1e-12), y_hi + pad)


# Numeric functions


EMPTY_BOX = Box(0.0, 0.0, 1.0, 1.0)

GammaFactor = Tuple[int, GlobalDiffeo]


@dataclass(frozen=True)
class Piece:
    """
    expr(x, y) * prod y^n (log phi')^(n)(x), pulled back along `chain` (applied
    left to right). `base_support` bounds the support before any pullback.
    """

    expr: sympy.Expr
    gammas: Tuple[GammaFactor, ...] = ()
    chain: Tuple[GlobalDiffeo, ...] = ()
    base_support: Optional[Box] = None

    @cached_property
    def support(self) -> Optional[Box]:
        box = self.base_support
        if box is None:
            return None
        for phi in self.chain:
            box = box.preimage(phi)
        return box

    def pulled(self, phi: GlobalDiffeo) -> "Piece":
        if phi.is_identity:
            return self
        return replace(self, chain=self.chain + (phi,))

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        for phi in reversed(self.chain):
            jacobian = phi.derivatives(x)[0]
            x, y = phi.value(x), jacobian * y
        values = evaluate_expr(self.expr, x, y)
        for order, phi in self.gammas:
            values = values * y ** order * phi.log_derivative(x, order)
        return values


Term = Tuple[float, Tuple[Piece, ...]]


class NumericFunction:
    """Finite sum of coefficient * product of pieces."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        self.terms: Tuple[Term, ...] = tuple((float(c), tuple(p)) for c, p in terms if c)

    @classmethod
    def bump_function(
        cls,
        x_range: Tuple[float, float],
        y_range: Tuple[float, float],
        polynomial: sympy.Expr = sympy.Integer(1),
    ) -> "NumericFunction":
        (x_lo, x_hi), (y_lo, y_hi) = x_range, y_range
        cx, rx = (x_lo + x_hi) / 2, (x_hi - x_lo) / 2
        cy, ry = (y_lo + y_hi) / 2, (y_hi - y_lo) / 2
        expr = sympy.sympify(polynomial) * bump((X_SYM - cx) / rx) * bump((Y_SYM - cy) / ry)
        return cls([(1.0, (Piece(expr, base_support=Box(x_lo, x_hi, y_lo, y_hi)),))])

    @classmethod
    def gamma_factor(cls, order: int, phi: GlobalDiffeo) -> "NumericFunction":
        return cls([(1.0, (Piece(sympy.Integer(1), ((order, phi),)),))])

    def __add__(self, other: "NumericFunction") -> "NumericFunction":
        return NumericFunction(self.terms + other.terms)

    def scale(self, value: float) -> "NumericFunction":
        return NumericFunction((c * value, p) for c, p in self.terms)

    def times(self, other: "NumericFunction") -> "NumericFunction":
        return NumericFunction((c1 * c2, p1 + p2) for c1, p1 in self.terms for c2, p2 in other.terms)

    def pullback(self, phi: GlobalDiffeo) -> "NumericFunction":
        return NumericFunction((c, tuple(p.pulled(phi) for p in pieces)) for c, pieces in self.terms)

    def horizontal(self) -> "NumericFunction":
        return NumericFunction(_leibniz(self.terms, _x_piece))

    def vertical(self) -> "NumericFunction":
        return NumericFunction(_leibniz(self.terms, _y_piece))

    def is_zero(self) -> bool:
        return not self.terms

    def simple_expr(self) -> sympy.Expr:
        """The sympy expression of a single chain-free, gamma-free piece."""
        if len(self.terms) != 1 or len(self.terms[0][1]) != 1:
            raise SupportError("function is not a single plain piece")
        coeff, (piece,) = self.terms[0]
        if piece.chain or piece.gammas:
            raise SupportError("function is not a single plain piece")
        return coeff * piece.expr

    @staticmethod
    def simple_support(pieces: Sequence[Piece]) -> Optional[Box]:
        box: Optional[Box] = None
        for piece in pieces:
            if piece.support is None:
                continue
            if box is None:
                box = piece.support
            else:
                box = box.intersect(piece.support)
                if box is None:
                    return EMPTY_BOX
        return box


def _leibniz(terms: Sequence[Term], derive: Callable[[Piece], List[Term]]) -> List[Term]:
    out: List[Term] = []
    for coeff, pieces in terms:
        for index, piece in enumerate(pieces):
            for c, replacement in derive(piece):
                out.append((coeff * c, pieces[:index] + replacement + pieces[index + 1:]))
    return out


def _x_piece(piece: Piece) -> List[Term]:
    """X = y d/dx; through a pullback X(g o phi~) = (Xg) o phi~ + gamma_1(phi) (Yg) o phi~."""
    if piece.chain:
        outer = piece.chain[-1]
        inner = replace(piece, chain=piece.chain[:-1])
        out = [(c, tuple(p.pulled(outer) for p in ps)) for c, ps in _x_piece(inner)]
        factor = Piece(sympy.Integer(1), ((1, outer),))
        out += [(c, (factor,) + tuple(p.pulled(outer) for p in ps)) for c, ps in _y_piece(inner)]
        return out
    out: List[Term] = []
    derived = Y_SYM * sympy.diff(piece.expr, X_SYM)
    if derived != 0:
        out.append((1.0, (replace(piece, expr=derived),)))
    for index, (order, phi) in enumerate(piece.gammas):
        if order >= 2:
            raise DegreeError("X acting on a second-order gamma factor is not available")
        gammas = piece.gammas[:index] + ((order + 1, phi),) + piece.gammas[index + 1:]
        out.append((1.0, (replace(piece, gammas=gammas),)))
    return out


def _y_piece(piece: Piece) -> List[Term]:
    """Y = y d/dy commutes with pullbacks; Y gamma_n = n gamma_n."""
    if piece.chain:
        outer = piece.chain[-1]
        inner = replace(piece, chain=piece.chain[:-1])
        return [(c, tuple(p.pulled(outer) for p in ps)) for c, ps in _y_piece(inner)]
    out: List[Term] = []
    derived = Y_SYM * sympy.diff(piece.expr, Y_SYM)
    if derived != 0:
        out.append((1.0, (replace(piece, expr=derived),)))
    total_order = sum(order for order, _ in piece.gammas)
    if total_order:
        out.append((float(total_order), (piece,)))
    return out


# Crossed elements


class NumericCrossed:
    """Sum of f U*_phi with numeric f and global phi, merged by phi."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Tuple[NumericFunction, GlobalDiffeo]] = ()):
        merged: Dict[GlobalDiffeo, NumericFunction] = {}
        for f, phi in terms:
            merged[phi] = merged[phi] + f if phi in merged else f
        self.terms = {phi: f for phi, f in merged.items() if not f.is_zero()}

    @classmethod
    def term(cls, f: NumericFunction, phi: GlobalDiffeo = IDENTITY) -> "NumericCrossed":
        return cls([(f, phi)])

    def items(self) -> Iterable[Tuple[NumericFunction, GlobalDiffeo]]:
        return ((f, phi) for phi, f in self.terms.items())

    def __add__(self, other: "NumericCrossed") -> "NumericCrossed":
        return NumericCrossed(list(self.items()) + list(other.items()))

    def scale(self, value: float) -> "NumericCrossed":
        return NumericCrossed((f.scale(value), phi) for f, phi in self.items())

    def __mul__(self, other: "NumericCrossed") -> "NumericCrossed":
        out = []
        for f1, phi1 in self.items():
            for f2, phi2 in other.items():
                out.append((f1.times(f2.pullback(phi1)), compose_diffeos(phi2, phi1)))
        return NumericCrossed(out)


def act_numeric(h: HopfElement, a: NumericCrossed) -> NumericCrossed:
    """Codimension-1 action with gamma_n(phi) = y^n (log phi')^(n)."""
    if h.codim != 1:
        raise UnsupportedCodimensionError("the numeric path is implemented for codimension 1", {"codim": h.codim})
    out = []
    for monomial, coeff in h.terms.items():
        for f, phi in a.items():
            g = f
            for symbol in reversed(monomial):
                if isinstance(symbol, HorizX):
                    g = g.horizontal()
                elif isinstance(symbol, VertY):
                    g = g.vertical()
                else:
                    g = g.times(NumericFunction.gamma_factor(len(symbol.tail) + 1, phi))
            out.append((g.scale(float(coeff)), phi))
    return NumericCrossed(out)


# Quadrature


def composite_rule(lo: float, hi: float, nodes: int, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on `panels` equal subintervals of [lo, hi]."""
    reference, weights = leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    points, scaled = [], []
    for left, right in zip(edges[:-1], edges[1:]):
        half = (right - left) / 2.0
        points.append(left + half * (reference + 1.0))
        scaled.append(half * weights)
    return np.concatenate(points), np.concatenate(scaled)


def _integrate_term(pieces: Sequence[Piece], nodes: int, panels: int) -> float:
    box = NumericFunction.simple_support(pieces)
    if box is None:
        raise SupportError("trace of a term with unbounded support")
    if box.x_lo >= box.x_hi:
        return 0.0
    if not Box.trace_box().contains(box):
        raise SupportError("test function support escapes the trace box", {"support": box.__dict__})
    px, wx = composite_rule(box.x_lo, box.x_hi, nodes, panels)
    py, wy = composite_rule(box.y_lo, box.y_hi, nodes, panels)
    xx, yy = np.meshgrid(px, py, indexing="ij")
    values = np.ones_like(xx)
    for piece in pieces:
        values = values * piece.evaluate(xx, yy)
    return float(np.einsum("i,ij,j->", wx, values / yy ** 2, wy))


def trace_quadrature(a: NumericCrossed, nodes: Optional[int] = None, panels: Optional[int] = None) -> float:
    """Sum over identity-labelled terms of the integral of f dx dy / y^2."""
    settings = get_settings()
    nodes = nodes or settings.quad_nodes
    panels = panels or settings.quad_panels
    total = 0.0
    for f, phi in a.items():
        if not phi.is_identity:
            continue
        for coeff, pieces in f.terms:
            total += coeff * _integrate_term(pieces, nodes, panels)
    return total


@dataclass(frozen=True)
class TraceValue:
    value: float
    drift: float
    grid: int


def trace_with_drift(a: NumericCrossed, strict: bool = False) -> TraceValue:
    """Trace at the configured grid and at doubled nodes per panel."""
    settings = get_settings()
    coarse = trace_quadrature(a, settings.quad_nodes, settings.quad_panels)
    fine = trace_quadrature(a, 2 * settings.quad_nodes, settings.quad_panels)
    drift = abs(fine - coarse)
    if strict and drift > settings.quad_drift_tolerance * max(1.0, abs(fine)):
        raise QuadratureConvergenceError(
            "grid refinement changed the trace beyond tolerance", {"drift": drift, "grid": settings.quad_nodes}
        )
    return TraceValue(value=fine, drift=drift, grid=settings.quad_nodes * settings.quad_panels)


def numeric_check(identity: str, lhs: TraceValue, rhs: TraceValue, tol: float) -> NumericCheck:
    settings = get_settings()
    abs_err = abs(lhs.value - rhs.value)
    scale = max(abs(lhs.value), abs(rhs.value))
    rel_err = abs_err / scale if scale else 0.0
    drift = max(lhs.drift, rhs.drift)
    passed = abs_err <= tol * max(1.0, scale) and drift <= settings.quad_drift_tolerance * max(1.0, scale)
    return NumericCheck(
        identity=identity, lhs=lhs.value, rhs=rhs.value, abs_err=abs_err, rel_err=rel_err,
        grid=lhs.grid, drift=drift, passed=passed,
    )


# Test functions


F1_BOX = ((-0.6, 0.6), (0.8, 1.6))
F2_BOX = ((-0.7, 0.7), (0.7, 2.0))


def make_test_function(rng: random.Random, box=F1_BOX) -> NumericFunction:
    """Random low-degree polynomial times the box bump."""
    polynomial = sympy.Rational(rng.randint(2, 4), 2)
    polynomial += sympy.Rational(rng.randint(-2, 2), 4) * X_SYM
    polynomial += sympy.Rational(rng.randint(-2, 2), 4) * Y_SYM
    polynomial += sympy.Rational(rng.randint(-1, 1), 4) * X_SYM * Y_SYM
    return NumericFunction.bump_function(box[0], box[1], polynomial)


def chi_tau(cochain: TensorCochain, elements: Sequence[NumericCrossed]) -> NumericCrossed:
    """sum c * a0 h1(a1) ... hn(an); the characteristic cochain is its trace."""
    if cochain.codim != 1:
        raise UnsupportedCodimensionError("characteristic map is evaluated in codimension 1")
    if cochain.degree > 2 or len(elements) != cochain.degree + 1:
        raise DegreeError(f"need {cochain.degree + 1} arguments for a degree-{cochain.degree} cochain (n <= 2)")
    total = NumericCrossed()
    for key, coeff in cochain.terms.items():
        product = elements[0]
        for monomial, element in zip(key, elements[1:]):
            product = product * act_numeric(HopfElement({monomial: 1}, 1), element)
        total = total + product.scale(float(coeff))
    return total


def chi_tau_value(cochain: TensorCochain, elements: Sequence[NumericCrossed]) -> TraceValue:
    return trace_with_drift(chi_tau(cochain, elements))


def chi_delta1_oracle(f0: NumericFunction, f1: NumericFunction, phi: PolynomialDiffeo, nodes: Optional[int] = None) -> float:
    """-int f0 (f1 o phi~) y (log phi')' dx dy / y^2 over the support of f0, computed directly."""
    settings = get_settings()
    nodes = nodes or 2 * settings.quad_nodes
    box = f0.terms[0][1][0].support
    px, wx = composite_rule(box.x_lo, box.x_hi, nodes, settings.quad_panels)
    py, wy = composite_rule(box.y_lo, box.y_hi, nodes, settings.quad_panels)
    xx, yy = np.meshgrid(px, py, indexing="ij")
    first, second = phi.polynomial.deriv(), phi.polynomial.deriv(2)
    moved = evaluate_expr(f1.simple_expr(), phi.polynomial(xx), first(xx) * yy)
    integrand = evaluate_expr(f0.simple_expr(), xx, yy) * moved * yy * second(xx) / first(xx)
    return -float(np.einsum("i,ij,j->", wx, integrand / yy ** 2, wy))


def verify_trace_identities(seed: int = 0, tol: Optional[float] = None, diffeo: str = "cubic") -> VerificationReport:
    """Trace property, delta-invariance and integration by parts for X, Y, d1, d2."""
    tol = get_settings().quad_tolerance if tol is None else tol
    rng = random.Random(f"{seed}:trace")
    phi = get_diffeo(diffeo)
    f1, f2 = make_test_function(rng, F1_BOX), make_test_function(rng, F2_BOX)
    a = NumericCrossed.term(f1, phi)
    b = NumericCrossed.term(f2, invert_diffeo(phi))
    plain = NumericCrossed.term(f1)
    pair = ModularPair.standard(1)
    checks: List[NumericCheck] = [
        numeric_check("tau(ab) = tau(ba)", trace_with_drift(a * b), trace_with_drift(b * a), tol)
    ]
    base = trace_with_drift(plain)
    samples = {"X": X1, "Y": Y11, "d1": delta_n(1), "d2": delta_n(2)}
    for name, symbol in samples.items():
        h = HopfElement.generator(symbol)
        modular = pair.character(h)
        expected = TraceValue(float(modular) * base.value, base.drift, base.grid)
        checks.append(numeric_check(f"tau({name}(a)) = delta({name}) tau(a)", trace_with_drift(act_numeric(h, plain)), expected, tol))
    for name, symbol in samples.items():
        h = HopfElement.generator(symbol)
        lhs = trace_with_drift(act_numeric(h, a) * b)
        rhs = trace_with_drift(a * act_numeric(twisted_antipode(pair, h), b))
        checks.append(numeric_check(f"tau({name}(a) b) = tau(a S~({name})(b))", lhs, rhs, tol))
    report = VerificationReport.from_checks("trace", checks, {"diffeo": phi.name, "seed": seed})
    logger.info("Trace suite finished", extra={"diffeo": phi.name, "pass": report.passed})
    return report


def _hochschild_b_value(cochain: TensorCochain, elements: Sequence[NumericCrossed]) -> TraceValue:
    """(b phi)(a0..a_{n+1}) for phi = tau o chi(cochain)."""
    n = cochain.degree
    total = NumericCrossed()
    for i in range(n + 1):
        merged = list(elements[:i]) + [elements[i] * elements[i + 1]] + list(elements[i + 2:])
        total = total + chi_tau(cochain, merged).scale((-1.0) ** i)
    wrapped = [elements[n + 1] * elements[0]] + list(elements[1:n + 1])
    total = total + chi_tau(cochain, wrapped).scale((-1.0) ** (n + 1))
    return trace_with_drift(total)


def verify_characteristic_map(seed: int = 0, tol: Optional[float] = None, diffeo: str = "cubic") -> VerificationReport:
    """chi_tau(d1) against a direct integral, its vanishing on affine maps, and cocycle transport."""
    tol = get_settings().quad_tolerance if tol is None else tol
    rng = random.Random(f"{seed}:chi")
    phi = get_diffeo(diffeo)
    if not isinstance(phi, PolynomialDiffeo):
        raise SupportError("the direct oracle needs a polynomial diffeo", {"diffeo": diffeo})
    f0, f1, f2, f3 = (make_test_function(rng, box) for box in (F1_BOX, F2_BOX, F1_BOX, F2_BOX))
    gv, pi = godbillon_vey(), fundamental()
    inverse = invert_diffeo(phi)
    a0, a1 = NumericCrossed.term(f0, phi), NumericCrossed.term(f1, inverse)
    checks: List[NumericCheck] = []

    chi = chi_tau_value(gv, [a0, a1])
    oracle = chi_delta1_oracle(f0, f1, phi)
    checks.append(numeric_check("chi(d1)(a0, a1) = direct integral", chi, TraceValue(oracle, 0.0, chi.grid), tol))

    affine = get_diffeo("affine")
    flat = chi_tau_value(gv, [NumericCrossed.term(f0, affine), NumericCrossed.term(f1, invert_diffeo(affine))])
    checks.append(numeric_check("chi(d1) vanishes on affine maps", flat, TraceValue(0.0, 0.0, flat.grid), tol))

    zero = TraceValue(0.0, 0.0, chi.grid)
    triple = [a0, NumericCrossed.term(f2), NumericCrossed.term(f1, inverse)]
    checks.append(numeric_check("b(chi(d1)) = 0", _hochschild_b_value(gv, triple), zero, tol))

    c0, c1, c2 = NumericCrossed.term(f0, phi), NumericCrossed.term(f2), NumericCrossed.term(f1, inverse)
    checks.append(
        numeric_check(
            "chi(Pi)(a2, a0, a1) = chi(Pi)(a0, a1, a2)",
            chi_tau_value(pi, [c2, c0, c1]), chi_tau_value(pi, [c0, c1, c2]), tol,
        )
    )
    quadruple = [c0, NumericCrossed.term(f2), NumericCrossed.term(f3), c2]
    checks.append(numeric_check("b(chi(Pi)) = 0", _hochschild_b_value(pi, quadruple), zero, tol))
    report = VerificationReport.from_checks("characteristic-map", checks, {"diffeo": phi.name, "seed": seed})
    logger.info("Characteristic map suite finished", extra={"diffeo": phi.name, "pass": report.passed})
    return report
