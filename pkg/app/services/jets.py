"""
Truncated formal jets of diffeomorphisms and functions on the frame bundle.

Everything lives in one sympy polynomial ring over QQ with generators

    x1..xn           base coordinates
    y{mu}_{j}        frame coordinates y^mu_j (row mu, column j)
    eps              the nilpotent deformation parameter

Arithmetic is truncated modulo eps^(K+1) with the `ring_series` helpers.
A frame function is a pair (numerator, N) standing for numerator / det(y)^N.
"""

import random
import threading
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import QQ
from sympy.polys.ring_series import rs_mul, rs_series_inversion, rs_subs, rs_trunc
from sympy.polys.rings import PolyElement, ring

from app.models.reports import RelationCheck, VerificationReport
from app.services.algebra_core import Delta, check_symbol
from app.utils.config import get_settings
from app.utils.exceptions import CodimensionMismatchError, IndexOutOfRangeError, SingularJetError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)


def to_fraction(value) -> Fraction:
    """Convert a ground-domain coefficient to a `Fraction`."""
    rational = QQ.to_sympy(value)
    return Fraction(int(rational.p), int(rational.q))


def _ground(value) -> object:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _sym_fraction(value) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _perm_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return -1 if inversions % 2 else 1


class DeformationScalar:
    """c0 + c1 eps + ... + cK eps^K with exact rational coefficients."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Sequence, order: int):
        values = [Fraction(c) for c in coefficients][: order + 1]
        values += [Fraction(0)] * (order + 1 - len(values))
        self.coefficients: Tuple[Fraction, ...] = tuple(values)

    @classmethod
    def constant(cls, value, order: int) -> "DeformationScalar":
        return cls([value], order)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __add__(self, other: "DeformationScalar") -> "DeformationScalar":
        return DeformationScalar([a + b for a, b in zip(self.coefficients, other.coefficients)], self.order)

    def __neg__(self) -> "DeformationScalar":
        return DeformationScalar([-a for a in self.coefficients], self.order)

    def __sub__(self, other: "DeformationScalar") -> "DeformationScalar":
        return self + (-other)

    def __mul__(self, other) -> "DeformationScalar":
        if not isinstance(other, DeformationScalar):
            return DeformationScalar([a * Fraction(other) for a in self.coefficients], self.order)
        out = [Fraction(0)] * (self.order + 1)
        for i, a in enumerate(self.coefficients):
            if not a:
                continue
            for j, b in enumerate(other.coefficients[: self.order + 1 - i]):
                out[i + j] += a * b
        return DeformationScalar(out, self.order)

    __rmul__ = __mul__

    def inverse(self) -> "DeformationScalar":
        c0 = self.coefficients[0]
        if not c0:
            raise SingularJetError("deformation scalar with zero constant term is not invertible")
        out = [Fraction(1) / c0]
        for k in range(1, self.order + 1):
            out.append(-sum(self.coefficients[i] * out[k - i] for i in range(1, k + 1)) / c0)
        return DeformationScalar(out, self.order)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, DeformationScalar):
            return self.coefficients == other.coefficients
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def format(self) -> str:
        parts = []
        for k, c in enumerate(self.coefficients):
            if c:
                parts.append(f"{c}" if k == 0 else f"{c}*eps" if k == 1 else f"{c}*eps^{k}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"DeformationScalar({self.format()})"


class JetContext:
    """
    Polynomial ring, truncation orders and determinant data for one codimension.
    Contexts compare by identity; elements from different contexts never mix.
    """

    def __init__(self, codim: int = 1, eps_order: Optional[int] = None, x_degree_cap: Optional[int] = None):
        settings = get_settings()
        if codim < 1:
            raise IndexOutOfRangeError(f"codimension {codim} must be >= 1")
        self.codim = codim
        self.eps_order = settings.eps_order if eps_order is None else eps_order
        self.x_degree_cap = settings.x_degree_cap if x_degree_cap is None else x_degree_cap
        n = codim
        names = [f"x{m + 1}" for m in range(n)]
        names += [f"y{mu + 1}_{j + 1}" for mu in range(n) for j in range(n)]
        names.append("eps")
        self.ring, *gens = ring(",".join(names), QQ)
        self.gens: Tuple[PolyElement, ...] = tuple(gens)
        self.x: Tuple[PolyElement, ...] = self.gens[:n]
        self.y: Tuple[Tuple[PolyElement, ...], ...] = tuple(
            tuple(self.gens[n + mu * n + j] for j in range(n)) for mu in range(n)
        )
        self.eps: PolyElement = self.gens[-1]
        self.det_y = self.determinant(self.y)
        self.adj_y = self.adjugate(self.y)
        self._gamma_cache: Dict[Tuple["FormalDiffeo", Tuple], "FrameFunction"] = {}
        self._lock = threading.Lock()

    @property
    def prec(self) -> int:
        return self.eps_order + 1

    def poly(self, source) -> PolyElement:
        """Ring element from a sympy expression, a string or a number."""
        if isinstance(source, PolyElement):
            return source
        if isinstance(source, (int, Fraction)):
            return self.const(source)
        return self.ring.from_expr(sympy.sympify(source))

    def const(self, value) -> PolyElement:
        return self.ring.ground_new(_ground(value))

    def truncate(self, p: PolyElement) -> PolyElement:
        return rs_trunc(p, self.eps, self.prec)

    def truncate_x(self, p: PolyElement) -> PolyElement:
        n, cap = self.codim, self.x_degree_cap
        p = self.truncate(p)
        if all(sum(m[:n]) <= cap for m in p.keys()):
            return p
        return self.ring.from_dict({m: c for m, c in p.items() if sum(m[:n]) <= cap})

    def mul(self, p: PolyElement, q: PolyElement) -> PolyElement:
        return rs_mul(p, q, self.eps, self.prec)

    def power(self, p: PolyElement, exponent: int) -> PolyElement:
        result = self.ring.one
        for _ in range(exponent):
            result = self.mul(result, p)
        return result

    def inverse(self, p: PolyElement) -> PolyElement:
        """1/p for p whose eps-free part is a nonzero constant."""
        if any(m[-1] == 0 and any(m[:-1]) for m in p.keys()) or self.ring.zero_monom not in p:
            raise SingularJetError("series inverse needs an invertible constant eps^0 part")
        return rs_series_inversion(p, self.eps, self.prec)

    def substitute(self, p: PolyElement, rules: Dict[PolyElement, PolyElement]) -> PolyElement:
        """Simultaneous substitution, truncated in eps."""
        if not rules:
            return p
        return rs_subs(p, rules, self.eps, self.prec)

    def eps_coefficient(self, p: PolyElement, k: int) -> PolyElement:
        return self.ring.from_dict({m[:-1] + (0,): c for m, c in p.items() if m[-1] == k})

    def determinant(self, matrix: Sequence[Sequence[PolyElement]]) -> PolyElement:
        size = len(matrix)
        total = self.ring.zero
        for perm in permutations(range(size)):
            term = self.ring.one
            for row, col in enumerate(perm):
                term = self.mul(term, matrix[row][col])
            total += term if _perm_sign(perm) > 0 else -term
        return total

    def adjugate(self, matrix: Sequence[Sequence[PolyElement]]) -> List[List[PolyElement]]:
        size = len(matrix)
        if size == 1:
            return [[self.ring.one]]
        adj = [[self.ring.zero] * size for _ in range(size)]
        for i in range(size):
            for j in range(size):
                minor = [[matrix[r][c] for c in range(size) if c != i] for r in range(size) if r != j]
                cofactor = self.determinant(minor)
                adj[i][j] = cofactor if (i + j) % 2 == 0 else -cofactor
        return adj

    def frame(self, numerator, zpow: int = 0) -> "FrameFunction":
        return FrameFunction(self, self.poly(numerator), zpow)

    def identity(self) -> "FormalDiffeo":
        return FormalDiffeo(self, self.x)

    def diffeo(self, components: Sequence) -> "FormalDiffeo":
        return FormalDiffeo(self, [self.poly(c) for c in components])

    def affine(self, matrix: Sequence[Sequence], offset: Sequence) -> "FormalDiffeo":
        n = self.codim
        comps = []
        for i in range(n):
            comp = self.const(offset[i])
            for j in range(n):
                comp += self.const(matrix[i][j]) * self.x[j]
            comps.append(comp)
        return FormalDiffeo(self, comps)


class FormalDiffeo:
    """
    phi^i(x) as polynomials in x with eps-truncated coefficients.

    The eps^0 part must be affine with invertible linear part; this is what
    makes formal inverses and det(phi')^(-1) exist in the truncated ring.
    """

    def __init__(self, ctx: JetContext, components: Sequence[PolyElement]):
        if len(components) != ctx.codim:
            raise CodimensionMismatchError(
                f"{len(components)} components for codimension {ctx.codim}",
            )
        n = ctx.codim
        comps = tuple(ctx.truncate(c) for c in components)
        for comp in comps:
            for monom in comp.keys():
                if any(monom[n:-1]):
                    raise SingularJetError("diffeo components may only involve x and eps")
                if monom[-1] == 0 and sum(monom[:n]) > 1:
                    raise SingularJetError("eps^0 part of a formal diffeo must be affine")
        self.ctx = ctx
        self.components = comps
        self.linear0 = sympy.Matrix(
            n, n, lambda i, j: QQ.to_sympy(comps[i].coeff(ctx.x[j]))
        )
        self.offset0 = [QQ.to_sympy(comp.coeff(1)) for comp in comps]
        if self.linear0.det() == 0:
            raise SingularJetError("linear part of the diffeo is singular", {"diffeo": self.format()})
        self._hash = hash(tuple(frozenset(c.items()) for c in comps))
        self._jacobian: Optional[List[List[PolyElement]]] = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalDiffeo):
            return NotImplemented
        return self.ctx is other.ctx and self.components == other.components

    def __hash__(self) -> int:
        return self._hash

    @property
    def jacobian(self) -> List[List[PolyElement]]:
        """J[rho][nu] = d phi^rho / d x^nu."""
        if self._jacobian is None:
            self._jacobian = [[comp.diff(xv) for xv in self.ctx.x] for comp in self.components]
        return self._jacobian

    def is_identity(self) -> bool:
        return self.components == self.ctx.x

    def linear_part(self) -> List[List[DeformationScalar]]:
        """L = phi'(0) as a matrix of deformation scalars."""
        ctx = self.ctx
        origin = {xv: ctx.ring.zero for xv in ctx.x}
        out = []
        for row in self.jacobian:
            entries = []
            for entry in row:
                at_zero = ctx.substitute(entry, origin)
                series = [at_zero.coeff(ctx.eps ** k) if k else at_zero.coeff(1) for k in range(ctx.prec)]
                entries.append(DeformationScalar([to_fraction(c) for c in series], ctx.eps_order))
            out.append(entries)
        return out

    def format(self) -> str:
        return ", ".join(str(c.as_expr()) for c in self.components)

    def __repr__(self) -> str:
        return f"FormalDiffeo({self.format()})"


def _check_context(*objects) -> JetContext:
    ctx = objects[0].ctx
    for obj in objects[1:]:
        if obj.ctx is not ctx:
            raise CodimensionMismatchError("jet operands come from different contexts")
    return ctx


def compose(phi: FormalDiffeo, psi: FormalDiffeo) -> FormalDiffeo:
    """phi o psi, truncated in x-degree and eps."""
    ctx = _check_context(phi, psi)
    rules = dict(zip(ctx.x, psi.components))
    return FormalDiffeo(ctx, [ctx.truncate_x(ctx.substitute(c, rules)) for c in phi.components])


def invert(phi: FormalDiffeo) -> FormalDiffeo:
    """
    Formal inverse by fixed-point iteration on g = A0^{-1}(x - b0 - R(g)),
    where A0 x + b0 is the eps^0 part and R the rest; each pass gains one eps order.
    """
    ctx = phi.ctx
    n = ctx.codim
    a_inv = phi.linear0.inv()
    affine = [
        ctx.const(_sym_fraction(phi.offset0[i])) + sum(
            (ctx.const(_sym_fraction(phi.linear0[i, j])) * ctx.x[j] for j in range(n)), ctx.ring.zero
        )
        for i in range(n)
    ]
    rest = [c - a for c, a in zip(phi.components, affine)]
    shifted = [ctx.x[j] - ctx.const(_sym_fraction(phi.offset0[j])) for j in range(n)]

    def solve(rhs: Sequence[PolyElement]) -> List[PolyElement]:
        return [
            sum((ctx.const(_sym_fraction(a_inv[i, j])) * rhs[j] for j in range(n)), ctx.ring.zero)
            for i in range(n)
        ]

    guess = solve(shifted)
    for _ in range(ctx.eps_order):
        rules = dict(zip(ctx.x, guess))
        correction = [ctx.truncate_x(ctx.substitute(r, rules)) for r in rest]
        guess = [ctx.truncate_x(g) for g in solve([s - c for s, c in zip(shifted, correction)])]
    return FormalDiffeo(ctx, guess)


class FrameFunction:
    """
    numerator / det(y)^zpow, kept with zpow minimal.
    """

    __slots__ = ("ctx", "num", "zpow")

    def __init__(self, ctx: JetContext, num: PolyElement, zpow: int = 0):
        num = ctx.truncate(num)
        if not num:
            zpow = 0
        while zpow > 0:
            quotient, remainder = num.div(ctx.det_y)
            if remainder:
                break
            num, zpow = quotient, zpow - 1
        self.ctx = ctx
        self.num = num
        self.zpow = zpow

    @classmethod
    def constant(cls, ctx: JetContext, value) -> "FrameFunction":
        return cls(ctx, ctx.const(value))

    def _lift(self, zpow: int) -> PolyElement:
        return self.ctx.mul(self.num, self.ctx.det_y ** (zpow - self.zpow))

    def __add__(self, other: "FrameFunction") -> "FrameFunction":
        ctx = _check_context(self, other)
        zpow = max(self.zpow, other.zpow)
        return FrameFunction(ctx, self._lift(zpow) + other._lift(zpow), zpow)

    def __neg__(self) -> "FrameFunction":
        return FrameFunction(self.ctx, -self.num, self.zpow)

    def __sub__(self, other: "FrameFunction") -> "FrameFunction":
        return self + (-other)

    def __mul__(self, other) -> "FrameFunction":
        if isinstance(other, FrameFunction):
            ctx = _check_context(self, other)
            return FrameFunction(ctx, ctx.mul(self.num, other.num), self.zpow + other.zpow)
        return FrameFunction(self.ctx, self.num * _ground(other), self.zpow)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FrameFunction):
            return NotImplemented
        return self.ctx is other.ctx and self.zpow == other.zpow and self.num == other.num

    def __hash__(self) -> int:
        return hash((frozenset(self.num.items()), self.zpow))

    def is_zero(self) -> bool:
        return not self.num

    def horizontal(self, k: int) -> "FrameFunction":
        """X_k = sum_mu y^mu_k d/dx^mu; det(y) does not depend on x."""
        ctx = self.ctx
        if not 1 <= k <= ctx.codim:
            raise IndexOutOfRangeError(f"index {k} out of range 1..{ctx.codim}")
        out = ctx.ring.zero
        for mu in range(ctx.codim):
            out += ctx.mul(ctx.y[mu][k - 1], self.num.diff(ctx.x[mu]))
        return FrameFunction(ctx, out, self.zpow)

    def vertical(self, i: int, j: int) -> "FrameFunction":
        """Y_i^j = sum_mu y^mu_i d/dy^mu_j; uses Y_i^j det(y) = delta_ij det(y)."""
        ctx = self.ctx
        if not (1 <= i <= ctx.codim and 1 <= j <= ctx.codim):
            raise IndexOutOfRangeError(f"indices ({i}, {j}) out of range 1..{ctx.codim}")
        out = ctx.ring.zero
        for mu in range(ctx.codim):
            out += ctx.mul(ctx.y[mu][i - 1], self.num.diff(ctx.y[mu][j - 1]))
        if i == j and self.zpow:
            out -= self.num * self.zpow
        return FrameFunction(ctx, out, self.zpow)

    def pullback(self, phi: FormalDiffeo) -> "FrameFunction":
        """f o phi~ with phi~(x, y) = (phi(x), phi'(x) y)."""
        ctx = _check_context(self, phi)
        if phi.is_identity():
            return self
        n = ctx.codim
        rules: Dict[PolyElement, PolyElement] = dict(zip(ctx.x, phi.components))
        jac = phi.jacobian
        for mu in range(n):
            for j in range(n):
                rules[ctx.y[mu][j]] = sum(
                    (ctx.mul(jac[mu][nu], ctx.y[nu][j]) for nu in range(n)), ctx.ring.zero
                )
        num = ctx.substitute(self.num, rules)
        if self.zpow:
            det_inverse = ctx.inverse(ctx.determinant(jac))
            num = ctx.mul(num, ctx.power(det_inverse, self.zpow))
        return FrameFunction(ctx, num, self.zpow)

    def evaluate(self, x: Sequence, y: Sequence[Sequence]) -> DeformationScalar:
        """Value at a rational point, as a series in eps."""
        ctx = self.ctx
        n = ctx.codim
        values = [Fraction(v) for v in x] + [Fraction(y[mu][j]) for mu in range(n) for j in range(n)]
        coefficients = [Fraction(0)] * ctx.prec
        for monom, coeff in self.num.items():
            value = to_fraction(coeff)
            for base, exponent in zip(values, monom[:-1]):
                if exponent:
                    value *= base ** exponent
            coefficients[monom[-1]] += value
        if self.zpow:
            det = sympy.Matrix(n, n, lambda mu, j: sympy.Rational(str(Fraction(y[mu][j])))).det()
            scale = Fraction(1) / _sym_fraction(det) ** self.zpow
            coefficients = [c * scale for c in coefficients]
        return DeformationScalar(coefficients, ctx.eps_order)

    def format(self) -> str:
        if not self.zpow:
            return str(self.num.as_expr())
        return f"({self.num.as_expr()})/det(y)^{self.zpow}"

    def __repr__(self) -> str:
        return f"FrameFunction({self.format()})"


def gamma(phi: FormalDiffeo, i: int, j: int, k: int, tail: Sequence[int] = ()) -> FrameFunction:
    """
    gamma^i_{jk;tail}(phi) = (y^-1)^i_l (phi'^-1)^l_r d_m d_v phi^r y^v_j y^m_k,
    followed by X_t for each tail entry t.
    """
    ctx = phi.ctx
    tail = tuple(tail)
    check_symbol(Delta(i, j, k, tail), ctx.codim)
    key = (phi, (i, j, k, tail))
    cached = ctx._gamma_cache.get(key)
    if cached is not None:
        return cached
    if tail:
        result = gamma(phi, i, j, k, tail[:-1]).horizontal(tail[-1])
    else:
        result = _gamma_base(phi, i, j, k)
    with ctx._lock:
        ctx._gamma_cache.setdefault(key, result)
    return result


def _gamma_base(phi: FormalDiffeo, i: int, j: int, k: int) -> FrameFunction:
    ctx = phi.ctx
    n = ctx.codim
    jac = phi.jacobian
    det_inverse = ctx.inverse(ctx.determinant(jac))
    adj_jac = ctx.adjugate(jac)
    hessian = [
        [[comp.diff(ctx.x[mu]).diff(ctx.x[nu]) for nu in range(n)] for mu in range(n)]
        for comp in phi.components
    ]
    num = ctx.ring.zero
    for lam in range(n):
        outer = ctx.adj_y[i - 1][lam]
        if not outer:
            continue
        for rho in range(n):
            inv_entry = ctx.mul(adj_jac[lam][rho], det_inverse)
            if not inv_entry:
                continue
            for mu in range(n):
                for nu in range(n):
                    second = hessian[rho][mu][nu]
                    if not second:
                        continue
                    frame = ctx.mul(ctx.y[nu][j - 1], ctx.y[mu][k - 1])
                    num += ctx.mul(ctx.mul(outer, inv_entry), ctx.mul(second, frame))
    return FrameFunction(ctx, num, 1)


def gamma_of(phi: FormalDiffeo, symbol: Delta) -> FrameFunction:
    return gamma(phi, symbol.i, symbol.j, symbol.k, symbol.tail)


def delta_symbols(codim: int, tail_cap: int) -> List[Delta]:
    indices = range(1, codim + 1)
    tails = [t for length in range(tail_cap + 1) for t in combinations_with_replacement(indices, length)]
    return sorted(
        Delta(i, j, k, tail) for i in indices for j in indices for k in indices if j <= k for tail in tails
    )


def verify_gamma_cocycle(phi: FormalDiffeo, psi: FormalDiffeo, tail_cap: Optional[int] = None) -> bool:
    """
    gamma(phi psi) = psi~* gamma(phi) + gamma(psi) on tail-free symbols and
    gamma_{K|L}(phi psi) = X_L(psi~* gamma_K(phi)) + gamma_{K|L}(psi) on tailed ones.
    """
    ctx = _check_context(phi, psi)
    tail_cap = get_settings().tail_cap if tail_cap is None else tail_cap
    composite = compose(phi, psi)
    for symbol in delta_symbols(ctx.codim, tail_cap):
        pulled = gamma(phi, symbol.i, symbol.j, symbol.k).pullback(psi)
        for l in symbol.tail:
            pulled = pulled.horizontal(l)
        if gamma_of(composite, symbol) != pulled + gamma_of(psi, symbol):
            logger.debug("Cocycle identity failed", extra={"symbol": repr(symbol), "phi": phi.format()})
            return False
    return True


def random_diffeo(ctx: JetContext, rng: random.Random, density: float = 0.5) -> FormalDiffeo:
    """
    Weight-bounded jet: eps^k multiplies polynomials of x-degree <= k+1, so
    compositions and inverses stay below the x-degree cap.
    """
    n = ctx.codim
    while True:
        matrix = [[rng.randint(-1, 2) if r != c else rng.choice([1, 2]) for c in range(n)] for r in range(n)]
        if sympy.Matrix(matrix).det() != 0:
            break
    offset = [Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(n)]
    comps = list(ctx.affine(matrix, offset).components)
    monomials = _x_monomials(n, ctx.eps_order + 1)
    for i in range(n):
        for k in range(1, ctx.eps_order + 1):
            for exps in monomials:
                if 2 <= sum(exps) <= k + 1 and rng.random() < density:
                    term = ctx.const(Fraction(rng.randint(-3, 3), rng.randint(1, 2))) * ctx.power(ctx.eps, k)
                    for xv, e in zip(ctx.x, exps):
                        term = term * xv ** e
                    comps[i] += term
    return FormalDiffeo(ctx, comps)


def random_frame_function(ctx: JetContext, rng: random.Random, terms: int = 4, degree: int = 2) -> FrameFunction:
    variables = list(ctx.x) + [v for row in ctx.y for v in row]
    num = ctx.ring.zero
    for _ in range(terms):
        term = ctx.const(rng.randint(-4, 4))
        for _ in range(rng.randint(0, degree)):
            term = term * rng.choice(variables)
        num += term
    return FrameFunction(ctx, num, rng.choice([0, 0, 1]))


def _x_monomials(n: int, max_degree: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = [()]
    for _ in range(n):
        out = [m + (e,) for m in out for e in range(max_degree + 1)]
    return [m for m in out if sum(m) <= max_degree]


def verify_jet_suite(codim: int = 1, cases: int = 10, seed: int = 0, eps_order: Optional[int] = None) -> VerificationReport:
    """compose/invert round trips, gamma symmetry and the cocycle identity on seeded jets."""
    ctx = JetContext(codim, eps_order=eps_order)
    checks: List[RelationCheck] = []

    def run(name: str, predicate) -> None:
        failure = None
        for case in range(cases):
            rng = random.Random(f"{seed}:{name}:{case}")
            sample = predicate(rng)
            if sample is not None:
                failure = sample
                break
        checks.append(RelationCheck(relation=name, trials=cases, passed=failure is None, counterexample=failure))

    def round_trip(rng: random.Random) -> Optional[str]:
        phi = random_diffeo(ctx, rng)
        return None if compose(phi, invert(phi)) == ctx.identity() else phi.format()

    def symmetry(rng: random.Random) -> Optional[str]:
        phi = random_diffeo(ctx, rng)
        for symbol in delta_symbols(codim, 1):
            swapped = gamma(phi, symbol.i, symbol.k, symbol.j, tuple(reversed(symbol.tail)))
            if gamma_of(phi, symbol) != swapped:
                return phi.format()
        return None

    def cocycle(rng: random.Random) -> Optional[str]:
        phi, psi = random_diffeo(ctx, rng), random_diffeo(ctx, rng)
        return None if verify_gamma_cocycle(phi, psi, tail_cap=1) else f"{phi.format()} | {psi.format()}"

    run("compose(phi, invert(phi)) = id", round_trip)
    run("gamma symmetric in (j, k)", symmetry)
    run("gamma cocycle identity", cocycle)
    report = VerificationReport.from_checks("gamma-cocycle", checks, {"codim": codim, "eps_order": ctx.eps_order})
    logger.info("Jet suite finished", extra={"codim": codim, "pass": report.passed})
    return report
