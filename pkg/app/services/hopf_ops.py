"""
Coalgebra and Hopf structure of the transverse Hopf algebras.

Coproduct and antipode are fixed on X, Y and the tail-free deltas; on deltas
with a tail they are derived from d[i;j,k;tail+l] = [X_l, d[i;j,k;tail]]
and memoized per symbol and per monomial in a `HopfStructure`.
"""

import random
import threading
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from app.models.reports import RelationCheck, VerificationReport
from app.services.algebra_core import (
    UNIT,
    Delta,
    GeneratorSymbol,
    HopfElement,
    HorizX,
    PBWMonomial,
    Scalar,
    Terms,
    VertY,
    accumulate,
    format_linear,
    format_monomial,
    generators,
    get_hn_engine,
    pbw_basis,
    random_element,
)
from app.utils.exceptions import CodimensionMismatchError, DegreeError, NotInvertibleError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

TensorKey = Tuple[PBWMonomial, ...]
TensorTerms = Dict[TensorKey, Fraction]


class TensorCochain:
    """
    Element of the n-fold tensor power; degree 0 is a scalar stored under the key ().
    """

    __slots__ = ("degree", "terms", "codim")

    def __init__(self, degree: int, terms: Optional[Mapping[TensorKey, Scalar]] = None, codim: int = 1):
        self.degree = degree
        self.codim = codim
        self.terms: TensorTerms = {}
        for key, coeff in (terms or {}).items():
            if len(key) != degree:
                raise DegreeError(f"tensor key of length {len(key)} in a degree-{degree} cochain")
            if coeff:
                self.terms[tuple(key)] = Fraction(coeff)

    @classmethod
    def zero(cls, degree: int, codim: int = 1) -> "TensorCochain":
        return cls(degree, {}, codim)

    @classmethod
    def scalar(cls, value: Scalar, codim: int = 1) -> "TensorCochain":
        return cls(0, {(): value}, codim)

    @classmethod
    def from_element(cls, element: HopfElement) -> "TensorCochain":
        return cls(1, {(m,): c for m, c in element.terms.items()}, element.codim)

    @classmethod
    def tensor_of(cls, *elements: HopfElement) -> "TensorCochain":
        codim = elements[0].codim if elements else 1
        result = cls.scalar(1, codim)
        for element in elements:
            result = result.tensor(cls.from_element(element))
        return result

    def _check(self, other: "TensorCochain") -> None:
        if other.codim != self.codim:
            raise CodimensionMismatchError(f"codimension {self.codim} does not match {other.codim}")
        if other.degree != self.degree:
            raise DegreeError(f"degree {self.degree} does not match {other.degree}")

    def __add__(self, other: "TensorCochain") -> "TensorCochain":
        self._check(other)
        return TensorCochain(self.degree, accumulate(dict(self.terms), other.terms), self.codim)

    def __neg__(self) -> "TensorCochain":
        return TensorCochain(self.degree, {k: -c for k, c in self.terms.items()}, self.codim)

    def __sub__(self, other: "TensorCochain") -> "TensorCochain":
        return self + (-other)

    def __rmul__(self, scale: Scalar) -> "TensorCochain":
        return TensorCochain(self.degree, {k: scale * c for k, c in self.terms.items()}, self.codim)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorCochain):
            return NotImplemented
        return self.degree == other.degree and self.codim == other.codim and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_value(self) -> Fraction:
        if self.degree != 0:
            raise DegreeError("only degree-0 cochains are scalars")
        return self.terms.get((), Fraction(0))

    def as_element(self) -> HopfElement:
        if self.degree != 1:
            raise DegreeError("only degree-1 cochains are elements")
        return HopfElement({key[0]: c for key, c in self.terms.items()}, self.codim)

    def tensor(self, other: "TensorCochain") -> "TensorCochain":
        out: TensorTerms = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                accumulate(out, {k1 + k2: c1 * c2})
        return TensorCochain(self.degree + other.degree, out, self.codim)

    def slot_product(self, other: "TensorCochain") -> "TensorCochain":
        """Componentwise product (h1 x ... x hn)(k1 x ... x kn) = h1k1 x ... x hnkn."""
        self._check(other)
        return TensorCochain(self.degree, slot_product_terms(self.terms, other.terms, self.codim), self.codim)

    def format(self) -> str:
        if self.degree == 0:
            return str(self.scalar_value())
        ordered = sorted(
            self.terms.items(),
            key=lambda item: (sum(m.degree for m in item[0]), tuple(m.sort_key() for m in item[0])),
        )
        return format_linear(
            (" ox ".join(format_monomial(m, self.codim) for m in key), c) for key, c in ordered
        )

    def __repr__(self) -> str:
        return f"TensorCochain(degree={self.degree}, {self.format()!r})"


def expand_slots(slot_terms: Sequence[Mapping[PBWMonomial, Fraction]], coeff: Fraction = Fraction(1)) -> TensorTerms:
    """Tensor product of per-slot linear combinations."""
    out: TensorTerms = {}
    for combo in product(*(list(terms.items()) for terms in slot_terms)):
        value = coeff
        for _, c in combo:
            value *= c
        accumulate(out, {tuple(m for m, _ in combo): value})
    return out


def slot_product_terms(left: Mapping[TensorKey, Fraction], right: Mapping[TensorKey, Fraction], codim: int) -> TensorTerms:
    engine = get_hn_engine(codim)
    out: TensorTerms = {}
    for k1, c1 in left.items():
        for k2, c2 in right.items():
            slots = [engine.normal_word(a + b) for a, b in zip(k1, k2)]
            accumulate(out, expand_slots(slots, c1 * c2))
    return out


def map_slot(terms: Mapping[TensorKey, Fraction], slot: int, fn: Callable[[PBWMonomial], Mapping[TensorKey, Fraction]]) -> TensorTerms:
    """Replace slot `slot` of every key by the tensor terms fn(monomial) (which may have any length)."""
    out: TensorTerms = {}
    for key, coeff in terms.items():
        for inner, c in fn(key[slot]).items():
            accumulate(out, {key[:slot] + inner + key[slot + 1:]: coeff * c})
    return out


class HopfStructure:
    """
    Memoized coproduct and antipode tables for one codimension.
    The tables are append-only and written under a lock.
    """

    def __init__(self, codim: int):
        self.codim = codim
        self.engine = get_hn_engine(codim)
        self._lock = threading.Lock()
        self._coproduct_symbol: Dict[GeneratorSymbol, TensorTerms] = {}
        self._coproduct_monomial: Dict[PBWMonomial, TensorTerms] = {UNIT: {(UNIT, UNIT): Fraction(1)}}
        self._antipode_symbol: Dict[GeneratorSymbol, Terms] = {}
        self._antipode_monomial: Dict[PBWMonomial, Terms] = {UNIT: {UNIT: Fraction(1)}}

    def _store(self, table: Dict, key, value):
        with self._lock:
            return table.setdefault(key, value)

    def coproduct_symbol(self, symbol: GeneratorSymbol) -> TensorTerms:
        cached = self._coproduct_symbol.get(symbol)
        if cached is not None:
            return cached
        one = PBWMonomial((symbol,))
        primitive = {(one, UNIT): Fraction(1), (UNIT, one): Fraction(1)}
        if isinstance(symbol, VertY) or (isinstance(symbol, Delta) and not symbol.tail):
            value = primitive
        elif isinstance(symbol, HorizX):
            value = dict(primitive)
            for i in range(1, self.codim + 1):
                for j in range(1, self.codim + 1):
                    key = (PBWMonomial((Delta(i, j, symbol.k),)), PBWMonomial((VertY(i, j),)))
                    accumulate(value, {key: Fraction(1)})
        else:
            base = Delta(symbol.i, symbol.j, symbol.k, symbol.tail[:-1])
            dx = self.coproduct_symbol(HorizX(symbol.tail[-1]))
            db = self.coproduct_symbol(base)
            value = accumulate(slot_product_terms(dx, db, self.codim), slot_product_terms(db, dx, self.codim), -1)
        return self._store(self._coproduct_symbol, symbol, value)

    def coproduct_monomial(self, monomial: PBWMonomial) -> TensorTerms:
        cached = self._coproduct_monomial.get(monomial)
        if cached is not None:
            return cached
        head = self.coproduct_monomial(PBWMonomial(monomial[:-1]))
        value = slot_product_terms(head, self.coproduct_symbol(monomial[-1]), self.codim)
        return self._store(self._coproduct_monomial, monomial, value)

    def antipode_symbol(self, symbol: GeneratorSymbol) -> Terms:
        cached = self._antipode_symbol.get(symbol)
        if cached is not None:
            return cached
        one = PBWMonomial((symbol,))
        if isinstance(symbol, VertY) or (isinstance(symbol, Delta) and not symbol.tail):
            value = {one: Fraction(-1)}
        elif isinstance(symbol, HorizX):
            value = {one: Fraction(-1)}
            for i in range(1, self.codim + 1):
                for j in range(1, self.codim + 1):
                    accumulate(value, self.engine.normal_word((Delta(i, j, symbol.k), VertY(i, j))))
        else:
            base = Delta(symbol.i, symbol.j, symbol.k, symbol.tail[:-1])
            sx = self.antipode_symbol(HorizX(symbol.tail[-1]))
            sb = self.antipode_symbol(base)
            value = accumulate(self.engine.multiply_terms(sb, sx), self.engine.multiply_terms(sx, sb), -1)
        return self._store(self._antipode_symbol, symbol, value)

    def antipode_monomial(self, monomial: PBWMonomial) -> Terms:
        cached = self._antipode_monomial.get(monomial)
        if cached is not None:
            return cached
        head = self.antipode_monomial(PBWMonomial(monomial[:-1]))
        value = self.engine.multiply_terms(self.antipode_symbol(monomial[-1]), head)
        return self._store(self._antipode_monomial, monomial, value)


_structures: Dict[int, HopfStructure] = {}
_structures_lock = threading.Lock()


def get_hopf_structure(codim: int) -> HopfStructure:
    structure = _structures.get(codim)
    if structure is None:
        with _structures_lock:
            structure = _structures.setdefault(codim, HopfStructure(codim))
    return structure


def coproduct(h: HopfElement) -> TensorCochain:
    structure = get_hopf_structure(h.codim)
    out: TensorTerms = {}
    for monomial, coeff in h.terms.items():
        accumulate(out, structure.coproduct_monomial(monomial), coeff)
    return TensorCochain(2, out, h.codim)


def counit(h: HopfElement) -> Fraction:
    return h.constant_term()


def monomial_counit(monomial: PBWMonomial) -> Fraction:
    return Fraction(1) if not monomial else Fraction(0)


def antipode(h: HopfElement) -> HopfElement:
    structure = get_hopf_structure(h.codim)
    out: Terms = {}
    for monomial, coeff in h.terms.items():
        accumulate(out, structure.antipode_monomial(monomial), coeff)
    return HopfElement(out, h.codim)


def apply_coproduct_to_slot(c: TensorCochain, slot: int) -> TensorCochain:
    structure = get_hopf_structure(c.codim)
    return TensorCochain(c.degree + 1, map_slot(c.terms, slot, structure.coproduct_monomial), c.codim)


def iterated_coproduct(h: HopfElement, m: int) -> TensorCochain:
    """Delta^m(h) in degree m+1; Delta^0 is the identity."""
    if m < 0:
        raise DegreeError("iterated coproduct order must be >= 0")
    result = TensorCochain.from_element(h)
    for step in range(m):
        result = apply_coproduct_to_slot(result, step)
    return result


class Character:
    """Algebra character given by its values on generators (default 0)."""

    def __init__(self, values: Optional[Mapping[GeneratorSymbol, Scalar]] = None, name: str = "custom"):
        self.values: Dict[GeneratorSymbol, Fraction] = {g: Fraction(v) for g, v in (values or {}).items() if v}
        self.name = name

    @classmethod
    def modular(cls, codim: int) -> "Character":
        """delta(Y_i^i) = 1, zero on X and on the deltas."""
        return cls({VertY(i, i): 1 for i in range(1, codim + 1)}, name="modular")

    @classmethod
    def counit(cls) -> "Character":
        return cls({}, name="counit")

    def key(self) -> Tuple:
        return tuple(sorted((g.sort_key(), v) for g, v in self.values.items()))

    def on_monomial(self, monomial: PBWMonomial) -> Fraction:
        value = Fraction(1)
        for symbol in monomial:
            value *= self.values.get(symbol, Fraction(0))
            if not value:
                break
        return value

    def __call__(self, h: HopfElement) -> Fraction:
        return sum((c * self.on_monomial(m) for m, c in h.terms.items()), Fraction(0))


def check_character(delta: Character, codim: int, tail_cap: int = 1) -> Optional[Tuple[GeneratorSymbol, GeneratorSymbol]]:
    """Return a generator pair whose bracket the character does not kill, or None."""
    engine = get_hn_engine(codim)
    gens = generators(codim, tail_cap)
    for a in gens:
        for b in gens:
            value = sum((c * delta.values.get(g, 0) for g, c in engine.bracket(a, b).items()), Fraction(0))
            if value:
                return a, b
    return None


class GroupLike:
    """Group-like element; only the unit (and therefore sigma = 1 pairs) is invertible here."""

    def __init__(self, element: HopfElement):
        if coproduct(element) != TensorCochain.tensor_of(element, element) or counit(element) != 1:
            raise NotInvertibleError("element is not group-like", {"element": element.format()})
        self.element = element

    @classmethod
    def unit(cls, codim: int = 1) -> "GroupLike":
        return cls(HopfElement.one(codim))

    def is_unit(self) -> bool:
        return self.element == HopfElement.one(self.element.codim)

    def inverse(self) -> HopfElement:
        if self.is_unit():
            return self.element
        raise NotInvertibleError(
            "only sigma = 1 is invertible in the truncated algebra",
            {"sigma": self.element.format()},
        )


class ModularPair:
    """(delta, sigma) with delta(sigma) = 1; caches its twisted antipode per monomial."""

    def __init__(self, character: Character, sigma: GroupLike):
        if character(sigma.element) != 1:
            raise NotInvertibleError("modular pair requires delta(sigma) = 1")
        self.character = character
        self.sigma = sigma
        self.codim = sigma.element.codim
        self._lock = threading.Lock()
        self._twisted: Dict[PBWMonomial, Terms] = {}

    @classmethod
    def standard(cls, codim: int = 1) -> "ModularPair":
        return cls(Character.modular(codim), GroupLike.unit(codim))

    @classmethod
    def untwisted(cls, codim: int = 1) -> "ModularPair":
        return cls(Character.counit(), GroupLike.unit(codim))

    @property
    def name(self) -> str:
        return f"({self.character.name}, 1)" if self.sigma.is_unit() else f"({self.character.name}, sigma)"

    def twisted_antipode_monomial(self, monomial: PBWMonomial) -> Terms:
        cached = self._twisted.get(monomial)
        if cached is not None:
            return cached
        structure = get_hopf_structure(self.codim)
        value: Terms = {}
        for (m1, m2), coeff in structure.coproduct_monomial(monomial).items():
            weight = self.character.on_monomial(m1)
            if weight:
                accumulate(value, structure.antipode_monomial(m2), coeff * weight)
        with self._lock:
            return self._twisted.setdefault(monomial, value)


def twisted_antipode(pair: ModularPair, h: HopfElement) -> HopfElement:
    """S~(h) = sum delta(h(1)) S(h(2))."""
    out: Terms = {}
    for monomial, coeff in h.terms.items():
        accumulate(out, pair.twisted_antipode_monomial(monomial), coeff)
    return HopfElement(out, h.codim)


def involution_defect(pair: ModularPair, degree_cap: int, tail_cap: Optional[int] = None) -> Optional[PBWMonomial]:
    """First basis monomial with S~^2(h) != sigma^-1 h sigma, or None."""
    sigma = pair.sigma.element
    sigma_inv = pair.sigma.inverse()
    for monomial in pbw_basis(pair.codim, degree_cap, tail_cap):
        h = HopfElement({monomial: 1}, pair.codim)
        if twisted_antipode(pair, twisted_antipode(pair, h)) != sigma_inv * h * sigma:
            return monomial
    return None


def check_involution(pair: ModularPair, degree_cap: int, tail_cap: Optional[int] = None) -> bool:
    defect = involution_defect(pair, degree_cap, tail_cap)
    logger.info(
        "Involution check finished",
        extra={"pair": pair.name, "codim": pair.codim, "degree_cap": degree_cap, "pass": defect is None},
    )
    return defect is None


def _basis_check(name: str, basis: Iterable[PBWMonomial], codim: int, predicate: Callable[[HopfElement], bool]) -> RelationCheck:
    trials = 0
    for monomial in basis:
        trials += 1
        h = HopfElement({monomial: 1}, codim)
        if not predicate(h):
            return RelationCheck(relation=name, trials=trials, passed=False, counterexample=h.format())
    return RelationCheck(relation=name, trials=trials, passed=True)


def _multiply_out(c: TensorCochain, left_map: Callable[[HopfElement], HopfElement], right_map: Callable[[HopfElement], HopfElement]) -> HopfElement:
    total = HopfElement.zero(c.codim)
    for (m1, m2), coeff in c.terms.items():
        total = total + coeff * (left_map(HopfElement({m1: 1}, c.codim)) * right_map(HopfElement({m2: 1}, c.codim)))
    return total


def verify_hopf_axioms(
    codim: int,
    degree_cap: int,
    pair: Optional[ModularPair] = None,
    tail_cap: Optional[int] = None,
    samples: int = 30,
    seed: int = 0,
) -> VerificationReport:
    """Coassociativity, counit, antipode, twisted-antipode counit laws and the bialgebra law."""
    pair = pair or ModularPair.standard(codim)
    basis = pbw_basis(codim, degree_cap, tail_cap)

    def identity(h: HopfElement) -> HopfElement:
        return h

    def coassociative(h: HopfElement) -> bool:
        d = coproduct(h)
        return apply_coproduct_to_slot(d, 0) == apply_coproduct_to_slot(d, 1)

    def counital(h: HopfElement) -> bool:
        d = coproduct(h)
        left = HopfElement({m2: c * monomial_counit(m1) for (m1, m2), c in d.terms.items()}, codim)
        right = HopfElement({m1: c * monomial_counit(m2) for (m1, m2), c in d.terms.items()}, codim)
        return left == h and right == h

    def antipodal(h: HopfElement) -> bool:
        unit = HopfElement.scalar(counit(h), codim)
        d = coproduct(h)
        return _multiply_out(d, antipode, identity) == unit and _multiply_out(d, identity, antipode) == unit

    def twisted_counit(h: HopfElement) -> bool:
        st = twisted_antipode(pair, h)
        return counit(st) == pair.character(h) and pair.character(st) == counit(h)

    checks = [
        _basis_check("coassociativity", basis, codim, coassociative),
        _basis_check("counit", basis, codim, counital),
        _basis_check("antipode", basis, codim, antipodal),
        _basis_check("twisted counit", basis, codim, twisted_counit),
    ]

    rng = random.Random(seed)
    failure = None
    for trial in range(samples):
        a = random_element(rng, codim, 3)
        b = random_element(rng, codim, 3)
        if coproduct(a * b) != coproduct(a).slot_product(coproduct(b)):
            failure = f"a = {a.format()}; b = {b.format()}"
            break
    checks.append(RelationCheck(relation="bialgebra", trials=samples, passed=failure is None, counterexample=failure))

    report = VerificationReport.from_checks(
        "hopf-axioms", checks, {"codim": codim, "degree_cap": degree_cap, "pair": pair.name}
    )
    logger.info("Hopf axiom suite finished", extra={"codim": codim, "pass": report.passed})
    return report
