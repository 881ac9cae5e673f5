"""
Relative Hopf-cyclic cochains of a Lie pair h < g with coefficients in a right
g-module M carrying the trivial comodule:

    C^n = M (x)_K  C (x) ... (x) C        C = U(g) / U(g)h+,  K = U(h)

Elements of C are combinations of normal-ordered monomials in the complement
generators. Every cochain space is cut at total PBW degree D and stored as a
quotient by the diagonal K-action, so cochains compare by canonical
representative.
"""

import random
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from math import factorial
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation

from app.models.reports import RelationCheck, VerificationReport
from app.services.algebra_core import UNIT, GeneratorSymbol, PBWMonomial, accumulate
from app.services.chevalley_eilenberg import Chain, ChevalleyEilenbergComplex, sort_wedge
from app.services.cyclic_complex import CyclicModule, verify_cyclic_relations
from app.services.lie_pairs import GModule, LieGenerator, LinearQuotient, LiePair
from app.utils.config import get_settings
from app.utils.exceptions import DegreeError, InconsistentScalarError, IndexOutOfRangeError, TruncationOverflowError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

Terms = Dict[PBWMonomial, Fraction]
Key = Tuple  # (m, c1, ..., cn)
KeyTerms = Dict[Key, Fraction]


def key_degree(key: Key) -> int:
    return sum(len(slot) for slot in key[1:])


def format_key(key: Key) -> str:
    slots = ["1" if not slot else "*".join(repr(g) for g in slot) for slot in key[1:]]
    return " ox ".join([f"m{key[0]}"] + slots)


def format_terms(terms: Mapping[Key, Fraction]) -> str:
    if not terms:
        return "0"
    parts = []
    for key, coeff in sorted(terms.items(), key=lambda kv: (kv[0][0], [len(s) for s in kv[0][1:]], str(kv[0]))):
        parts.append(f"{coeff} {format_key(key)}" if coeff != 1 else format_key(key))
    return " + ".join(parts)


class RelCochain:
    """A cochain stored as its canonical representative."""

    __slots__ = ("degree", "terms", "transfer")

    def __init__(self, degree: int, terms: Mapping[Key, Fraction], transfer: bool = False):
        self.degree = degree
        self.terms: KeyTerms = {k: Fraction(v) for k, v in terms.items() if v}
        self.transfer = transfer

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RelCochain):
            return NotImplemented
        return (self.degree, self.transfer, self.terms) == (other.degree, other.transfer, other.terms)

    def __add__(self, other: "RelCochain") -> "RelCochain":
        out = dict(self.terms)
        accumulate(out, other.terms)
        return RelCochain(self.degree, out, self.transfer)

    def __neg__(self) -> "RelCochain":
        return self.scale(-1)

    def __sub__(self, other: "RelCochain") -> "RelCochain":
        return self + (-other)

    def scale(self, value) -> "RelCochain":
        return RelCochain(self.degree, {k: v * value for k, v in self.terms.items()}, self.transfer)

    def is_zero(self) -> bool:
        return not self.terms

    def format(self) -> str:
        return format_terms(self.terms)

    def __repr__(self) -> str:
        return f"RelCochain({self.degree}, {self.format()})"


class QuotientCoalgebra:
    """The H-module coalgebra C = U(g)/U(g)h+ on top of the pair's PBW engine."""

    def __init__(self, pair: LiePair):
        self.pair = pair
        self.engine = pair.engine
        self._coproducts: Dict[Tuple[PBWMonomial, int], Dict[Tuple[PBWMonomial, ...], Fraction]] = {}

    def normal_form(self, words: Mapping[Tuple[GeneratorSymbol, ...], Fraction]) -> Terms:
        return self.engine.normal_form_terms(words)

    def project(self, terms: Mapping[PBWMonomial, Fraction]) -> Terms:
        """Drop every normal-ordered monomial with an h generator; those lie in U(g)h+."""
        out: Terms = {}
        for monomial, coeff in terms.items():
            if not any(self.pair.in_subalgebra(g) for g in monomial):
                accumulate(out, {monomial: coeff})
        return out

    def coproduct(self, monomial: PBWMonomial, parts: int = 2) -> Dict[Tuple[PBWMonomial, ...], Fraction]:
        """Iterated coproduct of a product of primitives: every assignment of factors to parts."""
        key = (monomial, parts)
        cached = self._coproducts.get(key)
        if cached is None:
            cached = {}
            for assignment in product(range(parts), repeat=len(monomial)):
                split = tuple(
                    PBWMonomial(g for g, slot in zip(monomial, assignment) if slot == part) for part in range(parts)
                )
                accumulate(cached, {split: Fraction(1)})
            self._coproducts[key] = cached
        return cached

    @staticmethod
    def counit(monomial: PBWMonomial) -> Fraction:
        return Fraction(0 if monomial else 1)

    def antipode(self, monomial: PBWMonomial) -> Terms:
        sign = -1 if len(monomial) % 2 else 1
        return {m: c * sign for m, c in self.engine.normal_word(tuple(reversed(monomial))).items()}

    def left_multiply(self, h: PBWMonomial, c: PBWMonomial) -> Terms:
        return self.project(self.engine.normal_word(h + c))

    def act_tensor(self, h: PBWMonomial, slots: Sequence[PBWMonomial]) -> KeyTerms:
        """Diagonal action h . (c1 (x) ... (x) cn) = h(1) c1 (x) ... (x) h(n) cn."""
        if not slots:
            value = self.counit(h)
            return {(): value} if value else {}
        out: KeyTerms = {}
        for parts, coeff in self.coproduct(h, len(slots)).items():
            factors = [self.left_multiply(part, slot) for part, slot in zip(parts, slots)]
            if not all(factors):
                continue
            for combo in product(*(f.items() for f in factors)):
                value = coeff
                for _, c in combo:
                    value *= c
                accumulate(out, {tuple(k for k, _ in combo): value})
        return out


def quotient_project(pair: LiePair, words: Mapping[Tuple[GeneratorSymbol, ...], int], degree_cap: Optional[int] = None) -> Terms:
    """Class in C of an element of U(g) given as words in the pair's generators."""
    cap = get_settings().relative_degree_cap if degree_cap is None else degree_cap
    coalgebra = QuotientCoalgebra(pair)
    normal = coalgebra.normal_form({tuple(w): Fraction(c) for w, c in words.items()})
    if any(len(m) > cap for m in normal):
        raise TruncationOverflowError(f"element exceeds the degree cap {cap}", {"cap": cap})
    return coalgebra.project(normal)


def coalgebra_ops(pair: LiePair, c: Mapping[PBWMonomial, Fraction]) -> Tuple[Dict[Tuple[PBWMonomial, PBWMonomial], Fraction], Fraction]:
    """Coproduct and counit of an element of C."""
    coalgebra = QuotientCoalgebra(pair)
    coproduct: Dict[Tuple[PBWMonomial, PBWMonomial], Fraction] = {}
    counit = Fraction(0)
    for monomial, coeff in c.items():
        accumulate(coproduct, coalgebra.coproduct(monomial), coeff)
        counit += coeff * coalgebra.counit(monomial)
    return coproduct, counit


def _lift_coproduct(coalgebra: QuotientCoalgebra, lift: Mapping[PBWMonomial, Fraction]) -> Dict[Tuple[PBWMonomial, PBWMonomial], Fraction]:
    out: Dict[Tuple[PBWMonomial, PBWMonomial], Fraction] = {}
    for monomial, coeff in lift.items():
        for (left, right), c in coalgebra.coproduct(monomial).items():
            projected_left, projected_right = coalgebra.project({left: 1}), coalgebra.project({right: 1})
            for l, a in projected_left.items():
                for r, b in projected_right.items():
                    accumulate(out, {(l, r): coeff * c * a * b})
    return out


def coproduct_lift_independence(pair: LiePair, trials: int = 10, seed: int = 0) -> Optional[str]:
    """Delta_C computed through c + u xi (xi in h) agrees with Delta_C(c); first failing lift otherwise."""
    if not pair.subalgebra:
        return None
    coalgebra = QuotientCoalgebra(pair)
    complement = [pair.symbol(i) for i in pair.complement]
    everything = [pair.symbol(i) for i in range(pair.algebra.dim)]
    for trial in range(trials):
        rng = random.Random(f"{seed}:lift:{trial}")
        c: Terms = {}
        for _ in range(2):
            word = tuple(rng.choice(complement) for _ in range(rng.randint(0, 2))) if complement else ()
            accumulate(c, coalgebra.normal_form({word: Fraction(rng.choice([-2, -1, 1, 2]))}))
        c = coalgebra.project(c)
        word = tuple(rng.choice(everything) for _ in range(rng.randint(0, 2)))
        xi = pair.symbol(rng.choice(pair.subalgebra))
        lift = dict(c)
        accumulate(lift, coalgebra.normal_form({word + (xi,): Fraction(rng.choice([-1, 1, 3]))}))
        expected, _ = coalgebra_ops(pair, c)
        if _lift_coproduct(coalgebra, lift) != expected:
            return f"lift of {c} through {word + (xi,)}"
    return None


def sayd_check(pair: LiePair, module: Optional[GModule] = None, degree: int = 2) -> Tuple[bool, Optional[str]]:
    """
    Stability and the anti-Yetter-Drinfeld condition for the trivial comodule:
    1 (x) m h = S(h(3)) h(1) (x) m h(2) for basis m and words h of length <= degree.
    The left side acts by the word, the right side by its normal form.
    """
    module = module or pair.module
    coalgebra = QuotientCoalgebra(pair)
    engine = pair.engine
    basis = [pair.symbol(i) for i in range(pair.algebra.dim)]
    for length in range(degree + 1):
        for word in product(basis, repeat=length):
            for m in range(module.dim):
                lhs: Dict[Tuple[PBWMonomial, int], Fraction] = {
                    (UNIT, m2): c for m2, c in module.act_word([g.index for g in word], m).items()
                }
                rhs: Dict[Tuple[PBWMonomial, int], Fraction] = {}
                for monomial, coeff in engine.normal_word(word).items():
                    for (first, second, third), c in coalgebra.coproduct(monomial, 3).items():
                        acted = module.act_word([g.index for g in second], m)
                        if not acted:
                            continue
                        outer = engine.multiply_terms(coalgebra.antipode(third), {first: Fraction(1)})
                        for h, a in outer.items():
                            for m2, b in acted.items():
                                accumulate(rhs, {(h, m2): coeff * c * a * b})
                if lhs != rhs:
                    witness = f"m{m} . {'*'.join(repr(g) for g in word) or '1'}"
                    logger.debug("SAYD condition fails", extra={"pair": pair.name, "witness": witness})
                    return False, witness
    return True, None


def adjoint_action_agreement(pair: LiePair, degree_cap: Optional[int] = None) -> bool:
    """On C, xi . c agrees with the class of xi c - c xi for xi in h."""
    cap = get_settings().relative_degree_cap if degree_cap is None else degree_cap
    coalgebra = QuotientCoalgebra(pair)
    complement = [pair.symbol(i) for i in pair.complement]
    for degree in range(cap + 1):
        for monomial in combinations_with_replacement(complement, degree):
            c = PBWMonomial(monomial)
            for index in pair.subalgebra:
                xi = PBWMonomial((pair.symbol(index),))
                left = coalgebra.left_multiply(xi, c)
                commutator: Terms = dict(coalgebra.engine.normal_word(xi + c))
                accumulate(commutator, coalgebra.engine.normal_word(c + xi), -1)
                if left != coalgebra.project(commutator):
                    return False
    return True


class RelativeCyclicModule(CyclicModule):
    """Faces, degeneracies and the cyclic operator on M (x)_K C^(x)n, cut at degree D."""

    def __init__(self, pair: LiePair, degree_cap: Optional[int] = None):
        cap = get_settings().relative_degree_cap if degree_cap is None else degree_cap
        if cap < 1:
            raise DegreeError(f"degree cap must be >= 1, got {cap}")
        self.pair = pair
        self.module = pair.module
        self.cap = cap
        self.coalgebra = QuotientCoalgebra(pair)
        self.name = f"relative {pair.name} {pair.module.name} D={cap}"
        self._complement = [pair.symbol(i) for i in pair.complement]
        self._monomials = {
            d: [PBWMonomial(m) for m in combinations_with_replacement(self._complement, d)] for d in range(cap + 1)
        }
        self._spaces: Dict[Tuple[int, bool], LinearQuotient] = {}

    # Spaces

    def basis(self, slots: int) -> List[Key]:
        """Keys (m, c1..c_slots) of total degree <= D."""
        keys: List[Key] = []

        def extend(prefix: Tuple[PBWMonomial, ...], budget: int) -> None:
            if len(prefix) == slots:
                keys.extend((m,) + prefix for m in range(self.module.dim))
                return
            for d in range(budget + 1):
                for monomial in self._monomials[d]:
                    extend(prefix + (monomial,), budget - d)

        extend((), self.cap)
        return keys

    def _relations(self, slots: int, symbols: Iterable[LieGenerator]) -> Iterable[KeyTerms]:
        for g in symbols:
            for key in self.basis(slots):
                relation: KeyTerms = {}
                for m2, c in self.module.act(g.index, key[0]).items():
                    accumulate(relation, {(m2,) + key[1:]: c})
                for tail, c in self.coalgebra.act_tensor(PBWMonomial((g,)), key[1:]).items():
                    accumulate(relation, {(key[0],) + tail: -c})
                if all(key_degree(k) <= self.cap for k in relation):
                    yield relation

    def space(self, degree: int, transfer: bool = False) -> LinearQuotient:
        """
        M (x)_K C^(x)n, or M (x)_H C^(x)(n+1) for the transfer side; relations
        that would leave the degree cap are left out.
        """
        cache_key = (degree, transfer)
        space = self._spaces.get(cache_key)
        if space is None:
            slots = degree + 1 if transfer else degree
            indices = range(self.pair.algebra.dim) if transfer else self.pair.subalgebra
            space = LinearQuotient(self.basis(slots), self._relations(slots, [self.pair.symbol(i) for i in indices]))
            self._spaces[cache_key] = space
            logger.debug(
                "Built coinvariant space",
                extra={"degree": degree, "transfer": transfer, "basis": len(space.basis), "dim": space.dim},
            )
        return space

    def make(self, degree: int, terms: Mapping[Key, Fraction], transfer: bool = False) -> RelCochain:
        slots = degree + 1 if transfer else degree
        for key in terms:
            if len(key) != slots + 1:
                raise DegreeError(f"cochain term {format_key(key)} does not have {slots} slots")
            if key_degree(key) > self.cap:
                raise TruncationOverflowError(
                    f"term {format_key(key)} exceeds the degree cap {self.cap}", {"cap": self.cap}
                )
        return RelCochain(degree, self.space(degree, transfer).reduce(terms), transfer)

    def random_key(self, slots: int, rng: random.Random, budget: Optional[int] = None) -> Key:
        budget = self.cap if budget is None else budget
        total = rng.randint(0, budget) if self._complement else 0
        cuts = sorted(rng.randint(0, total) for _ in range(max(slots - 1, 0)))
        sizes = [b - a for a, b in zip([0] + cuts, cuts + [total])] if slots else []
        return (rng.randrange(self.module.dim),) + tuple(
            PBWMonomial.from_symbols(rng.choice(self._complement) for _ in range(size)) for size in sizes
        )

    def random_terms(self, slots: int, rng: random.Random, terms: int = 3, budget: Optional[int] = None) -> KeyTerms:
        out: KeyTerms = {}
        for _ in range(terms):
            accumulate(out, {self.random_key(slots, rng, budget): Fraction(rng.choice([-2, -1, 1, 2]))})
        return out

    def random_cochain(self, degree: int, rng: random.Random) -> RelCochain:
        return self.make(degree, self.random_terms(degree, rng))

    def random_relation(self, degree: int, rng: random.Random) -> KeyTerms:
        """One generating relation m.xi (x) v - m (x) xi.v of the K-coinvariants."""
        if not self.pair.subalgebra:
            return {}
        xi = self.pair.symbol(rng.choice(self.pair.subalgebra))
        key = self.random_key(degree, rng)
        relation: KeyTerms = {}
        for m2, c in self.module.act(xi.index, key[0]).items():
            accumulate(relation, {(m2,) + key[1:]: c})
        for tail, c in self.coalgebra.act_tensor(PBWMonomial((xi,)), key[1:]).items():
            accumulate(relation, {(key[0],) + tail: -c})
        return relation

    # Raw operators on representatives

    def face_terms(self, i: int, terms: Mapping[Key, Fraction], n: int) -> KeyTerms:
        """delta_i into degree n; the last face appends 1 since m(-1) = 1."""
        if not 0 <= i <= n:
            raise IndexOutOfRangeError(f"face index {i} out of range 0..{n}")
        out: KeyTerms = {}
        for key, coeff in terms.items():
            m, slots = key[0], key[1:]
            if i == 0:
                accumulate(out, {(m, UNIT) + slots: coeff})
            elif i == n:
                accumulate(out, {(m,) + slots + (UNIT,): coeff})
            else:
                for (left, right), c in self.coalgebra.coproduct(slots[i - 1]).items():
                    accumulate(out, {(m,) + slots[: i - 1] + (left, right) + slots[i:]: coeff * c})
        return out

    def degeneracy_terms(self, i: int, terms: Mapping[Key, Fraction], n: int) -> KeyTerms:
        if not 0 <= i <= n:
            raise IndexOutOfRangeError(f"degeneracy index {i} out of range 0..{n}")
        out: KeyTerms = {}
        for key, coeff in terms.items():
            if not key[i + 1]:
                accumulate(out, {key[: i + 1] + key[i + 2:]: coeff})
        return out

    def leading_terms(self, terms: Mapping[Key, Fraction], append_unit: bool) -> KeyTerms:
        """
        m (x) h1 (x) rest  ->  m h1(1) (x) S(h1(2)) . (rest [(x) 1]).
        With the unit appended this is tau_n; without it, the extra degeneracy
        and the inverse transfer map. h1 may be any monomial of U(g).
        """
        out: KeyTerms = {}
        for key, coeff in terms.items():
            m, first, rest = key[0], key[1], key[2:]
            tail = rest + ((UNIT,) if append_unit else ())
            for (left, right), c in self.coalgebra.coproduct(first).items():
                acted = self.module.act_word([g.index for g in left], m)
                if not acted:
                    continue
                for s_monomial, s_coeff in self.coalgebra.antipode(right).items():
                    for tail_key, t_coeff in self.coalgebra.act_tensor(s_monomial, tail).items():
                        for m2, a in acted.items():
                            accumulate(out, {(m2,) + tail_key: coeff * c * s_coeff * t_coeff * a})
        return out

    # Cyclic module interface

    def face(self, i: int, c: RelCochain) -> RelCochain:
        n = c.degree + 1
        return self.make(n, self.face_terms(i, c.terms, n))

    def degeneracy(self, i: int, c: RelCochain) -> RelCochain:
        n = c.degree - 1
        return self.make(n, self.degeneracy_terms(i, c.terms, n))

    def cyclic(self, c: RelCochain) -> RelCochain:
        if c.degree == 0:
            raise DegreeError("the cyclic operator is defined from degree 1")
        return self.make(c.degree, self.leading_terms(c.terms, append_unit=True))

    def extra_degeneracy(self, c: RelCochain) -> RelCochain:
        """sigma_(-1) = sigma_n tau_(n+1) : C^(n+1) -> C^n."""
        if c.degree == 0:
            raise DegreeError("the extra degeneracy is defined from degree 1")
        return self.make(c.degree - 1, self.leading_terms(c.terms, append_unit=False))

    def render(self, c: RelCochain) -> str:
        return c.format()

    # (b, B)

    def normalize(self, c: RelCochain) -> RelCochain:
        return self.make(c.degree, {k: v for k, v in c.terms.items() if all(k[1:])}, c.transfer)

    def hochschild_b(self, c: RelCochain) -> RelCochain:
        n = c.degree + 1
        out: KeyTerms = {}
        for i in range(n + 1):
            accumulate(out, self.face_terms(i, c.terms, n), -1 if i % 2 else 1)
        return self.make(n, out)

    def connes_B(self, c: RelCochain) -> RelCochain:
        """B = sum_i (-1)^(ni) tau_n^i sigma_(-1) on the normalized part."""
        if c.degree == 0:
            raise DegreeError("B is defined from degree 1")
        n = c.degree - 1
        power = self.extra_degeneracy(self.normalize(c))
        if n == 0:
            return power
        total = power
        for i in range(1, n + 1):
            power = self.cyclic(power)
            total = total + (power.scale(-1) if (n * i) % 2 else power)
        return total

    # Transfer to M (x)_H C^(x)(n+1)

    def transfer_psi(self, c: RelCochain) -> RelCochain:
        return self.make(c.degree, {(k[0], UNIT) + k[1:]: v for k, v in c.terms.items()}, transfer=True)

    def transfer_phi(self, x: RelCochain) -> RelCochain:
        return self.make(x.degree, self.leading_terms(x.terms, append_unit=False))

    def phi_of_lift(self, degree: int, terms: Mapping[Key, Fraction]) -> RelCochain:
        """Inverse transfer evaluated on a representative whose first slot is any lift in U(g)."""
        return self.make(degree, self.leading_terms(terms, append_unit=False))


def relative_cyclic_ops(pair: LiePair, degree_cap: Optional[int] = None) -> RelativeCyclicModule:
    return RelativeCyclicModule(pair, degree_cap)


def transfer_psi(module: RelativeCyclicModule, c: RelCochain) -> RelCochain:
    return module.transfer_psi(c)


def transfer_phi(module: RelativeCyclicModule, x: RelCochain) -> RelCochain:
    return module.transfer_phi(x)


# Comparison with the Chevalley-Eilenberg complex


def antisymmetrize_alpha(module: RelativeCyclicModule, m: int, positions: Sequence[int]) -> RelCochain:
    """alpha(m (x) x_p1 ^ ... ^ x_pn) = 1/n! sum sign(s) m (x) x_s(1) (x) ... (x) x_s(n)."""
    n = len(positions)
    if n > module.cap:
        raise TruncationOverflowError(f"wedge of degree {n} exceeds the degree cap {module.cap}", {"cap": module.cap})
    symbols = [module.pair.symbol(module.pair.complement[p]) for p in positions]
    out: KeyTerms = {}
    for order in permutations(range(n)):
        sign = Permutation(list(order)).signature() if n > 1 else 1
        key = (m,) + tuple(PBWMonomial((symbols[i],)) for i in order)
        accumulate(out, {key: Fraction(sign, factorial(n))})
    return module.make(n, out)


def project_mu(module: RelativeCyclicModule, ce: ChevalleyEilenbergComplex, c: RelCochain) -> Chain:
    """Wedge of the linear parts of the slots, in M (x)_h Lambda^n(g/h)."""
    positions = {index: p for p, index in enumerate(module.pair.complement)}
    chain: Chain = {}
    for key, coeff in c.terms.items():
        slots = key[1:]
        if any(len(slot) != 1 for slot in slots):
            continue
        sign, wedge = sort_wedge(tuple(positions[slot[0].index] for slot in slots))
        if sign:
            accumulate(chain, {(key[0], wedge): coeff * sign})
    return ce.reduce_chain(c.degree, chain)


def derive_cn(n: int, pair: LiePair, module: Optional[GModule] = None, degree_cap: Optional[int] = None) -> Optional[Fraction]:
    """
    The scalar c_n with mu B alpha = c_n d_h on M (x)_h Lambda^n(g/h); None when
    both sides vanish on every basis wedge.
    """
    if not 1 <= n <= 3:
        raise DegreeError(f"derive_cn supports degrees 1..3, got {n}")
    if module is not None:
        pair = pair.with_module(module)
    cap = max(get_settings().relative_degree_cap if degree_cap is None else degree_cap, n)
    rel = RelativeCyclicModule(pair, cap)
    ce = ChevalleyEilenbergComplex(pair)
    samples = []
    for m in range(pair.module.dim):
        for wedge in ce.wedges(n):
            lhs = project_mu(rel, ce, rel.connes_B(antisymmetrize_alpha(rel, m, wedge)))
            rhs = ce.reduce_chain(n - 1, ce.boundary({(m, wedge): Fraction(1)}))
            samples.append(((m, wedge), lhs, rhs))
    scalar: Optional[Fraction] = None
    for _, lhs, rhs in samples:
        if rhs:
            key = next(iter(rhs))
            scalar = lhs.get(key, Fraction(0)) / rhs[key]
            break
    if scalar is None:
        stray = [label for label, lhs, _ in samples if lhs]
        if stray:
            raise InconsistentScalarError("B alpha is nonzero where the boundary vanishes", {"witness": str(stray[0])})
        logger.info("derive_cn is indeterminate", extra={"degree": n, "pair": pair.name})
        return None
    for label, lhs, rhs in samples:
        residual = dict(lhs)
        accumulate(residual, rhs, -scalar)
        if residual:
            raise InconsistentScalarError(
                f"no scalar c_{n} fits every wedge",
                {"witness": str(label), "scalar": str(scalar), "residual": {str(k): str(v) for k, v in residual.items()}},
            )
    logger.info("derive_cn found a scalar", extra={"degree": n, "pair": pair.name, "c_n": str(scalar)})
    return scalar


# Suite


def _tally(relation: str, degree: int, trials: int, failure: Optional[str]) -> RelationCheck:
    return RelationCheck(relation=relation, degree=degree, trials=trials, passed=failure is None, counterexample=failure)


def _first_failure(trials: int, seed: str, attempt: Callable[[random.Random], Optional[str]]) -> Optional[str]:
    for trial in range(trials):
        failure = attempt(random.Random(f"{seed}:{trial}"))
        if failure is not None:
            return failure
    return None


def verify_relative_suite(
    pair: LiePair,
    n_max: int = 2,
    trials: int = 15,
    seed: int = 0,
    degree_cap: Optional[int] = None,
) -> VerificationReport:
    """Cyclic relations, transfer maps, coset well-definedness and the CE comparison."""
    rel = RelativeCyclicModule(pair, degree_cap)
    ce = ChevalleyEilenbergComplex(pair)
    checks: List[RelationCheck] = []

    ok, witness = sayd_check(pair)
    checks.append(_tally("stable anti-Yetter-Drinfeld (trivial comodule)", 0, 1, None if ok else witness))
    checks.append(_tally("Delta_C independent of the lift", 0, 10, coproduct_lift_independence(pair, 10, seed)))
    checks.append(_tally("xi . c = ad(xi) c on C", 0, 1, None if adjoint_action_agreement(pair, rel.cap) else pair.name))

    checks.extend(verify_cyclic_relations(rel, n_max, trials, seed).checks)

    for n in range(1, n_max + 1):
        def extra(rng: random.Random, n: int = n) -> Optional[str]:
            c = rel.random_cochain(n + 1, rng)
            return None if rel.extra_degeneracy(c) == rel.degeneracy(n, rel.cyclic(c)) else c.format()

        checks.append(_tally("sigma_(-1) = sigma_n tau_(n+1)", n, trials, _first_failure(trials, f"{seed}:extra:{n}", extra)))

        def well_defined(rng: random.Random, n: int = n) -> Optional[str]:
            representative = rel.random_terms(n, rng)
            shifted = dict(representative)
            accumulate(shifted, rel.random_relation(n, rng))
            operators = [("tau", lambda t: rel.leading_terms(t, True), n)]
            operators += [(f"delta_{i}", lambda t, i=i: rel.face_terms(i, t, n + 1), n + 1) for i in range(n + 2)]
            operators += [(f"sigma_{i}", lambda t, i=i: rel.degeneracy_terms(i, t, n - 1), n - 1) for i in range(n)]
            for label, op, out_degree in operators:
                if rel.make(out_degree, op(representative)) != rel.make(out_degree, op(shifted)):
                    return f"{label} on {format_terms(representative)}"
            return None

        checks.append(_tally("operators well defined on K-coinvariants", n, 10, _first_failure(10, f"{seed}:coset:{n}", well_defined)))

    for n in range(0, n_max + 1):
        def phi_psi(rng: random.Random, n: int = n) -> Optional[str]:
            c = rel.random_cochain(n, rng)
            return None if rel.transfer_phi(rel.transfer_psi(c)) == c else c.format()

        def psi_phi(rng: random.Random, n: int = n) -> Optional[str]:
            x = rel.make(n, rel.random_terms(n + 1, rng), transfer=True)
            return None if rel.transfer_psi(rel.transfer_phi(x)) == x else x.format()

        def phi_lift(rng: random.Random, n: int = n) -> Optional[str]:
            if not pair.subalgebra:
                return None
            raw = rel.random_terms(n + 1, rng, budget=rel.cap - 1)
            xi = pair.symbol(rng.choice(pair.subalgebra))
            lifted = dict(raw)
            for key, coeff in raw.items():
                for monomial, c in pair.engine.normal_word(key[1] + (xi,)).items():
                    accumulate(lifted, {(key[0], monomial) + key[2:]: coeff * c})
            return None if rel.phi_of_lift(n, lifted) == rel.phi_of_lift(n, raw) else format_terms(raw)

        checks.append(_tally("Phi Psi = id", n, 20, _first_failure(20, f"{seed}:phipsi:{n}", phi_psi)))
        checks.append(_tally("Psi Phi = id", n, 20, _first_failure(20, f"{seed}:psiphi:{n}", psi_phi)))
        checks.append(_tally("Phi(h0 k) = Phi(h0), k in K+", n, 10, _first_failure(10, f"{seed}:philift:{n}", phi_lift)))

    checks.append(_tally("d_h d_h = 0", 0, 1, None if ce.boundary_squared_vanishes() else pair.name))
    checks.append(_tally("d d = 0 on h-equivariant cochains", 0, 1, None if ce.differential_squared_vanishes() else pair.name))

    top = min(3, ce.rank, rel.cap)
    for n in range(0, top + 1):
        mu_alpha = None
        b_alpha = None
        for m in range(pair.module.dim):
            for wedge in ce.wedges(n):
                alpha = antisymmetrize_alpha(rel, m, wedge)
                expected = ce.reduce_chain(n, {(m, wedge): Fraction(1)})
                if project_mu(rel, ce, alpha) != expected and mu_alpha is None:
                    mu_alpha = f"m{m} ^ {wedge}"
                if not rel.normalize(rel.hochschild_b(alpha)).is_zero() and b_alpha is None:
                    b_alpha = f"m{m} ^ {wedge}"
        checks.append(_tally("mu alpha = id", n, len(ce.chain_basis(n)), mu_alpha))
        checks.append(_tally("b alpha = 0", n, len(ce.chain_basis(n)), b_alpha))

    for n in range(1, min(top, rel.cap - 1) + 1):
        def mu_b(rng: random.Random, n: int = n) -> Optional[str]:
            c = rel.normalize(rel.random_cochain(n - 1, rng))
            return None if not project_mu(rel, ce, rel.hochschild_b(c)) else c.format()

        checks.append(_tally("mu b = 0", n, trials, _first_failure(trials, f"{seed}:mub:{n}", mu_b)))

    report = VerificationReport.from_checks(
        "relative", checks, {"pair": pair.name, "module": pair.module.name, "degree_cap": rel.cap, "n_max": n_max, "seed": seed}
    )
    logger.info("Relative suite finished", extra={"pair": pair.name, "pass": report.passed})
    return report
