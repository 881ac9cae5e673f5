"""
PBW rewriting engine and the Lie algebra of transverse generators.

The engine is generic: it normalizes words in any ordered set of generators
given a bracket function, by rewriting the first descent `uv -> vu + [u, v]`,
after first rewriting any letter an optional reduction marks non-canonical.
The transverse algebra uses the generators

    X[k]          horizontal vector fields
    Y[i,j]        vertical fields (lower i, upper j)
    d[i;j,k;tail] the delta family, symmetric in (j, k) and in the tail

ordered Delta < X < Y, lexicographically on indices inside each block.
In codimension n >= 2 the deltas also obey the structure identity of the flat
frame bundle; normal forms keep only deltas whose lower indices j <= k <= tail
are sorted as a whole, so each codimension has its own engine.
Coefficients are exact `Fraction`s.
"""

import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from app.models.reports import RelationCheck, VerificationReport
from app.utils.exceptions import CodimensionMismatchError, IndexOutOfRangeError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class GeneratorSymbol:
    """Base of the generator tagged union; ordering is by `sort_key`."""

    def sort_key(self) -> Tuple:
        raise NotImplementedError

    def indices(self) -> Tuple[int, ...]:
        raise NotImplementedError

    def __lt__(self, other: "GeneratorSymbol") -> bool:
        return self.sort_key() < other.sort_key()

    def __gt__(self, other: "GeneratorSymbol") -> bool:
        return self.sort_key() > other.sort_key()

    def __le__(self, other: "GeneratorSymbol") -> bool:
        return self.sort_key() <= other.sort_key()

    def __ge__(self, other: "GeneratorSymbol") -> bool:
        return self.sort_key() >= other.sort_key()


@dataclass(frozen=True)
class HorizX(GeneratorSymbol):
    k: int

    def __post_init__(self):
        _require_positive(self.k)

    def sort_key(self) -> Tuple:
        return (1, (self.k,))

    def indices(self) -> Tuple[int, ...]:
        return (self.k,)


@dataclass(frozen=True)
class VertY(GeneratorSymbol):
    """Y_i^j: lower index `i`, upper index `j`."""

    i: int
    j: int

    def __post_init__(self):
        _require_positive(self.i, self.j)

    def sort_key(self) -> Tuple:
        return (2, (self.i, self.j))

    def indices(self) -> Tuple[int, ...]:
        return (self.i, self.j)


@dataclass(frozen=True)
class Delta(GeneratorSymbol):
    """delta^i_{jk;tail}, stored with j <= k and a sorted tail."""

    i: int
    j: int
    k: int
    tail: Tuple[int, ...] = ()

    def __post_init__(self):
        j, k = sorted((self.j, self.k))
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "tail", tuple(sorted(self.tail)))
        _require_positive(self.i, self.j, self.k, *self.tail)

    def sort_key(self) -> Tuple:
        return (0, (self.i, self.j, self.k, self.tail))

    def indices(self) -> Tuple[int, ...]:
        return (self.i, self.j, self.k) + self.tail

    @property
    def lowers(self) -> Tuple[int, ...]:
        return (self.j, self.k) + self.tail

    def with_lowers(self, lowers: Sequence[int], upper: Optional[int] = None) -> "Delta":
        return Delta(self.i if upper is None else upper, lowers[0], lowers[1], tuple(lowers[2:]))


def _require_positive(*indices: int) -> None:
    for index in indices:
        if not isinstance(index, int) or index < 1:
            raise IndexOutOfRangeError(f"generator index {index!r} must be a positive integer")


def delta_n(order: int) -> Delta:
    """Codimension-1 abbreviation: d1 = d[1;1,1], d_{n+1} = [X, d_n]."""
    if order < 1:
        raise IndexOutOfRangeError(f"delta order {order} must be >= 1")
    return Delta(1, 1, 1, (1,) * (order - 1))


X1 = HorizX(1)
Y11 = VertY(1, 1)


def check_symbol(symbol: GeneratorSymbol, codim: int) -> GeneratorSymbol:
    """Raise unless every index of `symbol` lies in 1..codim."""
    bad = [index for index in symbol.indices() if index > codim]
    if bad:
        raise IndexOutOfRangeError(
            f"index {bad[0]} out of range 1..{codim}",
            {"symbol": repr(symbol), "codim": codim},
        )
    return symbol


class PBWMonomial(tuple):
    """
    Sorted tuple of generator symbols. Equality and hashing are the tuple's.
    """

    __slots__ = ()

    @classmethod
    def from_symbols(cls, symbols: Iterable[GeneratorSymbol]) -> "PBWMonomial":
        return cls(sorted(symbols))

    @property
    def degree(self) -> int:
        return len(self)

    @property
    def deltas(self) -> Tuple[Delta, ...]:
        return tuple(g for g in self if isinstance(g, Delta))

    @property
    def xs(self) -> Tuple[HorizX, ...]:
        return tuple(g for g in self if isinstance(g, HorizX))

    @property
    def ys(self) -> Tuple[VertY, ...]:
        return tuple(g for g in self if isinstance(g, VertY))

    def sort_key(self) -> Tuple:
        return (len(self), tuple(g.sort_key() for g in self))


UNIT = PBWMonomial(())

Terms = Dict[PBWMonomial, Fraction]
Word = Tuple[GeneratorSymbol, ...]
WordTerms = Dict[Word, Fraction]
BracketFn = Callable[[GeneratorSymbol, GeneratorSymbol], Dict[GeneratorSymbol, Fraction]]
ReduceFn = Callable[[GeneratorSymbol], Optional[WordTerms]]


def accumulate(target: Dict, source: Mapping, scale: Scalar = 1) -> Dict:
    """target += scale * source, dropping cancelled entries."""
    for key, coeff in source.items():
        value = target.get(key, 0) + scale * coeff
        if value:
            target[key] = value
        else:
            target.pop(key, None)
    return target


class PBWEngine:
    """
    Normal-form rewriting for the enveloping algebra of an ordered Lie algebra,
    optionally divided by relations that rewrite single letters.

    `reduce` maps a letter to the words it rewrites to, or None when the
    letter is already canonical. Word normal forms are memoized; the memo
    table is append-only and guarded by a lock, so one engine can be shared
    across threads.
    """

    def __init__(self, bracket: BracketFn, name: str, reduce: Optional[ReduceFn] = None):
        self.name = name
        self._bracket = bracket
        self._reduce = reduce
        self._bracket_cache: Dict[Tuple[GeneratorSymbol, GeneratorSymbol], Dict[GeneratorSymbol, Fraction]] = {}
        self._reduce_cache: Dict[GeneratorSymbol, Optional[WordTerms]] = {}
        self._word_cache: Dict[Word, Terms] = {}
        self._lock = threading.Lock()

    def bracket(self, a: GeneratorSymbol, b: GeneratorSymbol) -> Dict[GeneratorSymbol, Fraction]:
        key = (a, b)
        cached = self._bracket_cache.get(key)
        if cached is None:
            cached = {g: Fraction(c) for g, c in self._bracket(a, b).items() if c}
            with self._lock:
                self._bracket_cache[key] = cached
        return cached

    def reduced_letter(self, symbol: GeneratorSymbol) -> Optional[WordTerms]:
        if self._reduce is None:
            return None
        if symbol not in self._reduce_cache:
            value = self._reduce(symbol)
            with self._lock:
                self._reduce_cache.setdefault(symbol, value)
        return self._reduce_cache[symbol]

    def _replace(self, word: Word, pos: int) -> WordTerms:
        out: WordTerms = {}
        for replacement, c in self.reduced_letter(word[pos]).items():
            accumulate(out, {word[:pos] + replacement + word[pos + 1:]: c})
        return out

    def _swap(self, word: Word, pos: int) -> WordTerms:
        a, b = word[pos], word[pos + 1]
        out: WordTerms = {word[:pos] + (b, a) + word[pos + 2:]: Fraction(1)}
        for g, c in self.bracket(a, b).items():
            accumulate(out, {word[:pos] + (g,) + word[pos + 2:]: c})
        return out

    def _step(self, word: Word) -> Optional[WordTerms]:
        """One rewrite of the first non-canonical letter, else of the first descent; None if normal."""
        for pos, symbol in enumerate(word):
            if self.reduced_letter(symbol) is not None:
                return self._replace(word, pos)
        for pos in range(len(word) - 1):
            if word[pos + 1] < word[pos]:
                return self._swap(word, pos)
        return None

    def _remember(self, word: Word, terms: Terms) -> None:
        with self._lock:
            self._word_cache.setdefault(word, terms)

    def normal_word(self, word: Sequence[GeneratorSymbol]) -> Terms:
        """Normal form of a word; the returned mapping must not be mutated."""
        word = tuple(word)
        cached = self._word_cache.get(word)
        if cached is not None:
            return cached
        steps: Dict[Word, Optional[WordTerms]] = {}
        stack: List[Word] = [word]
        while stack:
            current = stack[-1]
            if current in self._word_cache:
                stack.pop()
                continue
            if current not in steps:
                steps[current] = self._step(current)
            step = steps[current]
            if step is None:
                self._remember(current, {PBWMonomial(current): Fraction(1)})
                stack.pop()
                continue
            pending = [child for child in step if child not in self._word_cache]
            if pending:
                stack.extend(pending)
                continue
            out: Terms = {}
            for child, c in step.items():
                accumulate(out, self._word_cache[child], c)
            self._remember(current, out)
            stack.pop()
        return self._word_cache[word]

    def multiply_terms(self, left: Mapping[PBWMonomial, Fraction], right: Mapping[PBWMonomial, Fraction]) -> Terms:
        out: Terms = {}
        for m1, c1 in left.items():
            for m2, c2 in right.items():
                accumulate(out, self.normal_word(m1 + m2), c1 * c2)
        return out

    def normal_form_terms(self, words: Mapping[Word, Scalar]) -> Terms:
        out: Terms = {}
        for word, coeff in words.items():
            accumulate(out, self.normal_word(word), Fraction(coeff))
        return out

    def brute_force_normal_form(self, word: Sequence[GeneratorSymbol], rng: random.Random) -> Terms:
        """
        Unmemoized rewriting that picks the pending word and the rewrite at random.
        Used as an oracle for confluence of `normal_word`.
        """
        pending: WordTerms = {tuple(word): Fraction(1)}
        done: Terms = {}
        while pending:
            current = rng.choice(list(pending))
            coeff = pending.pop(current)
            moves = [(p, self._replace) for p, g in enumerate(current) if self.reduced_letter(g) is not None]
            moves += [(p, self._swap) for p in range(len(current) - 1) if current[p + 1] < current[p]]
            if not moves:
                accumulate(done, {PBWMonomial(current): coeff})
                continue
            p, rewrite = rng.choice(moves)
            accumulate(pending, rewrite(current, p), coeff)
        return done

    def jacobi_defect(self, g1: GeneratorSymbol, g2: GeneratorSymbol, g3: GeneratorSymbol) -> Dict[GeneratorSymbol, Fraction]:
        """[[g1,g2],g3] + [[g2,g3],g1] + [[g3,g1],g2] as a generator combination."""
        total: Dict[GeneratorSymbol, Fraction] = {}
        for a, b, c in ((g1, g2, g3), (g2, g3, g1), (g3, g1, g2)):
            for g, coeff in self.bracket(a, b).items():
                accumulate(total, self.bracket(g, c), coeff)
        return total


def hn_bracket(a: GeneratorSymbol, b: GeneratorSymbol) -> Dict[GeneratorSymbol, Fraction]:
    """Structure constants of the transverse Lie algebra (codimension independent)."""
    if a == b:
        return {}
    if isinstance(a, HorizX) and isinstance(b, HorizX):
        return {}
    if isinstance(a, Delta) and isinstance(b, Delta):
        return {}
    if isinstance(a, VertY) and isinstance(b, VertY):
        out: Dict[GeneratorSymbol, Fraction] = {}
        if a.j == b.i:
            accumulate(out, {VertY(a.i, b.j): Fraction(1)})
        if a.i == b.j:
            accumulate(out, {VertY(b.i, a.j): Fraction(-1)})
        return out
    if isinstance(a, VertY) and isinstance(b, HorizX):
        return {HorizX(a.i): Fraction(1)} if a.j == b.k else {}
    if isinstance(a, HorizX) and isinstance(b, Delta):
        return {Delta(b.i, b.j, b.k, b.tail + (a.k,)): Fraction(1)}
    if isinstance(a, VertY) and isinstance(b, Delta):
        out = {}
        lowers = list(b.lowers)
        for pos, index in enumerate(lowers):
            if index == a.j:
                replaced = lowers[:pos] + [a.i] + lowers[pos + 1:]
                accumulate(out, {b.with_lowers(replaced): Fraction(1)})
        if b.i == a.i:
            accumulate(out, {b.with_lowers(lowers, upper=a.j): Fraction(-1)})
        return out
    return {g: -c for g, c in hn_bracket(b, a).items()}


def is_canonical(symbol: GeneratorSymbol) -> bool:
    """A delta is canonical when its lower indices are sorted as a whole: j <= k <= tail."""
    return not isinstance(symbol, Delta) or not symbol.tail or symbol.k <= symbol.tail[0]


def _derived_product(left: Delta, right: Delta, tail: Tuple[int, ...]) -> WordTerms:
    """ad X_tail of the commuting product left*right, by the Leibniz rule."""
    out: WordTerms = {}
    for sides in product((0, 1), repeat=len(tail)):
        extra: Tuple[List[int], List[int]] = ([], [])
        for side, index in zip(sides, tail):
            extra[side].append(index)
        word = (
            Delta(left.i, left.j, left.k, left.tail + tuple(extra[0])),
            Delta(right.i, right.j, right.k, right.tail + tuple(extra[1])),
        )
        accumulate(out, {word: Fraction(1)})
    return out


def flat_rewrite(symbol: GeneratorSymbol, codim: int) -> Optional[WordTerms]:
    """
    Rewrite a non-canonical delta by the structure identity of the flat frame bundle,

        d[i;j,k;l] = d[i;j,l;k] + sum_s (d[i;s,k] d[s;j,l] - d[i;s,l] d[s;j,k]),

    differentiated along the rest of the tail. None for canonical letters.
    """
    if is_canonical(symbol):
        return None
    i, j, k = symbol.i, symbol.j, symbol.k
    l, rest = symbol.tail[0], symbol.tail[1:]
    out: WordTerms = {(Delta(i, j, l, (k,) + rest),): Fraction(1)}
    for s in range(1, codim + 1):
        accumulate(out, _derived_product(Delta(i, s, k), Delta(s, j, l), rest))
        accumulate(out, _derived_product(Delta(i, s, l), Delta(s, j, k), rest), -1)
    return out


_hn_engines: Dict[int, PBWEngine] = {}
_hn_engines_lock = threading.Lock()


def get_hn_engine(codim: int = 1) -> PBWEngine:
    """Rewriting engine of H_n; the structure identity makes normal forms depend on n."""
    engine = _hn_engines.get(codim)
    if engine is None:
        with _hn_engines_lock:
            engine = _hn_engines.setdefault(
                codim, PBWEngine(hn_bracket, f"transverse[{codim}]", partial(flat_rewrite, codim=codim))
            )
    return engine


class HopfElement:
    """
    Exact sparse linear combination of PBW monomials of a fixed codimension.
    Treated as immutable: arithmetic always returns new elements.
    """

    __slots__ = ("terms", "codim")

    def __init__(self, terms: Optional[Mapping[PBWMonomial, Scalar]] = None, codim: int = 1):
        self.terms: Terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}
        self.codim = codim

    @classmethod
    def zero(cls, codim: int = 1) -> "HopfElement":
        return cls({}, codim)

    @classmethod
    def one(cls, codim: int = 1) -> "HopfElement":
        return cls({UNIT: 1}, codim)

    @classmethod
    def scalar(cls, value: Scalar, codim: int = 1) -> "HopfElement":
        return cls({UNIT: value}, codim)

    @classmethod
    def generator(cls, symbol: GeneratorSymbol, codim: int = 1) -> "HopfElement":
        check_symbol(symbol, codim)
        return cls(get_hn_engine(codim).normal_word((symbol,)), codim)

    @classmethod
    def from_word(cls, word: Sequence[GeneratorSymbol], codim: int = 1, coeff: Scalar = 1) -> "HopfElement":
        for symbol in word:
            check_symbol(symbol, codim)
        return cls({m: c * coeff for m, c in get_hn_engine(codim).normal_word(word).items()}, codim)

    def _check(self, other: "HopfElement") -> None:
        if other.codim != self.codim:
            raise CodimensionMismatchError(
                f"codimension {self.codim} does not match {other.codim}",
                {"left": self.codim, "right": other.codim},
            )

    def __add__(self, other: "HopfElement") -> "HopfElement":
        if not isinstance(other, HopfElement):
            other = HopfElement.scalar(other, self.codim)
        self._check(other)
        return HopfElement(accumulate(dict(self.terms), other.terms), self.codim)

    __radd__ = __add__

    def __neg__(self) -> "HopfElement":
        return HopfElement({m: -c for m, c in self.terms.items()}, self.codim)

    def __sub__(self, other: "HopfElement") -> "HopfElement":
        if not isinstance(other, HopfElement):
            other = HopfElement.scalar(other, self.codim)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "HopfElement":
        return HopfElement.scalar(other, self.codim) - self

    def __mul__(self, other: Union["HopfElement", Scalar]) -> "HopfElement":
        if isinstance(other, HopfElement):
            return multiply(self, other)
        return HopfElement({m: c * other for m, c in self.terms.items()}, self.codim)

    def __rmul__(self, other: Scalar) -> "HopfElement":
        return HopfElement({m: other * c for m, c in self.terms.items()}, self.codim)

    def __pow__(self, exponent: int) -> "HopfElement":
        result = HopfElement.one(self.codim)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = HopfElement.scalar(other, self.codim)
        if not isinstance(other, HopfElement):
            return NotImplemented
        return self.codim == other.codim and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get(UNIT, Fraction(0))

    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=-1)

    def top_part(self) -> "HopfElement":
        top = self.degree()
        return HopfElement({m: c for m, c in self.terms.items() if m.degree == top}, self.codim)

    def format(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"HopfElement({self.format()!r}, codim={self.codim})"


def bracket(g1: GeneratorSymbol, g2: GeneratorSymbol, codim: int = 1) -> HopfElement:
    check_symbol(g1, codim)
    check_symbol(g2, codim)
    engine = get_hn_engine(codim)
    return HopfElement(engine.normal_form_terms({(g,): c for g, c in engine.bracket(g1, g2).items()}), codim)


def normal_form(words: Mapping[Tuple[GeneratorSymbol, ...], Scalar], codim: int = 1) -> HopfElement:
    """Normal form of a formal noncommutative polynomial given as {word: coefficient}."""
    for word in words:
        for symbol in word:
            check_symbol(symbol, codim)
    return HopfElement(get_hn_engine(codim).normal_form_terms(words), codim)


def multiply(a: HopfElement, b: HopfElement) -> HopfElement:
    a._check(b)
    return HopfElement(get_hn_engine(a.codim).multiply_terms(a.terms, b.terms), a.codim)


def jacobi_check(g1: GeneratorSymbol, g2: GeneratorSymbol, g3: GeneratorSymbol, codim: Optional[int] = None) -> bool:
    if codim is not None:
        for symbol in (g1, g2, g3):
            check_symbol(symbol, codim)
    return not get_hn_engine(codim or 1).jacobi_defect(g1, g2, g3)


def brute_force_normal_form(word: Sequence[GeneratorSymbol], rng: random.Random, codim: int = 1) -> HopfElement:
    return HopfElement(get_hn_engine(codim).brute_force_normal_form(word, rng), codim)


def generators(codim: int, tail_cap: int) -> List[GeneratorSymbol]:
    """Canonical generators of codimension `codim` with Delta tails of length <= tail_cap, sorted."""
    indices = range(1, codim + 1)
    symbols: List[GeneratorSymbol] = []
    for i in indices:
        for j in indices:
            for k in range(j, codim + 1):
                for length in range(tail_cap + 1):
                    for tail in combinations_with_replacement(range(k, codim + 1), length):
                        symbols.append(Delta(i, j, k, tail))
    symbols.extend(HorizX(k) for k in indices)
    symbols.extend(VertY(i, j) for i in indices for j in indices)
    return sorted(symbols)


def pbw_basis(codim: int, degree_cap: int, tail_cap: Optional[int] = None) -> List[PBWMonomial]:
    """PBW monomials of degree <= degree_cap; tails default to the degree cap."""
    gens = generators(codim, degree_cap if tail_cap is None else tail_cap)
    basis = []
    for degree in range(degree_cap + 1):
        basis.extend(PBWMonomial(word) for word in combinations_with_replacement(gens, degree))
    return basis


def random_word(rng: random.Random, codim: int, max_length: int, tail_cap: int = 1) -> Tuple[GeneratorSymbol, ...]:
    gens = generators(codim, tail_cap)
    return tuple(rng.choice(gens) for _ in range(rng.randint(0, max_length)))


def random_element(rng: random.Random, codim: int, degree_cap: int, terms: int = 3, tail_cap: int = 1) -> HopfElement:
    words = {}
    for _ in range(terms):
        words[random_word(rng, codim, degree_cap, tail_cap)] = rng.choice([-2, -1, 1, 2, Fraction(1, 2)])
    return normal_form(words, codim)


# Rendering


def format_symbol(symbol: GeneratorSymbol, codim: int) -> str:
    if codim == 1:
        if isinstance(symbol, HorizX):
            return "X"
        if isinstance(symbol, VertY):
            return "Y"
        if len(symbol.tail) < 9:
            return f"d{len(symbol.tail) + 1}"
    if isinstance(symbol, HorizX):
        return f"X[{symbol.k}]"
    if isinstance(symbol, VertY):
        return f"Y[{symbol.i},{symbol.j}]"
    text = f"d[{symbol.i};{symbol.j},{symbol.k}"
    if symbol.tail:
        text += ";" + ",".join(str(index) for index in symbol.tail)
    return text + "]"


def format_monomial(monomial: PBWMonomial, codim: int) -> str:
    if not monomial:
        return "1"
    parts: List[str] = []
    run_symbol, run_length = monomial[0], 0
    for symbol in list(monomial) + [None]:
        if symbol == run_symbol:
            run_length += 1
            continue
        rendered = format_symbol(run_symbol, codim)
        parts.append(rendered if run_length == 1 else f"{rendered}^{run_length}")
        run_symbol, run_length = symbol, 1
    return "*".join(parts)


def format_linear(rendered_terms: Iterable[Tuple[str, Fraction]]) -> str:
    """
    Join (rendering, coefficient) pairs. A rendering that starts with the unit
    slot "1" takes the coefficient in that slot, so "3" and "2 ox X" parse back.
    """
    pieces: List[str] = []
    for index, (rendered, coeff) in enumerate(rendered_terms):
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        if magnitude != 1:
            if rendered == "1" or rendered.startswith("1 ox "):
                body = str(magnitude) + rendered[1:]
            else:
                body = f"{magnitude} {rendered}"
        else:
            body = rendered
        if index == 0:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces) if pieces else "0"


def format_element(element: HopfElement) -> str:
    ordered = sorted(element.terms.items(), key=lambda item: item[0].sort_key())
    return format_linear((format_monomial(m, element.codim), c) for m, c in ordered)


def verify_pbw(codim: int = 1, tail_cap: int = 2, words: int = 200, max_length: int = 5, seed: int = 0) -> VerificationReport:
    """Jacobi on every generator triple, and memoized normal forms against the random rewriter."""
    engine = get_hn_engine(codim)
    gens = generators(codim, tail_cap)
    triples = 0
    jacobi_failure = None
    for g1, g2, g3 in combinations(gens, 3):
        triples += 1
        if engine.jacobi_defect(g1, g2, g3):
            jacobi_failure = f"{format_symbol(g1, codim)}, {format_symbol(g2, codim)}, {format_symbol(g3, codim)}"
            break
    rng = random.Random(f"{seed}:pbw")
    confluence_failure = None
    for _ in range(words):
        word = random_word(rng, codim, max_length, min(tail_cap, 1))
        if engine.normal_word(word) != engine.brute_force_normal_form(word, rng):
            confluence_failure = " ".join(format_symbol(g, codim) for g in word)
            break
    checks = [
        RelationCheck(relation="Jacobi identity", trials=triples, passed=jacobi_failure is None, counterexample=jacobi_failure),
        RelationCheck(relation="normal form = random rewriting", trials=words, passed=confluence_failure is None, counterexample=confluence_failure),
    ]
    report = VerificationReport.from_checks("pbw", checks, {"codim": codim, "tail_cap": tail_cap, "seed": seed})
    logger.info("PBW suite finished", extra={"codim": codim, "pass": report.passed})
    return report
