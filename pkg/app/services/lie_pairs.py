"""
Lie algebras given by structure constants, Lie pairs h < g with right
g-modules, the pair-file loader, and the exact linear quotient used for every
coinvariant space of the relative complexes.
"""

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from pydantic import ValidationError

from app.models.lie_pairs import LiePairDocument
from app.services.algebra_core import GeneratorSymbol, PBWEngine, PBWMonomial, accumulate
from app.utils.exceptions import InvalidLiePairError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

Scalar = Union[int, Fraction]
Vector = Dict[int, Fraction]


def parse_rational(value: Union[int, str, Fraction]) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidLiePairError(f"not a rational number: {value!r}") from exc


def _fraction(value: sympy.Rational) -> Fraction:
    return Fraction(int(value.p), int(value.q))


class LieAlgebraSpec:
    """
    Lie algebra with basis e_0..e_(d-1) and rational structure constants.
    Antisymmetry and the Jacobi identity are checked on construction.
    """

    def __init__(self, names: Sequence[str], brackets: Mapping[Tuple[int, int], Mapping[int, Scalar]]):
        self.dim = len(names)
        self.names = tuple(names)
        self._structure: Dict[Tuple[int, int], Vector] = {}
        for (i, j), vector in brackets.items():
            self._check_index(i, j, *vector)
            cleaned = {k: Fraction(c) for k, c in vector.items() if c}
            if i == j:
                if cleaned:
                    raise InvalidLiePairError(f"[{self.names[i]}, {self.names[i]}] must vanish")
                continue
            negated = {k: -c for k, c in cleaned.items()}
            if self._structure.get((i, j), cleaned) != cleaned or self._structure.get((j, i), negated) != negated:
                raise InvalidLiePairError(
                    f"bracket [{self.names[i]}, {self.names[j]}] is not antisymmetric", {"pair": [i, j]}
                )
            if cleaned:
                self._structure[(i, j)] = cleaned
                self._structure[(j, i)] = negated
        witness = self.jacobi_witness()
        if witness is not None:
            raise InvalidLiePairError("Jacobi identity fails", {"triple": witness})

    def _check_index(self, *indices: int) -> None:
        for index in indices:
            if not 0 <= index < self.dim:
                raise InvalidLiePairError(f"basis index {index} out of range 0..{self.dim - 1}")

    def bracket(self, i: int, j: int) -> Vector:
        return self._structure.get((i, j), {})

    def bracket_vectors(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Vector:
        out: Vector = {}
        for i, a in u.items():
            for j, b in v.items():
                accumulate(out, self.bracket(i, j), a * b)
        return out

    def jacobi_witness(self) -> Optional[List[str]]:
        for i, j, k in combinations(range(self.dim), 3):
            total: Vector = {}
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                accumulate(total, self.bracket_vectors(self.bracket(a, b), {c: Fraction(1)}))
            if total:
                return [self.names[i], self.names[j], self.names[k]]
        return None

    @property
    def is_abelian(self) -> bool:
        return not self._structure

    def nonzero_brackets(self) -> List[Tuple[int, int, Vector]]:
        return [(i, j, v) for (i, j), v in sorted(self._structure.items()) if i < j]


class GModule:
    """Right g-module, m . e = rho(e) m on column vectors."""

    def __init__(self, dim: int, action: Sequence[sympy.Matrix], name: str = "M"):
        self.dim = dim
        self.name = name
        self.action = tuple(sympy.Matrix(matrix) for matrix in action)
        for index, matrix in enumerate(self.action):
            if matrix.shape != (dim, dim):
                raise InvalidLiePairError(
                    f"action matrix {index} has shape {matrix.shape}, expected {(dim, dim)}"
                )

    @classmethod
    def character(cls, values: Sequence[Scalar], name: str = "F_delta") -> "GModule":
        return cls(1, [sympy.Matrix([[sympy.Rational(str(Fraction(v)))]]) for v in values], name)

    @classmethod
    def trivial(cls, lie_dim: int, dim: int = 1) -> "GModule":
        return cls(dim, [sympy.zeros(dim, dim) for _ in range(lie_dim)], "trivial" if dim == 1 else f"trivial^{dim}")

    def act(self, index: int, m: int) -> Vector:
        column = self.action[index][:, m]
        return {r: _fraction(column[r]) for r in range(self.dim) if column[r] != 0}

    def act_vector(self, index: int, vector: Mapping[int, Fraction]) -> Vector:
        out: Vector = {}
        for m, coeff in vector.items():
            accumulate(out, self.act(index, m), coeff)
        return out

    def act_word(self, word: Sequence[int], m: int) -> Vector:
        """((m . e_w1) . e_w2) ... applied left to right."""
        vector: Vector = {m: Fraction(1)}
        for index in word:
            vector = self.act_vector(index, vector)
            if not vector:
                break
        return vector

    def module_defect(self, lie: LieAlgebraSpec) -> Optional[str]:
        """First pair (a, b) with rho([a, b]) != rho(b) rho(a) - rho(a) rho(b), rendered."""
        if len(self.action) != lie.dim:
            return f"{len(self.action)} action matrices for a {lie.dim}-dimensional algebra"
        for a in range(lie.dim):
            for b in range(a + 1, lie.dim):
                lhs = sympy.zeros(self.dim, self.dim)
                for k, coeff in lie.bracket(a, b).items():
                    lhs += self.action[k] * sympy.Rational(coeff.numerator, coeff.denominator)
                rhs = self.action[b] * self.action[a] - self.action[a] * self.action[b]
                if lhs != rhs:
                    return f"rho([{lie.names[a]}, {lie.names[b]}])"
        return None


@dataclass(frozen=True)
class LieGenerator(GeneratorSymbol):
    """Basis element of g as a PBW generator; `rank` is its position in the PBW order."""

    rank: int
    index: int
    name: str = field(default="", compare=False)

    def sort_key(self) -> Tuple:
        return (self.rank,)

    def indices(self) -> Tuple[int, ...]:
        return (self.index,)

    def __repr__(self) -> str:
        return self.name or f"e{self.index}"


class LiePair:
    """
    h < g with coefficients M. The PBW order of U(g) puts the complement
    generators first, so a normal-ordered monomial lies in U(g)h+ exactly when
    it contains an h generator.
    """

    def __init__(self, algebra: LieAlgebraSpec, subalgebra: Sequence[int], module: Optional[GModule] = None, name: str = "pair"):
        self.algebra = algebra
        self.name = name
        self.subalgebra = tuple(sorted(set(subalgebra)))
        if len(self.subalgebra) != len(subalgebra):
            raise InvalidLiePairError("subalgebra indices repeat", {"subalgebra": list(subalgebra)})
        algebra._check_index(*self.subalgebra)
        for i, j in combinations(self.subalgebra, 2):
            outside = [k for k in algebra.bracket(i, j) if k not in self.subalgebra]
            if outside:
                raise InvalidLiePairError(
                    f"h is not closed: [{algebra.names[i]}, {algebra.names[j]}] leaves it", {"pair": [i, j]}
                )
        self.complement = tuple(i for i in range(algebra.dim) if i not in self.subalgebra)
        self.module = module or GModule.trivial(algebra.dim)
        defect = self.module.module_defect(algebra)
        if defect is not None:
            raise InvalidLiePairError("coefficients are not a right g-module", {"witness": defect})
        order = self.complement + self.subalgebra
        self.symbols: Dict[int, LieGenerator] = {
            index: LieGenerator(rank, index, algebra.names[index]) for rank, index in enumerate(order)
        }
        self.engine = PBWEngine(self._bracket, f"U({name})")

    def _bracket(self, a: GeneratorSymbol, b: GeneratorSymbol) -> Dict[GeneratorSymbol, Fraction]:
        return {self.symbols[k]: c for k, c in self.algebra.bracket(a.index, b.index).items()}

    def symbol(self, index: int) -> LieGenerator:
        return self.symbols[index]

    def in_subalgebra(self, symbol: LieGenerator) -> bool:
        return symbol.index in self.subalgebra

    def with_module(self, module: GModule) -> "LiePair":
        return LiePair(self.algebra, self.subalgebra, module, self.name)

    def format_monomial(self, monomial: PBWMonomial) -> str:
        if not monomial:
            return "1"
        parts = []
        for symbol in dict.fromkeys(monomial):
            power = monomial.count(symbol)
            parts.append(repr(symbol) if power == 1 else f"{symbol!r}^{power}")
        return "*".join(parts)

    @classmethod
    def affine_line(cls) -> "LiePair":
        """aff(1) = span{X, Y}, [Y, X] = X, h = span{Y}, M = F_delta (Y acts by 1)."""
        return cls(_affine_algebra(), [1], GModule.character([0, 1]), "aff(1)/Y")

    @classmethod
    def affine_line_absolute(cls) -> "LiePair":
        return cls(_affine_algebra(), [], GModule.character([0, 1]), "aff(1)")

    def __repr__(self) -> str:
        return f"LiePair({self.name}, dim={self.algebra.dim}, h={list(self.subalgebra)}, M={self.module.name})"


def _affine_algebra() -> LieAlgebraSpec:
    return LieAlgebraSpec(["X", "Y"], {(1, 0): {0: 1}})


def pair_from_document(document: LiePairDocument, name: str = "pair") -> LiePair:
    names = document.names or [f"e{i}" for i in range(document.dim)]
    if len(names) != document.dim:
        raise InvalidLiePairError(f"{len(names)} names for dimension {document.dim}")
    brackets: Dict[Tuple[int, int], Vector] = {}
    for i, j, terms in document.brackets:
        vector: Vector = {}
        for term in terms:
            accumulate(vector, {term.k: parse_rational(term.coeff)})
        if (i, j) in brackets:
            raise InvalidLiePairError(f"bracket [{i}, {j}] given twice")
        brackets[(i, j)] = vector
    algebra = LieAlgebraSpec(names, brackets)
    module = None
    if document.module is not None:
        if len(document.module.action) != document.dim:
            raise InvalidLiePairError(f"module needs {document.dim} action matrices")
        module = GModule(
            document.module.dim,
            [
                sympy.Matrix([[sympy.Rational(str(parse_rational(entry))) for entry in row] for row in matrix])
                if matrix else sympy.zeros(document.module.dim, document.module.dim)
                for matrix in document.module.action
            ],
        )
    return LiePair(algebra, document.subalgebra, module, name)


def load_lie_pair(path: Union[str, Path]) -> LiePair:
    path = Path(path)
    try:
        document = LiePairDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidLiePairError(f"cannot read pair file {path}: {exc}") from exc
    except ValidationError as exc:
        raise InvalidLiePairError(f"malformed pair file {path}", {"errors": json.loads(exc.json())}) from exc
    pair = pair_from_document(document, path.stem)
    logger.info("Loaded Lie pair", extra={"path": str(path), "dim": pair.algebra.dim, "h": list(pair.subalgebra)})
    return pair


def random_solvable_pair(dim: int = 4, rng: Optional[random.Random] = None) -> LiePair:
    """
    An abelian ideal span{e_0..e_(d-2)} extended by e_(d-1) acting through a
    random rational matrix, with a random closed subalgebra.
    """
    rng = rng or random.Random(0)
    top = dim - 1
    ideal = list(range(top))
    matrix = [[Fraction(rng.randint(-2, 2), rng.choice([1, 2])) for _ in ideal] for _ in ideal]
    brackets = {(top, i): {k: matrix[k][i] for k in ideal} for i in ideal}
    draw = rng.random()
    if draw < 0.25:
        subalgebra: List[int] = []
    elif draw < 0.5:
        subalgebra = [top]
    else:
        subalgebra = sorted(rng.sample(ideal, rng.randint(1, min(2, len(ideal)))))
    algebra = LieAlgebraSpec([f"e{i}" for i in range(dim)], brackets)
    return LiePair(algebra, subalgebra, GModule.trivial(dim), f"solvable-{dim}")


class LinearQuotient:
    """
    A finite-dimensional space with basis `basis` modulo the span of
    `relations`. Representatives are canonical: after `reduce`, every pivot
    coordinate of the row-reduced relation matrix is zero.
    """

    def __init__(self, basis: Sequence[Hashable], relations: Iterable[Mapping[Hashable, Fraction]]):
        self.basis = list(basis)
        self.position = {key: i for i, key in enumerate(self.basis)}
        rows = []
        for relation in relations:
            row = [sympy.Integer(0)] * len(self.basis)
            for key, coeff in relation.items():
                if coeff:
                    row[self.position[key]] = sympy.Rational(coeff.numerator, coeff.denominator)
            if any(row):
                rows.append(row)
        self._pivot_rows: Dict[Hashable, Dict[Hashable, Fraction]] = {}
        if rows:
            reduced, pivots = sympy.Matrix(rows).rref()
            for r, p in enumerate(pivots):
                self._pivot_rows[self.basis[p]] = {
                    self.basis[c]: _fraction(reduced[r, c]) for c in range(len(self.basis)) if reduced[r, c] != 0
                }
        self.free = [key for key in self.basis if key not in self._pivot_rows]

    @property
    def dim(self) -> int:
        return len(self.free)

    def __contains__(self, key: Hashable) -> bool:
        return key in self.position

    def reduce(self, vector: Mapping[Hashable, Fraction]) -> Dict[Hashable, Fraction]:
        out: Dict[Hashable, Fraction] = {k: Fraction(v) for k, v in vector.items() if v}
        for key, row in self._pivot_rows.items():
            coeff = out.get(key)
            if coeff:
                accumulate(out, row, -coeff)
        return out

    def coordinates(self, vector: Mapping[Hashable, Fraction]) -> List[Fraction]:
        reduced = self.reduce(vector)
        return [reduced.get(key, Fraction(0)) for key in self.free]
