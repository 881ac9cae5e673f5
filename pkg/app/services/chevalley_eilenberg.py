"""
Relative Chevalley-Eilenberg complexes of a Lie pair h < g with coefficients M:

    chains    M (x)_h Lambda^n(g/h)          with the boundary d_h
    cochains  Hom_h(Lambda^n(g/h), M')       with the differential d

Wedges are increasing tuples of positions into `pair.complement`; the
complement basis element serves as the lift of each class in g/h. Everything
is exact over Q.
"""

from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy.combinatorics import Permutation

from app.services.algebra_core import accumulate
from app.services.lie_pairs import LinearQuotient, LiePair, Vector
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

Wedge = Tuple[int, ...]
ChainKey = Tuple[int, Wedge]
Chain = Dict[ChainKey, Fraction]


def sort_wedge(positions: Sequence[int]) -> Tuple[int, Wedge]:
    """Sign and sorted form of x_p1 ^ ... ^ x_pk; sign 0 on a repeated factor."""
    if len(set(positions)) != len(positions):
        return 0, ()
    order = sorted(range(len(positions)), key=lambda i: positions[i])
    sign = Permutation(order).signature() if len(order) > 1 else 1
    return sign, tuple(positions[i] for i in order)


def _omit(wedge: Wedge, *slots: int) -> Wedge:
    return tuple(p for i, p in enumerate(wedge) if i not in slots)


def _rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


class ChevalleyEilenbergComplex:
    def __init__(self, pair: LiePair):
        self.pair = pair
        self.module = pair.module
        self.rank = len(pair.complement)
        self._positions = {index: p for p, index in enumerate(pair.complement)}
        self._chain_spaces: Dict[int, LinearQuotient] = {}
        self._equivariant: Dict[int, sympy.Matrix] = {}

    # g/h

    def project(self, vector: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        """A vector of g in basis indices, mod h, in complement positions."""
        return {self._positions[k]: c for k, c in vector.items() if k in self._positions and c}

    def bracket_mod_h(self, p: int, q: int) -> Dict[int, Fraction]:
        complement = self.pair.complement
        return self.project(self.pair.algebra.bracket(complement[p], complement[q]))

    def h_action(self, xi: int, p: int) -> Dict[int, Fraction]:
        """xi . x_p = [xi, x_p] mod h."""
        return self.project(self.pair.algebra.bracket(xi, self.pair.complement[p]))

    def h_action_on_wedge(self, xi: int, wedge: Wedge) -> Dict[Wedge, Fraction]:
        out: Dict[Wedge, Fraction] = {}
        for slot, position in enumerate(wedge):
            for image, coeff in self.h_action(xi, position).items():
                sign, key = sort_wedge(wedge[:slot] + (image,) + wedge[slot + 1:])
                if sign:
                    accumulate(out, {key: coeff * sign})
        return out

    def wedges(self, n: int) -> List[Wedge]:
        return list(combinations(range(self.rank), n)) if 0 <= n <= self.rank else []

    # Chains

    def chain_basis(self, n: int) -> List[ChainKey]:
        return [(m, w) for w in self.wedges(n) for m in range(self.module.dim)]

    def chain_space(self, n: int) -> LinearQuotient:
        """M (x) Lambda^n modulo m.xi (x) w - m (x) xi.w for xi in h."""
        space = self._chain_spaces.get(n)
        if space is None:
            relations = []
            for xi in self.pair.subalgebra:
                for m, w in self.chain_basis(n):
                    relation: Chain = {}
                    for m2, coeff in self.module.act(xi, m).items():
                        accumulate(relation, {(m2, w): coeff})
                    for w2, coeff in self.h_action_on_wedge(xi, w).items():
                        accumulate(relation, {(m, w2): -coeff})
                    relations.append(relation)
            space = self._chain_spaces.setdefault(n, LinearQuotient(self.chain_basis(n), relations))
        return space

    def reduce_chain(self, n: int, chain: Mapping[ChainKey, Fraction]) -> Chain:
        return self.chain_space(n).reduce(chain)

    def boundary(self, chain: Mapping[ChainKey, Fraction]) -> Chain:
        """
        d(m (x) x_1 ^ ... ^ x_k) = sum_i (-1)^(i+1) m x_i (x) ..x_i omitted..
                                  + sum_(i<j) (-1)^(i+j) m (x) [x_i, x_j] ^ ..both omitted..
        """
        out: Chain = {}
        for (m, wedge), coeff in chain.items():
            for a, position in enumerate(wedge):
                sign = -1 if a % 2 else 1
                rest = _omit(wedge, a)
                for m2, value in self.module.act(self.pair.complement[position], m).items():
                    accumulate(out, {(m2, rest): coeff * value * sign})
            for a, b in combinations(range(len(wedge)), 2):
                sign = -1 if (a + b) % 2 else 1
                rest = _omit(wedge, a, b)
                for position, value in self.bracket_mod_h(wedge[a], wedge[b]).items():
                    wedge_sign, key = sort_wedge((position,) + rest)
                    if wedge_sign:
                        accumulate(out, {(m, key): coeff * value * sign * wedge_sign})
        return out

    def boundary_matrix(self, n: int) -> sympy.Matrix:
        """d_h : C_n -> C_(n-1) in quotient coordinates."""
        source, target = self.chain_space(n), self.chain_space(n - 1)
        columns = [target.coordinates(self.boundary({key: Fraction(1)})) for key in source.free]
        matrix = sympy.zeros(target.dim, source.dim)
        for j, column in enumerate(columns):
            for i, value in enumerate(column):
                matrix[i, j] = _rational(value)
        return matrix

    def boundary_squared_vanishes(self) -> bool:
        for n in range(2, self.rank + 1):
            if not (self.boundary_matrix(n - 1) * self.boundary_matrix(n)).is_zero_matrix:
                logger.debug("boundary squared is nonzero", extra={"degree": n, "pair": self.pair.name})
                return False
        return True

    def _boundary_rank(self, n: int) -> int:
        if n < 1 or n > self.rank:
            return 0
        matrix = self.boundary_matrix(n)
        return matrix.rank() if matrix.rows and matrix.cols else 0

    def homology_dims(self, max_degree: Optional[int] = None) -> Dict[int, int]:
        """dim H_n = dim C_n - rank d_n - rank d_(n+1), by rank-nullity."""
        top = self.rank if max_degree is None else max_degree
        return {
            n: self.chain_space(n).dim - self._boundary_rank(n) - self._boundary_rank(n + 1)
            for n in range(0, top + 1)
        }

    # Cochains with values in M', (x . f)(m) = -f(m . x)

    def cochain_index(self, n: int) -> List[Tuple[Wedge, int]]:
        return [(w, r) for w in self.wedges(n) for r in range(self.module.dim)]

    def _dual_action(self, index: int) -> sympy.Matrix:
        return -self.module.action[index].T

    def differential_matrix(self, n: int) -> sympy.Matrix:
        """
        (d phi)(x_1..x_(n+1)) = sum_i (-1)^(i+1) x_i . phi(..x_i omitted..)
                               + sum_(i<j) (-1)^(i+j+1) phi([x_i, x_j] ^ ..both omitted..)
        on all of Hom(Lambda^n, M'), coordinates phi(w)_r.
        """
        source = {key: i for i, key in enumerate(self.cochain_index(n))}
        target = self.cochain_index(n + 1)
        matrix = sympy.zeros(len(target), len(source))
        for row_block, wedge in enumerate(self.wedges(n + 1)):
            base = row_block * self.module.dim
            for a, position in enumerate(wedge):
                sign = -1 if a % 2 else 1
                dual = self._dual_action(self.pair.complement[position])
                rest = _omit(wedge, a)
                for r in range(self.module.dim):
                    for s in range(self.module.dim):
                        if dual[r, s] != 0:
                            matrix[base + r, source[(rest, s)]] += sign * dual[r, s]
            for a, b in combinations(range(len(wedge)), 2):
                sign = 1 if (a + b) % 2 else -1
                rest = _omit(wedge, a, b)
                for position, value in self.bracket_mod_h(wedge[a], wedge[b]).items():
                    wedge_sign, key = sort_wedge((position,) + rest)
                    if not wedge_sign:
                        continue
                    for r in range(self.module.dim):
                        matrix[base + r, source[(key, r)]] += sign * wedge_sign * _rational(value)
        return matrix

    def equivariant_basis(self, n: int) -> sympy.Matrix:
        """Columns spanning Hom_h(Lambda^n(g/h), M')."""
        cached = self._equivariant.get(n)
        if cached is not None:
            return cached
        index = {key: i for i, key in enumerate(self.cochain_index(n))}
        rows = []
        for xi in self.pair.subalgebra:
            dual = self._dual_action(xi)
            for wedge in self.wedges(n):
                for r in range(self.module.dim):
                    row = [sympy.Integer(0)] * len(index)
                    for s in range(self.module.dim):
                        row[index[(wedge, s)]] += dual[r, s]
                    for moved, coeff in self.h_action_on_wedge(xi, wedge).items():
                        row[index[(moved, r)]] -= _rational(coeff)
                    rows.append(row)
        if not index:
            basis = sympy.zeros(0, 0)
        elif not rows:
            basis = sympy.eye(len(index))
        else:
            kernel = sympy.Matrix(rows).nullspace()
            basis = sympy.Matrix.hstack(*kernel) if kernel else sympy.zeros(len(index), 0)
        return self._equivariant.setdefault(n, basis)

    def _restricted_differential(self, n: int) -> sympy.Matrix:
        return self.differential_matrix(n) * self.equivariant_basis(n)

    def differential_squared_vanishes(self) -> bool:
        for n in range(0, self.rank - 1):
            if not (self.differential_matrix(n + 1) * self._restricted_differential(n)).is_zero_matrix:
                logger.debug("differential squared is nonzero", extra={"degree": n, "pair": self.pair.name})
                return False
        return True

    def _differential_rank(self, n: int) -> int:
        if n < 0 or n >= self.rank:
            return 0
        matrix = self._restricted_differential(n)
        return matrix.rank() if matrix.rows and matrix.cols else 0

    def cohomology_dims(self, max_degree: Optional[int] = None) -> Dict[int, int]:
        top = self.rank if max_degree is None else max_degree
        return {
            n: self.equivariant_basis(n).cols - self._differential_rank(n) - self._differential_rank(n - 1)
            for n in range(0, top + 1)
        }


def ce_complex(pair: LiePair) -> ChevalleyEilenbergComplex:
    return ChevalleyEilenbergComplex(pair)


def homology_dims(pair: LiePair, max_degree: Optional[int] = None) -> Dict[int, int]:
    return ChevalleyEilenbergComplex(pair).homology_dims(max_degree)


def wedge_chain(pair: LiePair, m: int, positions: Sequence[int]) -> Chain:
    """m (x) x_p1 ^ ... ^ x_pk as a sorted chain."""
    sign, key = sort_wedge(tuple(positions))
    return {(m, key): Fraction(sign)} if sign else {}


def chain_to_vector(chain: Mapping[ChainKey, Fraction]) -> Vector:
    """Degree-0 chain as a vector of M."""
    return {m: c for (m, _), c in chain.items()}
