"""
Tests for the PBW rewriting engine and the transverse Lie algebra.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.services.algebra_core import (
    X1,
    Y11,
    Delta,
    HopfElement,
    HorizX,
    PBWMonomial,
    VertY,
    bracket,
    brute_force_normal_form,
    check_symbol,
    delta_n,
    generators,
    get_hn_engine,
    is_canonical,
    jacobi_check,
    multiply,
    normal_form,
    pbw_basis,
    random_element,
    random_word,
    verify_pbw,
)
from app.utils.exceptions import CodimensionMismatchError, IndexOutOfRangeError


def gen(symbol, codim=1):
    return HopfElement.generator(symbol, codim)


class TestBrackets:
    """Structure constants of the transverse algebra."""

    def test_y_acts_on_x_by_identity(self):
        """[Y, X] = X in codimension 1."""
        assert bracket(Y11, X1) == gen(X1)

    def test_x_raises_delta_order(self):
        """[X, d_n] = d_(n+1)."""
        for n in range(1, 5):
            assert bracket(X1, delta_n(n)) == gen(delta_n(n + 1))

    def test_y_scales_delta_by_order(self):
        assert bracket(Y11, delta_n(1)) == gen(delta_n(1))
        assert bracket(Y11, delta_n(3)) == 3 * gen(delta_n(3))

    def test_deltas_commute(self):
        assert bracket(delta_n(1), delta_n(2)).is_zero()

    def test_vertical_fields_close_on_gl(self):
        """[Y[1,2], Y[2,1]] = Y[1,1] - Y[2,2]."""
        expected = gen(VertY(1, 1), 2) - gen(VertY(2, 2), 2)
        assert bracket(VertY(1, 2), VertY(2, 1), codim=2) == expected

    def test_antisymmetry(self):
        gens = generators(2, 1)
        for a in gens[:6]:
            for b in gens:
                assert bracket(a, b, 2) == -bracket(b, a, 2)

    @pytest.mark.parametrize("codim", [1, 2])
    def test_jacobi_on_generator_triples(self, codim):
        gens = generators(codim, 1)
        for a, b, c in zip(gens, gens[1:], gens[2:]):
            assert jacobi_check(a, b, c, codim)


class TestSymbols:
    """Index validation of generator symbols."""

    def test_index_above_codim_is_rejected(self):
        with pytest.raises(IndexOutOfRangeError):
            check_symbol(HorizX(2), 1)

    def test_zero_index_is_rejected(self):
        with pytest.raises(IndexOutOfRangeError):
            HorizX(0)

    def test_delta_order_must_be_positive(self):
        with pytest.raises(IndexOutOfRangeError):
            delta_n(0)

    def test_delta_is_symmetric_in_lower_indices(self):
        assert Delta(1, 2, 1) == Delta(1, 1, 2)

    def test_codimension_mismatch(self):
        with pytest.raises(CodimensionMismatchError):
            gen(X1, 1) + gen(X1, 2)


class TestNormalForm:
    """PBW normal form and the element arithmetic built on it."""

    def test_descent_is_rewritten(self):
        """Y*X = X*Y + X."""
        assert normal_form({(Y11, X1): 1}) == HopfElement.from_word((X1, Y11)) + gen(X1)

    def test_sorted_word_is_fixed(self):
        word = (delta_n(1), X1, Y11)
        assert normal_form({word: 1}) == HopfElement.from_word(word)

    def test_rendering(self):
        element = gen(delta_n(2)) - Fraction(1, 2) * gen(delta_n(1)) ** 2
        assert element.format() == "d2 - 1/2 d1^2"
        assert normal_form({(Y11, X1): 1}).format() == "X + X*Y"
        assert HopfElement.zero().format() == "0"

    def test_pbw_basis_sizes(self):
        """Codimension 1 with tails up to 1: d1, d2, X, Y."""
        assert len(pbw_basis(1, 1, tail_cap=1)) == 5
        assert len(pbw_basis(1, 2, tail_cap=1)) == 15

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_memoized_form_matches_random_rewriting(self, seed):
        rng = random.Random(seed)
        word = random_word(rng, 1, 5, 1)
        assert normal_form({word: 1}) == brute_force_normal_form(word, rng)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_multiplication_is_associative(self, seed):
        rng = random.Random(seed)
        a, b, c = (random_element(rng, 1, 2) for _ in range(3))
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


class TestPBWSuite:
    def test_suite_passes(self):
        report = verify_pbw(codim=1, tail_cap=2, words=40, seed=3)
        assert report.passed
        assert report.suite == "pbw"
        assert [check.relation for check in report.checks] == [
            "Jacobi identity",
            "normal form = random rewriting",
        ]

    def test_suite_in_codim_two(self):
        assert verify_pbw(codim=2, tail_cap=1, words=20).passed


class TestStructureIdentity:
    """Flat-connection relation between tailed deltas in codimension >= 2."""

    def test_non_canonical_delta_is_rewritten(self):
        """d[1;1,2;1] = d[1;1,1;2] + d[1;2,2] d[2;1,1] - d[1;1,2] d[2;1,2]."""
        expected = (
            gen(Delta(1, 1, 1, (2,)), 2)
            + gen(Delta(1, 2, 2), 2) * gen(Delta(2, 1, 1), 2)
            - gen(Delta(1, 1, 2), 2) * gen(Delta(2, 1, 2), 2)
        )
        assert gen(Delta(1, 1, 2, (1,)), 2) == expected

    def test_relation_sums_over_the_codimension(self):
        in_two = gen(Delta(1, 1, 2, (1,)), 2).terms
        in_three = gen(Delta(1, 1, 2, (1,)), 3).terms
        extra = {m: c for m, c in in_three.items() if in_two.get(m) != c}
        assert extra == {
            PBWMonomial.from_symbols((Delta(1, 2, 3), Delta(3, 1, 1))): 1,
            PBWMonomial.from_symbols((Delta(1, 1, 3), Delta(3, 1, 2))): -1,
        }

    def test_brackets_of_x_agree_on_sorted_lowers(self):
        """[X2, d[1;1,1]] - [X1, d[1;1,2]] is quadratic in the deltas."""
        difference = bracket(HorizX(2), Delta(1, 1, 1), 2) - bracket(X1, Delta(1, 1, 2), 2)
        assert difference.degree() == 2
        assert all(len(m.deltas) == 2 for m in difference.terms)

    def test_longer_tails_are_canonicalized(self):
        element = gen(Delta(2, 2, 2, (1, 1)), 2)
        assert all(is_canonical(symbol) for m in element.terms for symbol in m)
        assert PBWMonomial((Delta(2, 1, 1, (2, 2)),)) in element.terms

    def test_generators_are_canonical(self):
        assert all(is_canonical(g) for g in generators(3, 2))
        assert len(generators(2, 1)) == 20

    def test_codimension_one_is_untouched(self):
        assert all(get_hn_engine(1).reduced_letter(delta_n(n)) is None for n in range(1, 6))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_rewriting_is_confluent(self, seed):
        rng = random.Random(seed)
        letters = [X1, HorizX(2), VertY(1, 2), VertY(2, 1), Delta(1, 1, 2, (1,)), Delta(2, 2, 2, (1,)), Delta(1, 1, 1)]
        word = tuple(rng.choice(letters) for _ in range(rng.randint(1, 4)))
        assert normal_form({word: 1}, 2) == brute_force_normal_form(word, rng, 2)


class TestLongWords:
    def test_long_descending_word(self):
        """Thousands of transpositions, far deeper than the interpreter stack."""
        deltas = [delta_n(n) for n in range(1, 81)]
        assert HopfElement.from_word(tuple(reversed(deltas))) == HopfElement({PBWMonomial(deltas): 1})

    def test_long_mixed_word(self):
        """Y^a X^b = X^b (Y + b)^a."""
        word = (Y11,) * 8 + (X1,) * 8
        assert HopfElement.from_word(word) == gen(X1) ** 8 * (gen(Y11) + 8) ** 8
