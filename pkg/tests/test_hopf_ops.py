"""
Tests for the coproduct, antipode, modular pairs and the Hopf axiom suite.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.services.algebra_core import X1, Y11, Delta, HopfElement, HorizX, VertY, delta_n, multiply, random_element
from app.services.hopf_ops import (
    Character,
    GroupLike,
    ModularPair,
    TensorCochain,
    antipode,
    check_character,
    check_involution,
    coproduct,
    counit,
    iterated_coproduct,
    twisted_antipode,
    verify_hopf_axioms,
)
from app.utils.exceptions import DegreeError, NotInvertibleError


def gen(symbol, codim=1):
    return HopfElement.generator(symbol, codim)


one = HopfElement.one()
x, y, d1, d2 = gen(X1), gen(Y11), gen(delta_n(1)), gen(delta_n(2))


class TestCoproduct:
    """Coproduct on generators and its extension to products."""

    def test_y_and_d1_are_primitive(self):
        for h in (y, d1):
            assert coproduct(h) == TensorCochain.tensor_of(h, one) + TensorCochain.tensor_of(one, h)

    def test_x(self):
        """Delta X = X ox 1 + 1 ox X + d1 ox Y."""
        expected = (
            TensorCochain.tensor_of(x, one)
            + TensorCochain.tensor_of(one, x)
            + TensorCochain.tensor_of(d1, y)
        )
        assert coproduct(x) == expected
        assert coproduct(x).format() == "1 ox X + X ox 1 + d1 ox Y"

    def test_d2(self):
        expected = (
            TensorCochain.tensor_of(d2, one)
            + TensorCochain.tensor_of(one, d2)
            + TensorCochain.tensor_of(d1, d1)
        )
        assert coproduct(d2) == expected

    def test_multiplicative(self):
        assert coproduct(x * y) == coproduct(x).slot_product(coproduct(y))

    def test_codim_two_x_has_n_squared_extra_terms(self):
        x1 = gen(X1, 2)
        extra = coproduct(x1) - TensorCochain.tensor_of(x1, HopfElement.one(2)) - TensorCochain.tensor_of(HopfElement.one(2), x1)
        assert len(extra.terms) == 4

    def test_iterated_coproduct(self):
        assert iterated_coproduct(d1, 0) == TensorCochain.from_element(d1)
        assert iterated_coproduct(d1, 2).degree == 3
        with pytest.raises(DegreeError):
            iterated_coproduct(d1, -1)

    def test_counit(self):
        assert counit(3 * one + x) == 3
        assert counit(d1 * y) == 0


class TestAntipode:
    def test_generators(self):
        assert antipode(y) == -y
        assert antipode(d1) == -d1
        assert antipode(x) == -x + d1 * y

    def test_d2(self):
        """S(d2) = -d2 + d1^2."""
        assert antipode(d2) == -d2 + d1 ** 2

    def test_anti_multiplicative(self):
        assert antipode(x * y) == antipode(y) * antipode(x)


class TestModularPair:
    """Characters, group-likes and the twisted antipode."""

    def test_modular_character(self):
        delta = Character.modular(1)
        assert delta(y) == 1
        assert delta(x) == 0
        assert delta(y * y + 2 * one) == 3

    def test_modular_character_vanishes_on_brackets(self):
        assert check_character(Character.modular(2), 2) is None

    def test_bad_character_is_reported(self):
        assert check_character(Character({X1: 1}), 1) is not None

    def test_twisted_antipode(self):
        pair = ModularPair.standard(1)
        assert twisted_antipode(pair, y) == one - y
        assert twisted_antipode(pair, d1) == -d1
        assert twisted_antipode(pair, x) == -x + d1 * y

    def test_untwisted_pair_uses_plain_antipode(self):
        pair = ModularPair.untwisted(1)
        assert twisted_antipode(pair, y) == -y

    @pytest.mark.parametrize("codim", [1, 2])
    def test_involution(self, codim):
        assert check_involution(ModularPair.standard(codim), 2, tail_cap=1)

    def test_non_group_like_sigma(self):
        with pytest.raises(NotInvertibleError):
            GroupLike(x)


class TestHopfAxioms:
    @pytest.mark.parametrize("codim,degree_cap", [(1, 4), (2, 2)])
    def test_suite_passes(self, codim, degree_cap):
        report = verify_hopf_axioms(codim, degree_cap, tail_cap=1, samples=100)
        assert report.passed, report.first_failure()
        assert report.checks[-1].trials == 100

    def test_report_lists_every_axiom(self):
        report = verify_hopf_axioms(1, 2, samples=3)
        assert [c.relation for c in report.checks] == [
            "coassociativity",
            "counit",
            "antipode",
            "twisted counit",
            "bialgebra",
        ]
        assert report.details["pair"] == "(modular, 1)"


class TestBialgebraProperty:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_coproduct_is_multiplicative(self, seed):
        """Delta(ab) = Delta(a) Delta(b) on random elements."""
        rng = random.Random(seed)
        a, b = random_element(rng, 1, 2), random_element(rng, 1, 2)
        assert coproduct(multiply(a, b)) == coproduct(a).slot_product(coproduct(b))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_antipode_reverses_products(self, seed):
        """S(ab) = S(b) S(a)."""
        rng = random.Random(seed)
        a, b = random_element(rng, 1, 2), random_element(rng, 1, 2)
        assert antipode(multiply(a, b)) == multiply(antipode(b), antipode(a))

    @settings(max_examples=15, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_coproduct_is_multiplicative_in_codim_two(self, seed):
        rng = random.Random(seed)
        a, b = random_element(rng, 2, 2), random_element(rng, 2, 2)
        assert coproduct(multiply(a, b)) == coproduct(a).slot_product(coproduct(b))

    def test_horizontal_coproducts_commute_in_codim_two(self):
        """[X1, X2] = 0, so the coproducts must commute as well."""
        x1, x2 = gen(X1, 2), gen(HorizX(2), 2)
        commutator = coproduct(x1).slot_product(coproduct(x2)) - coproduct(x2).slot_product(coproduct(x1))
        assert commutator.is_zero()

    def test_coproduct_of_a_rewritten_delta(self):
        """d[1;1,2;1] = [X1, d[1;1,2]] even though it normalizes to other deltas."""
        x1, d = gen(X1, 2), gen(Delta(1, 1, 2), 2)
        expected = coproduct(x1).slot_product(coproduct(d)) - coproduct(d).slot_product(coproduct(x1))
        assert coproduct(gen(Delta(1, 1, 2, (1,)), 2)) == expected

    def test_antipode_of_a_rewritten_delta(self):
        x1, d = gen(X1, 2), gen(Delta(1, 1, 2), 2)
        expected = antipode(d) * antipode(x1) - antipode(x1) * antipode(d)
        assert antipode(gen(Delta(1, 1, 2, (1,)), 2)) == expected
