"""
Tests for the cyclic module of H_n and the (b, B) bicomplex.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.services.algebra_core import X1, Y11, HopfElement, delta_n
from app.services.cyclic_complex import (
    CyclicContext,
    is_normalized,
    normalize,
    random_cochain,
    verify_bicomplex,
    verify_cyclic_relations,
    verify_lemma_power,
)
from app.services.hopf_ops import ModularPair, TensorCochain
from app.utils.exceptions import DegreeError, IndexOutOfRangeError

one = HopfElement.one()
x, y = HopfElement.generator(X1), HopfElement.generator(Y11)
d1, d2 = HopfElement.generator(delta_n(1)), HopfElement.generator(delta_n(2))
t = TensorCochain.tensor_of


@pytest.fixture(scope="module")
def ctx():
    return CyclicContext(1, ModularPair.standard(1))


class TestOperators:
    """Faces, degeneracies and tau_n on hand-computed inputs."""

    def test_outer_faces(self, ctx):
        assert ctx.face(0, t(x)) == t(one, x)
        assert ctx.face(2, t(x)) == t(x, one)

    def test_inner_face_is_coproduct(self, ctx):
        assert ctx.face(1, t(d1)) == t(d1, one) + t(one, d1)

    def test_face_index_range(self, ctx):
        with pytest.raises(IndexOutOfRangeError):
            ctx.face(3, t(x))

    def test_degeneracy_applies_counit(self, ctx):
        assert ctx.degeneracy(0, t(one, x)) == t(x)
        assert ctx.degeneracy(1, t(one, x)).is_zero()
        with pytest.raises(IndexOutOfRangeError):
            ctx.degeneracy(2, t(one, x))

    def test_tau_one_is_twisted_antipode(self, ctx):
        assert ctx.cyclic(t(d1)) == -t(d1)
        assert ctx.cyclic(t(y)) == t(one) - t(y)

    def test_tau_two_appends_sigma(self, ctx):
        assert ctx.cyclic(t(one, d1)) == t(d1, one)
        assert ctx.cyclic(t(d1, one)) == -t(d1, one) - t(one, d1)

    def test_tau_two_has_order_three(self, ctx):
        c = t(d1, x) + Fraction(1, 2) * t(d1 ** 2, y)
        assert ctx.cyclic(ctx.cyclic(ctx.cyclic(c))) == c

    def test_tau_on_scalars_is_undefined(self, ctx):
        with pytest.raises(DegreeError):
            ctx.cyclic(TensorCochain.scalar(1))

    def test_b_of_x(self, ctx):
        """b(X) = -d1 ox Y."""
        assert ctx.hochschild_b(t(x)) == -t(d1, y)

    def test_b_of_d1_vanishes(self, ctx):
        assert ctx.hochschild_b(t(d1)).is_zero()

    def test_b_of_scalar(self, ctx):
        """On C^0 b(1) = 1 - sigma, which vanishes for sigma = 1."""
        assert ctx.hochschild_b(TensorCochain.scalar(1)).is_zero()

    def test_connes_b_in_degree_one_is_the_character(self, ctx):
        assert ctx.connes_B(t(y)).scalar_value() == 1
        assert ctx.connes_B(t(x)).scalar_value() == 0
        assert ctx.connes_B(t(one)).scalar_value() == 0

    def test_connes_b_transgresses_to_schwarzian(self, ctx):
        c = t(d1, x) + Fraction(1, 2) * t(d1 ** 2, y)
        assert ctx.connes_B(c) == t(d2 - Fraction(1, 2) * d1 ** 2)

    def test_connes_b_rejects_scalars(self, ctx):
        with pytest.raises(DegreeError):
            ctx.connes_B(TensorCochain.scalar(2))


class TestCocycles:
    def test_d1_is_a_cyclic_cocycle(self, ctx):
        assert ctx.is_cyclic_cocycle(t(d1))

    def test_x_is_not(self, ctx):
        assert not ctx.is_cyclic_cocycle(t(x))

    def test_untwisted_pair_changes_tau(self):
        plain = CyclicContext(1, ModularPair.untwisted(1))
        assert plain.cyclic(t(y)) == -t(y)


class TestNormalization:
    def test_normalize_drops_unit_slots(self):
        c = t(one, x) + t(d1, y)
        assert normalize(c) == t(d1, y)
        assert is_normalized(normalize(c))
        assert not is_normalized(c)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=3))
    def test_normalize_is_idempotent(self, seed, degree):
        c = random_cochain(1, degree, random.Random(seed))
        assert normalize(normalize(c)) == normalize(c)


class TestRelationSuites:
    """Seeded suites over the cyclic category and the bicomplex."""

    def test_cyclic_relations(self, ctx):
        report = verify_cyclic_relations(ctx, n_max=2, trials=3, seed=1)
        assert report.passed, report.first_failure()
        assert {check.degree for check in report.checks} == {1, 2}

    def test_cyclic_relations_codim_two(self):
        report = verify_cyclic_relations(CyclicContext(2), n_max=1, trials=2)
        assert report.passed, report.first_failure()

    def test_relations_are_reproducible(self, ctx):
        first = verify_cyclic_relations(ctx, n_max=1, trials=2, seed=7)
        second = verify_cyclic_relations(ctx, n_max=1, trials=2, seed=7)
        assert first.model_dump() == second.model_dump()

    def test_n_max_must_be_positive(self, ctx):
        with pytest.raises(DegreeError):
            verify_cyclic_relations(ctx, n_max=0, trials=1)

    def test_tau_power(self, ctx):
        assert verify_lemma_power(ctx, n_max=2, trials=3).passed

    def test_bicomplex(self, ctx):
        report = verify_bicomplex(ctx, n_max=2, trials=3)
        assert report.passed, report.first_failure()
