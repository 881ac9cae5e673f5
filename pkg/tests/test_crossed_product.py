"""
Tests for the crossed product and the action of H_n on it.
"""

import random

import pytest

from app.services.algebra_core import X1, Y11, HopfElement, delta_n
from app.services.crossed_product import (
    CrossedElement,
    act,
    random_crossed,
    rank_columns,
    rank_sanity,
    schwarzian_series,
    verify_action_suite,
    verify_hopf_action,
    verify_schwarzian_action,
)
from app.services.jets import FrameFunction, JetContext, gamma
from app.utils.exceptions import CodimensionMismatchError, DegreeError, UnsupportedCodimensionError

x_gen, y_gen = HopfElement.generator(X1), HopfElement.generator(Y11)
d1 = HopfElement.generator(delta_n(1))


@pytest.fixture(scope="module")
def ctx():
    return JetContext(1, eps_order=3)


@pytest.fixture(scope="module")
def phi(ctx):
    x, eps = ctx.x[0], ctx.eps
    return ctx.diffeo([x + eps * x ** 2])


class TestCrossedProduct:
    def test_unit(self, ctx):
        a = random_crossed(ctx, random.Random(1))
        one = CrossedElement.one(ctx)
        assert one * a == a
        assert a * one == a

    def test_terms_merge_by_diffeo(self, ctx, phi):
        f = ctx.frame("x1")
        merged = CrossedElement.term(f, phi) + CrossedElement.term(f, phi)
        assert merged == CrossedElement.term(f * 2, phi)
        assert (merged - merged).is_zero()

    def test_associativity(self, ctx):
        rng = random.Random(3)
        a, b, c = (random_crossed(ctx, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)


class TestAction:
    """X, Y and the deltas acting on f U*_phi."""

    def test_horizontal_field(self, ctx):
        """X(x y) = y^2."""
        a = CrossedElement.term(ctx.frame("x1*y1_1"))
        assert act(x_gen, a) == CrossedElement.term(ctx.frame("y1_1**2"))

    def test_vertical_field(self, ctx):
        a = CrossedElement.term(ctx.frame("y1_1**3"))
        assert act(y_gen, a) == CrossedElement.term(ctx.frame("3*y1_1**3"))

    def test_delta_multiplies_by_gamma(self, ctx, phi):
        a = CrossedElement.term(FrameFunction.constant(ctx, 1), phi)
        assert act(d1, a) == CrossedElement.term(gamma(phi, 1, 1, 1), phi)

    def test_delta_kills_identity_terms(self, ctx):
        assert act(d1, CrossedElement.one(ctx)).is_zero()

    def test_codim_mismatch(self, ctx):
        with pytest.raises(CodimensionMismatchError):
            act(HopfElement.generator(X1, 2), CrossedElement.one(ctx))

    @pytest.mark.parametrize("h", [x_gen, y_gen, d1, x_gen * d1])
    def test_module_algebra_law(self, ctx, h):
        rng = random.Random(11)
        a, b = random_crossed(ctx, rng), random_crossed(ctx, rng)
        assert verify_hopf_action(h, a, b)

    @pytest.mark.parametrize("codim,random_elements,eps_order", [(1, 3, 3), (2, 20, 2)])
    def test_action_suite(self, codim, random_elements, eps_order):
        report = verify_action_suite(codim=codim, random_elements=random_elements, seed=0, eps_order=eps_order)
        assert report.passed, report.first_failure()
        assert report.suite == "action"


class TestSchwarzian:
    def test_schwarzian_of_quadratic_jet(self, ctx, phi):
        """{x + eps x^2; x} = -6 eps^2 + O(eps^3) at x = 0."""
        value = schwarzian_series(phi).evaluate([0], [[1]])
        assert value.coefficients[:3] == (0, 0, -6)

    def test_schwarzian_action(self, ctx, phi):
        assert verify_schwarzian_action(phi)
        assert verify_schwarzian_action(phi, ctx.frame("x1 + y1_1"))

    def test_codim_two_is_rejected(self):
        ctx2 = JetContext(2, eps_order=1)
        with pytest.raises(UnsupportedCodimensionError):
            schwarzian_series(ctx2.identity())


class TestRank:
    def test_columns(self):
        assert len(rank_columns(1)) == 4
        assert len(rank_columns(2)) == 15

    @pytest.mark.parametrize("degree_cap", [1, 2])
    def test_full_rank(self, degree_cap):
        assert rank_sanity(degree_cap, sample_count=8, seed=0, eps_order=4)

    def test_cap_range(self):
        with pytest.raises(DegreeError):
            rank_sanity(4, 1)
