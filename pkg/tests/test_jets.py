"""
Tests for formal jets of diffeomorphisms and the delta cocycles.
"""

import random
from fractions import Fraction
from itertools import product

import pytest

from app.services.jets import (
    DeformationScalar,
    FrameFunction,
    JetContext,
    compose,
    delta_symbols,
    gamma,
    invert,
    random_diffeo,
    verify_gamma_cocycle,
    verify_jet_suite,
)
from app.utils.exceptions import CodimensionMismatchError, IndexOutOfRangeError, SingularJetError


@pytest.fixture(scope="module")
def ctx():
    return JetContext(1, eps_order=3)


class TestDeformationScalar:
    """Truncated series arithmetic."""

    def test_product_truncates(self):
        a = DeformationScalar([1, 1], 2)
        assert a * a == DeformationScalar([1, 2, 1], 2)
        assert (a * a * a).coefficients == (1, 3, 3)

    def test_inverse(self):
        a = DeformationScalar([1, 2], 3)
        assert a.inverse() == DeformationScalar([1, -2, 4, -8], 3)
        assert a * a.inverse() == DeformationScalar.constant(1, 3)

    def test_singular_inverse(self):
        with pytest.raises(SingularJetError):
            DeformationScalar([0, 1], 2).inverse()

    def test_format(self):
        assert DeformationScalar([Fraction(1, 2), 0, 3], 2).format() == "1/2 + 3*eps^2"
        assert DeformationScalar([], 2).format() == "0"


class TestFormalDiffeo:
    def test_eps_zero_part_must_be_affine(self, ctx):
        x = ctx.x[0]
        with pytest.raises(SingularJetError):
            ctx.diffeo([x + x ** 2])

    def test_singular_linear_part(self, ctx):
        with pytest.raises(SingularJetError):
            ctx.diffeo([ctx.eps * ctx.x[0]])

    def test_component_count(self, ctx):
        with pytest.raises(CodimensionMismatchError):
            ctx.diffeo([ctx.x[0], ctx.x[0]])

    def test_compose_with_inverse(self, ctx):
        x, eps = ctx.x[0], ctx.eps
        phi = ctx.diffeo([2 * x + 1 + eps * x ** 2])
        assert compose(phi, invert(phi)) == ctx.identity()
        assert compose(invert(phi), phi) == ctx.identity()

    def test_linear_part(self, ctx):
        x, eps = ctx.x[0], ctx.eps
        phi = ctx.diffeo([3 * x + eps * x])
        assert phi.linear_part() == [[DeformationScalar([3, 1], 3)]]

    def test_contexts_do_not_mix(self, ctx):
        other = JetContext(1, eps_order=3)
        with pytest.raises(CodimensionMismatchError):
            compose(ctx.identity(), other.identity())


class TestGamma:
    """The delta cocycles gamma^i_{jk;tail}."""

    def test_gamma_of_quadratic_jet(self, ctx):
        """gamma(x + eps x^2) = 2 eps y / (1 + 2 eps x)."""
        x, eps = ctx.x[0], ctx.eps
        g = gamma(ctx.diffeo([x + eps * x ** 2]), 1, 1, 1)
        assert g.evaluate([0], [[2]]) == DeformationScalar([0, 4], 3)
        assert g.evaluate([1], [[1]]) == DeformationScalar([0, 2, -4, 8], 3)

    def test_gamma_of_affine_map_vanishes(self, ctx):
        assert gamma(ctx.affine([[2]], [1]), 1, 1, 1).is_zero()

    def test_index_range(self, ctx):
        with pytest.raises(IndexOutOfRangeError):
            gamma(ctx.identity(), 2, 1, 1)

    def test_delta_symbols(self):
        assert len(delta_symbols(1, 2)) == 3
        assert len(delta_symbols(2, 0)) == 6

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_cocycle_identity(self, ctx, seed):
        rng = random.Random(seed)
        phi, psi = random_diffeo(ctx, rng), random_diffeo(ctx, rng)
        assert verify_gamma_cocycle(phi, psi, tail_cap=2)

    def test_cocycle_identity_codim_two(self):
        ctx2 = JetContext(2, eps_order=2)
        rng = random.Random(5)
        phi, psi = random_diffeo(ctx2, rng), random_diffeo(ctx2, rng)
        assert verify_gamma_cocycle(phi, psi, tail_cap=1)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_once_differentiated_gammas_obey_structure_identity(self, seed):
        """gamma^p_{qk;l} - gamma^p_{ql;k} = sum_s gamma^p_{sk} gamma^s_{ql} - gamma^p_{sl} gamma^s_{qk}."""
        ctx2 = JetContext(2, eps_order=2)
        phi = random_diffeo(ctx2, random.Random(seed))
        for p, q, k, l in product((1, 2), repeat=4):
            lhs = gamma(phi, p, q, k, (l,)) - gamma(phi, p, q, l, (k,))
            rhs = FrameFunction.constant(ctx2, 0)
            for s in (1, 2):
                rhs = rhs + gamma(phi, p, s, k) * gamma(phi, s, q, l) - gamma(phi, p, s, l) * gamma(phi, s, q, k)
            assert lhs == rhs, (p, q, k, l)


class TestJetSuite:
    def test_suite_passes(self):
        report = verify_jet_suite(codim=1, cases=3, seed=0, eps_order=3)
        assert report.passed, report.first_failure()
        assert report.suite == "gamma-cocycle"
        assert report.details["eps_order"] == 3
