"""
Tests for relative Hopf-cyclic cochains of Lie pairs.
"""

import random
from fractions import Fraction

import pytest

from app.services.algebra_core import UNIT, PBWMonomial
from app.services.chevalley_eilenberg import ChevalleyEilenbergComplex
from app.services.lie_pairs import GModule, LiePair, random_solvable_pair
from app.services.relative_cyclic import (
    QuotientCoalgebra,
    RelativeCyclicModule,
    adjoint_action_agreement,
    antisymmetrize_alpha,
    coalgebra_ops,
    coproduct_lift_independence,
    derive_cn,
    project_mu,
    quotient_project,
    relative_cyclic_ops,
    sayd_check,
    transfer_phi,
    transfer_psi,
    verify_relative_suite,
)
from app.utils.exceptions import DegreeError, IndexOutOfRangeError, TruncationOverflowError


@pytest.fixture(scope="module")
def affine():
    return LiePair.affine_line()


@pytest.fixture(scope="module")
def rel(affine):
    return RelativeCyclicModule(affine, 3)


def monomial(pair, *indices):
    return PBWMonomial(pair.symbol(i) for i in indices)


class TestQuotientCoalgebra:
    """C = U(g)/U(g)h+ for aff(1)/Y."""

    def test_projection(self, affine):
        x, y = affine.symbol(0), affine.symbol(1)
        assert quotient_project(affine, {(y, x): 1}) == {monomial(affine, 0): 1}
        assert quotient_project(affine, {(x, y): 1}) == {}

    def test_projection_overflow(self, affine):
        x = affine.symbol(0)
        with pytest.raises(TruncationOverflowError):
            quotient_project(affine, {(x, x): 1}, degree_cap=1)

    def test_coproduct_and_counit(self, affine):
        x = monomial(affine, 0)
        coproduct, counit = coalgebra_ops(affine, {x: Fraction(1)})
        assert coproduct == {(x, UNIT): 1, (UNIT, x): 1}
        assert counit == 0
        assert coalgebra_ops(affine, {UNIT: Fraction(3)})[1] == 3

    def test_coproduct_of_square(self, affine):
        xx = monomial(affine, 0, 0)
        x = monomial(affine, 0)
        assert QuotientCoalgebra(affine).coproduct(xx) == {(xx, UNIT): 1, (x, x): 2, (UNIT, xx): 1}

    def test_left_multiplication_by_h(self, affine):
        """Y . X^k = k X^k in C."""
        coalgebra = QuotientCoalgebra(affine)
        assert coalgebra.left_multiply(monomial(affine, 1), monomial(affine, 0, 0)) == {monomial(affine, 0, 0): 2}

    def test_lift_independence(self, affine):
        assert coproduct_lift_independence(affine, trials=5) is None

    def test_adjoint_action(self, affine):
        assert adjoint_action_agreement(affine, 3)


class TestSAYD:
    def test_character_module_is_sayd(self, affine):
        assert sayd_check(affine) == (True, None)

    def test_corrupted_module_fails(self, affine):
        ok, witness = sayd_check(affine, GModule.character([1, 1], name="broken"))
        assert not ok
        assert witness.startswith("m0")

    def test_trivial_module_on_solvable_pair(self):
        pair = random_solvable_pair(3, random.Random(2))
        assert sayd_check(pair)[0]


class TestCochainSpaces:
    """Coinvariant spaces M (x)_K C^(x)n cut at the degree cap."""

    def test_degree_zero_vanishes(self, rel):
        assert rel.space(0).dim == 0

    def test_degree_one_is_spanned_by_x(self, rel, affine):
        space = rel.space(1)
        assert space.dim == 1
        assert space.free == [(0, monomial(affine, 0))]

    def test_cap_must_be_positive(self, affine):
        with pytest.raises(DegreeError):
            RelativeCyclicModule(affine, 0)

    def test_make_checks_slots_and_cap(self, rel, affine):
        with pytest.raises(DegreeError):
            rel.make(2, {(0, monomial(affine, 0)): Fraction(1)})
        with pytest.raises(TruncationOverflowError):
            rel.make(1, {(0, monomial(affine, 0, 0, 0, 0)): Fraction(1)})

    def test_rendering(self, rel, affine):
        c = rel.make(1, {(0, monomial(affine, 0)): Fraction(2)})
        assert c.format() == "2 m0 ox X"
        assert rel.make(1, {(0, UNIT): Fraction(1)}).is_zero()

    def test_factory(self, affine):
        assert relative_cyclic_ops(affine, 2).cap == 2


class TestOperators:
    def test_face_index_range(self, rel, affine):
        c = rel.make(1, {(0, monomial(affine, 0)): Fraction(1)})
        with pytest.raises(IndexOutOfRangeError):
            rel.face(3, c)

    def test_cyclic_on_degree_zero(self, rel):
        with pytest.raises(DegreeError):
            rel.cyclic(rel.make(0, {}))

    def test_tau_power_is_identity(self, rel):
        rng = random.Random(4)
        c = rel.random_cochain(2, rng)
        assert rel.cyclic(rel.cyclic(rel.cyclic(c))) == c

    def test_b_squared_vanishes(self, rel):
        rng = random.Random(5)
        c = rel.random_cochain(1, rng)
        assert rel.hochschild_b(rel.hochschild_b(c)).is_zero()

    def test_transfer_round_trip(self, rel):
        rng = random.Random(6)
        c = rel.random_cochain(1, rng)
        assert transfer_phi(rel, transfer_psi(rel, c)) == c
        assert transfer_psi(rel, c).transfer


class TestChevalleyEilenbergComparison:
    """alpha, mu and the scalar relating B to d_h."""

    def test_mu_alpha_is_identity(self, rel, affine):
        ce = ChevalleyEilenbergComplex(affine)
        alpha = antisymmetrize_alpha(rel, 0, (0,))
        assert project_mu(rel, ce, alpha) == ce.reduce_chain(1, {(0, (0,)): Fraction(1)})

    def test_alpha_respects_the_cap(self, affine):
        small = RelativeCyclicModule(LiePair.affine_line_absolute(), 1)
        with pytest.raises(TruncationOverflowError):
            antisymmetrize_alpha(small, 0, (0, 1))

    def test_c1_on_absolute_affine_line(self):
        assert derive_cn(1, LiePair.affine_line_absolute()) == 1

    def test_c2_with_trivial_coefficients(self):
        assert derive_cn(2, LiePair.affine_line_absolute(), module=GModule.trivial(2)) == 1

    def test_relative_affine_line_is_indeterminate(self, affine):
        assert derive_cn(1, affine) is None

    def test_degree_range(self, affine):
        with pytest.raises(DegreeError):
            derive_cn(4, affine)


class TestRelativeSuite:
    def test_affine_line(self, affine):
        report = verify_relative_suite(affine, n_max=2, trials=3, seed=0, degree_cap=3)
        assert report.passed, report.first_failure()
        assert report.suite == "relative"
        assert report.details["degree_cap"] == 3

