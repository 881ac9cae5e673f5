"""
Tests for the relative Chevalley-Eilenberg complexes.
"""

from fractions import Fraction

import pytest

from app.services.chevalley_eilenberg import (
    ChevalleyEilenbergComplex,
    chain_to_vector,
    homology_dims,
    sort_wedge,
    wedge_chain,
)
from app.services.lie_pairs import GModule, LieAlgebraSpec, LiePair


def heisenberg_pair() -> LiePair:
    return LiePair(LieAlgebraSpec(["p", "q", "z"], {(0, 1): {2: 1}}), [], name="heis")


class TestWedges:
    def test_sort_wedge(self):
        assert sort_wedge((2, 0, 1)) == (1, (0, 1, 2))
        assert sort_wedge((1, 0)) == (-1, (0, 1))
        assert sort_wedge((1, 1)) == (0, ())

    def test_wedge_chain(self):
        pair = LiePair.affine_line_absolute()
        assert wedge_chain(pair, 0, (1, 0)) == {(0, (0, 1)): Fraction(-1)}
        assert wedge_chain(pair, 0, (1, 1)) == {}
        assert chain_to_vector({(0, ()): Fraction(2)}) == {0: Fraction(2)}


class TestChains:
    """Coinvariant chains and the boundary d_h."""

    def test_relative_affine_chain_spaces(self):
        complex_ = ChevalleyEilenbergComplex(LiePair.affine_line())
        assert complex_.chain_space(0).dim == 0
        assert complex_.chain_space(1).dim == 1

    def test_relative_affine_homology(self):
        assert homology_dims(LiePair.affine_line()) == {0: 0, 1: 1}

    def test_absolute_affine_homology(self):
        assert homology_dims(LiePair.affine_line_absolute()) == {0: 0, 1: 1, 2: 1}

    def test_absolute_affine_trivial_coefficients(self):
        pair = LiePair.affine_line_absolute().with_module(GModule.trivial(2))
        assert homology_dims(pair) == {0: 1, 1: 1, 2: 0}

    def test_heisenberg_betti_numbers(self):
        assert homology_dims(heisenberg_pair()) == {0: 1, 1: 2, 2: 2, 3: 1}

    def test_boundary_of_top_wedge(self):
        complex_ = ChevalleyEilenbergComplex(heisenberg_pair())
        assert complex_.boundary({(0, (0, 1)): Fraction(1)}) == {(0, (2,)): Fraction(-1)}

    @pytest.mark.parametrize(
        "pair",
        [LiePair.affine_line(), LiePair.affine_line_absolute(), heisenberg_pair()],
        ids=["aff-rel", "aff-abs", "heis"],
    )
    def test_boundary_squared_vanishes(self, pair):
        assert ChevalleyEilenbergComplex(pair).boundary_squared_vanishes()


class TestCochains:
    def test_heisenberg_cohomology(self):
        assert ChevalleyEilenbergComplex(heisenberg_pair()).cohomology_dims() == {0: 1, 1: 2, 2: 2, 3: 1}

    def test_relative_affine_cohomology_vanishes(self):
        dims = ChevalleyEilenbergComplex(LiePair.affine_line()).cohomology_dims()
        assert dims == {0: 0, 1: 0}

    @pytest.mark.parametrize("pair", [LiePair.affine_line_absolute(), heisenberg_pair()], ids=["aff", "heis"])
    def test_differential_squared_vanishes(self, pair):
        assert ChevalleyEilenbergComplex(pair).differential_squared_vanishes()
