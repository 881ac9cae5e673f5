"""
Tests for Lie algebras by structure constants, Lie pairs and the pair file loader.
"""

import json
import random
from fractions import Fraction

import pytest
import sympy

from app.services.lie_pairs import (
    GModule,
    LieAlgebraSpec,
    LiePair,
    LinearQuotient,
    load_lie_pair,
    parse_rational,
    random_solvable_pair,
)
from app.utils.exceptions import InvalidLiePairError

AFFINE_DOCUMENT = {
    "dim": 2,
    "names": ["X", "Y"],
    "brackets": [[1, 0, [{"k": 0, "coeff": 1}]]],
    "subalgebra": [1],
    "module": {"dim": 1, "action": [[[0]], [[1]]]},
}


def heisenberg() -> LieAlgebraSpec:
    return LieAlgebraSpec(["p", "q", "z"], {(0, 1): {2: 1}})


class TestLieAlgebraSpec:
    def test_antisymmetric_completion(self):
        algebra = LieAlgebraSpec(["X", "Y"], {(1, 0): {0: 1}})
        assert algebra.bracket(1, 0) == {0: 1}
        assert algebra.bracket(0, 1) == {0: -1}
        assert algebra.nonzero_brackets() == [(0, 1, {0: Fraction(-1)})]

    def test_abelian(self):
        assert LieAlgebraSpec(["a", "b"], {}).is_abelian
        assert not heisenberg().is_abelian

    def test_jacobi_failure(self):
        with pytest.raises(InvalidLiePairError) as info:
            LieAlgebraSpec(["a", "b", "c"], {(0, 1): {2: 1}, (1, 2): {1: 1}})
        assert info.value.details["triple"] == ["a", "b", "c"]

    def test_inconsistent_antisymmetry(self):
        with pytest.raises(InvalidLiePairError):
            LieAlgebraSpec(["a", "b"], {(0, 1): {0: 1}, (1, 0): {0: 1}})

    def test_self_bracket_must_vanish(self):
        with pytest.raises(InvalidLiePairError):
            LieAlgebraSpec(["a"], {(0, 0): {0: 1}})

    def test_index_range(self):
        with pytest.raises(InvalidLiePairError):
            LieAlgebraSpec(["a", "b"], {(0, 1): {5: 1}})


class TestLiePair:
    """Subalgebra closure, module checks and the PBW order of U(g)."""

    def test_affine_line(self):
        pair = LiePair.affine_line()
        assert pair.complement == (0,)
        assert pair.subalgebra == (1,)
        assert pair.module.act(1, 0) == {0: 1}

    def test_subalgebra_must_close(self):
        with pytest.raises(InvalidLiePairError):
            LiePair(heisenberg(), [0, 1])

    def test_module_defect(self):
        bad = GModule.character([1, 1])
        with pytest.raises(InvalidLiePairError) as info:
            LiePair.affine_line().with_module(bad)
        assert info.value.details["witness"] == "rho([X, Y])"

    def test_complement_generators_come_first(self):
        pair = LiePair.affine_line()
        x, y = pair.symbol(0), pair.symbol(1)
        assert x < y
        normal = pair.engine.normal_word((y, x))
        assert set(normal) == {(x, y), (x,)}
        assert pair.format_monomial((x, y)) == "X*Y"
        assert pair.format_monomial(()) == "1"

    def test_trivial_module_is_default(self):
        pair = LiePair(heisenberg(), [2])
        assert pair.module.name == "trivial"
        assert pair.module.act(0, 0) == {}

    @pytest.mark.parametrize("seed", range(5))
    def test_random_solvable_pairs_are_valid(self, seed):
        pair = random_solvable_pair(4, random.Random(seed))
        assert pair.algebra.jacobi_witness() is None
        assert pair.module.module_defect(pair.algebra) is None


class TestGModule:
    def test_act_word(self):
        module = GModule(2, [sympy.Matrix([[0, 1], [0, 0]])])
        assert module.act(0, 1) == {0: 1}
        assert module.act_word([0, 0], 1) == {}

    def test_shape_check(self):
        with pytest.raises(InvalidLiePairError):
            GModule(2, [sympy.eye(3)])


class TestLinearQuotient:
    def test_reduce_identifies_related_vectors(self):
        space = LinearQuotient(["a", "b", "c"], [{"a": Fraction(1), "b": Fraction(-1)}])
        assert space.dim == 2
        assert space.reduce({"a": Fraction(1)}) == space.reduce({"b": Fraction(1)})
        assert space.reduce({"a": Fraction(1), "b": Fraction(-1)}) == {}

    def test_coordinates(self):
        space = LinearQuotient(["a", "b"], [{"a": Fraction(2)}])
        assert space.free == ["b"]
        assert space.coordinates({"a": Fraction(5), "b": Fraction(3)}) == [Fraction(3)]

    def test_no_relations(self):
        space = LinearQuotient([0, 1, 2], [])
        assert space.dim == 3
        assert 1 in space


class TestLoader:
    """Reading pair files."""

    def test_parse_rational(self):
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational(-2) == -2
        with pytest.raises(InvalidLiePairError):
            parse_rational("1/0")

    def test_load_affine_pair(self, tmp_path):
        path = tmp_path / "affine.json"
        path.write_text(json.dumps(AFFINE_DOCUMENT), encoding="utf-8")
        pair = load_lie_pair(path)
        assert pair.name == "affine"
        assert pair.algebra.bracket(1, 0) == {0: 1}
        assert pair.module.act(1, 0) == {0: 1}

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"dim": 0}), encoding="utf-8")
        with pytest.raises(InvalidLiePairError):
            load_lie_pair(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidLiePairError):
            load_lie_pair(tmp_path / "absent.json")

    def test_wrong_number_of_action_matrices(self, tmp_path):
        document = dict(AFFINE_DOCUMENT, module={"dim": 1, "action": [[[0]]]})
        path = tmp_path / "short.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(InvalidLiePairError):
            load_lie_pair(path)
