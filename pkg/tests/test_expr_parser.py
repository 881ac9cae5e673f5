"""
Tests for the expression language.
"""

import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from app.cli.expr_parser import parse, parse_element, parse_tensor
from app.services.characteristic_classes import fundamental, schwarzian
from app.services.cyclic_complex import random_cochain
from app.utils.exceptions import ExpressionSyntaxError, IndexOutOfRangeError


class TestParsing:
    """Well-formed input."""

    def test_fundamental_round_trip(self):
        src = "X ox Y - Y ox X - d1*Y ox Y"
        assert parse_tensor(src) == fundamental()
        assert parse_tensor(src).format() == src

    def test_schwarzian(self):
        assert parse_tensor("d2 - 1/2 d1^2") == schwarzian()

    def test_products_are_normal_ordered(self):
        assert parse_element("Y*X").format() == "X + X*Y"

    def test_unparsed_words_are_kept(self):
        expr = parse("Y*X")
        assert expr.degree == 1
        assert len(expr.terms) == 1

    def test_group_expands_multilinearly(self):
        assert parse_tensor("2(X + Y) ox X") == parse_tensor("2 X ox X + 2 Y ox X")

    def test_leading_minus(self):
        assert parse_tensor("-X ox Y") == -parse_tensor("X ox Y")

    def test_indexed_generators_in_codim_two(self):
        expr = parse("d[1;1,2]*X[2] ox (Y[1,2] + 2)", codim=2)
        assert expr.degree == 2
        assert parse_tensor("X[2] ox Y[2,1]", codim=2).codim == 2

    @pytest.mark.parametrize("src", ["X", "  X  ", "X\n"])
    def test_whitespace(self, src):
        assert parse_element(src).format() == "X"


class TestErrors:
    """Malformed input and out-of-range symbols."""

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError) as info:
            parse("X[3]")
        assert info.value.details["column"] == 3

    def test_unexpected_token_position(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("X ox * Y")
        assert (info.value.line, info.value.column) == (1, 6)

    def test_position_on_second_line(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("X +\n  * Y")
        assert info.value.line == 2

    def test_unexpected_end(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("X +")
        assert "end of input" in info.value.message
        assert (info.value.line, info.value.column) == (1, 4)

    def test_unexpected_end_after_tensor_sign(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("d1 ox X +\n  Y ox")
        assert "end of input" in info.value.message
        assert (info.value.line, info.value.column) == (2, 7)

    def test_shorthand_needs_codim_one(self):
        with pytest.raises(ExpressionSyntaxError):
            parse("X", codim=2)

    def test_unknown_abbreviation(self):
        with pytest.raises(ExpressionSyntaxError):
            parse("d0")

    def test_zero_denominator(self):
        with pytest.raises(ExpressionSyntaxError, match="zero denominator"):
            parse("1/0 X")

    def test_mixed_degrees(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("X + X ox Y")
        assert info.value.column == 3

    def test_element_rejects_tensor(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_element("X ox Y")

    def test_error_code(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("(")
        assert info.value.error_code == "SYNTAX_ERROR"


class TestRoundTrip:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=3))
    def test_format_then_parse(self, seed, degree):
        """Canonical renderings parse back to the same cochain."""
        c = random_cochain(1, degree, random.Random(seed))
        assume(not c.is_zero())
        assert parse_tensor(c.format()) == c
