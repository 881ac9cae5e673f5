"""
Tests for the codimension-1 cocycles.
"""

import pytest

from app.services.characteristic_classes import (
    ABBREVIATIONS,
    NAMED_COCYCLES,
    fundamental,
    godbillon_vey,
    hochschild_c,
    named_cocycle,
    schwarzian,
    verify_all,
)
from app.services.cyclic_complex import CyclicContext
from app.services.hopf_ops import ModularPair
from app.utils.exceptions import UnsupportedCodimensionError


class TestNamedCocycles:
    def test_renderings(self):
        assert godbillon_vey().format() == "d1"
        assert schwarzian().format() == "d2 - 1/2 d1^2"
        assert hochschild_c().format() == "d1 ox X + 1/2 d1^2 ox Y"
        assert fundamental().format() == "X ox Y - Y ox X - d1*Y ox Y"

    def test_lookup(self):
        cocycle = named_cocycle("schwarzian")
        assert cocycle.name == "schwarzian"
        assert cocycle.cochain.degree == 1
        assert set(NAMED_COCYCLES) == {"godbillon_vey", "schwarzian", "hochschild_c", "fundamental"}

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            named_cocycle("pontryagin")

    def test_abbreviations_cover_d1_to_d9(self):
        assert sorted(ABBREVIATIONS) == [f"d{n}" for n in range(1, 10)]
        assert ABBREVIATIONS["d3"].tail == (1, 1)


class TestClassSuite:
    """Transgression, cocycle and normalization identities."""

    def test_suite_passes(self):
        report = verify_all()
        assert report.passed, report.first_failure()
        assert report.suite == "classes"

    def test_suite_reports_each_identity(self):
        relations = [check.relation for check in verify_all().checks]
        assert "B(c) = d2 - 1/2 d1^2" in relations
        assert "Pi cyclic cocycle" in relations
        assert "fundamental normalized" in relations

    def test_untwisted_pair_breaks_transgression(self):
        report = verify_all(CyclicContext(1, ModularPair.untwisted(1)))
        assert not report.passed

    def test_codim_two_is_rejected(self):
        with pytest.raises(UnsupportedCodimensionError):
            verify_all(CyclicContext(2))
