"""
Tests for the floating-point crossed product, the invariant trace and the
characteristic map.
"""

import numpy as np
import pytest

from app.services.algebra_core import HopfElement, X1, delta_n
from app.services.characteristic_classes import fundamental, godbillon_vey
from app.services.numeric_trace import (
    IDENTITY,
    Box,
    NumericCrossed,
    NumericFunction,
    PolynomialDiffeo,
    act_numeric,
    chi_tau,
    composite_rule,
    compose_diffeos,
    get_diffeo,
    invert_diffeo,
    trace_quadrature,
    trace_with_drift,
    verify_characteristic_map,
    verify_trace_identities,
)
from app.utils.exceptions import DegreeError, SingularJetError, SupportError, UnsupportedCodimensionError


def bump(x_range=(-0.5, 0.5), y_range=(0.8, 1.5)):
    return NumericFunction.bump_function(x_range, y_range)


class TestQuadrature:
    def test_composite_rule_is_exact_on_polynomials(self):
        points, weights = composite_rule(0.0, 2.0, 8, 3)
        assert np.isclose(np.sum(weights * points ** 3), 4.0)
        assert np.isclose(np.sum(weights), 2.0)

    def test_trace_of_bump_is_positive(self):
        assert trace_quadrature(NumericCrossed.term(bump())) > 0

    def test_trace_ignores_non_identity_terms(self):
        a = NumericCrossed.term(bump(), get_diffeo("cubic"))
        assert trace_quadrature(a) == 0.0

    def test_support_must_fit_the_trace_box(self):
        wide = NumericCrossed.term(bump(x_range=(-5.0, 5.0)))
        with pytest.raises(SupportError):
            trace_quadrature(wide)

    def test_drift_is_small(self):
        value = trace_with_drift(NumericCrossed.term(bump()))
        assert value.drift < 1e-8


class TestDiffeos:
    """Global maps of the line."""

    def test_library(self):
        assert get_diffeo("identity") is IDENTITY
        assert get_diffeo("cubic^-1").name == "cubic^-1"
        with pytest.raises(SupportError):
            get_diffeo("sine")

    def test_inverse_round_trip(self):
        phi = get_diffeo("quintic")
        u = np.linspace(-2.0, 2.0, 9)
        assert np.allclose(phi.value(phi.inverse_value(u)), u)

    def test_inverse_derivative(self):
        phi = get_diffeo("cubic")
        inverse = invert_diffeo(phi)
        u = np.array([0.3, 1.1])
        assert np.allclose(inverse.derivatives(u)[0] * phi.derivatives(inverse.value(u))[0], 1.0)

    def test_compose_with_inverse_is_identity(self):
        phi = get_diffeo("cubic")
        assert compose_diffeos(phi, invert_diffeo(phi)) is IDENTITY
        assert invert_diffeo(invert_diffeo(phi)) == phi

    def test_critical_point_is_rejected(self):
        with pytest.raises(SingularJetError):
            PolynomialDiffeo("flat", [0.0, 0.0, 0.0, 1.0])

    def test_even_degree_is_rejected(self):
        with pytest.raises(SingularJetError):
            PolynomialDiffeo("square", [0.0, 1.0, 1.0])

    def test_box_operations(self):
        box = Box(-1.0, 1.0, 0.5, 2.0)
        assert box.contains(Box(0.0, 0.5, 1.0, 1.5))
        assert box.intersect(Box(2.0, 3.0, 0.5, 2.0)) is None


class TestCharacteristicMap:
    def test_action_needs_codim_one(self):
        with pytest.raises(UnsupportedCodimensionError):
            act_numeric(HopfElement.generator(X1, 2), NumericCrossed.term(bump()))

    def test_delta_on_identity_term_has_zero_trace(self):
        traced = trace_quadrature(act_numeric(HopfElement.generator(delta_n(1)), NumericCrossed.term(bump())))
        assert abs(traced) < 1e-12

    def test_argument_count(self):
        with pytest.raises(DegreeError):
            chi_tau(godbillon_vey(), [NumericCrossed.term(bump())])

    def test_degree_cap(self):
        elements = [NumericCrossed.term(bump())] * 4
        with pytest.raises(DegreeError):
            chi_tau(fundamental().tensor(godbillon_vey()), elements)


class TestSuites:
    """Trace identities and the characteristic map on the library maps."""

    @pytest.mark.parametrize("diffeo", ["cubic", "quintic"])
    def test_trace_identities(self, diffeo):
        report = verify_trace_identities(seed=0, diffeo=diffeo)
        assert report.passed, report.first_failure()
        assert report.suite == "trace"

    def test_characteristic_map(self):
        report = verify_characteristic_map(seed=0, diffeo="cubic")
        assert report.passed, report.first_failure()

    def test_characteristic_map_needs_polynomial_oracle(self):
        with pytest.raises(SupportError):
            verify_characteristic_map(diffeo="cubic^-1")
