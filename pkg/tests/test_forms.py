"""
Tests for exterior forms and the Godbillon-Vey pullback.
"""

import sympy
import pytest

from app.services.forms import (
    JET_COORDS,
    SIMPLEX_COORDS,
    T_SYM,
    DifferentialForm,
    gv_form,
    gv_pullback,
    gv_pullback_check,
    verify_gv,
)
from app.services.numeric_trace import X_SYM, Y_SYM, get_diffeo
from app.utils.exceptions import DegreeError, SupportError

x, y = X_SYM, Y_SYM
r, theta = sympy.symbols("r theta", positive=True)
PLANE = (x, y)


def dx(coords=PLANE):
    return DifferentialForm.differential(coords, coords[0])


def dy(coords=PLANE):
    return DifferentialForm.differential(coords, coords[1])


class TestExteriorAlgebra:
    def test_wedge_is_alternating(self):
        assert (dx() ^ dy()).components == (-(dy() ^ dx())).components
        assert (dx() ^ dx()).is_zero()

    def test_exterior_derivative(self):
        f = DifferentialForm.function(PLANE, x * y)
        expected = DifferentialForm(PLANE, 1, {(0,): y, (1,): x})
        assert f.d().components == expected.components

    def test_d_squared_vanishes(self):
        f = DifferentialForm.function(SIMPLEX_COORDS, sympy.sin(X_SYM) * Y_SYM ** 2 * T_SYM)
        assert f.d().d().is_zero()

    def test_polar_pullback(self):
        """dx ^ dy = r dr ^ dtheta."""
        area = dx() ^ dy()
        pulled = area.pullback((r, theta), {x: r * sympy.cos(theta), y: r * sympy.sin(theta)})
        assert sympy.simplify(pulled.coefficient(r, theta) - r) == 0

    def test_degree_mismatch(self):
        with pytest.raises(DegreeError):
            dx() + DifferentialForm.function(PLANE, 1)
        with pytest.raises(DegreeError):
            DifferentialForm(PLANE, 2, {(0,): 1})

    def test_coordinate_mismatch(self):
        with pytest.raises(DegreeError):
            dx() ^ dx(JET_COORDS)


class TestGodbillonVey:
    """Pullback along the geodesic jet map of the interpolated connection."""

    def test_gv_form(self):
        assert gv_form().coefficient(*JET_COORDS) == Y_SYM ** -3

    def test_affine_map_pulls_back_to_zero(self):
        assert gv_pullback(get_diffeo("affine")).is_zero()

    @pytest.mark.parametrize("name", ["cubic", "quintic"])
    def test_pointwise_identity(self, name):
        assert gv_pullback_check(get_diffeo(name))

    def test_cubic_coefficient(self):
        """-(1/y) (log phi')' with phi' = 1 + 3x^2."""
        coefficient = gv_pullback(get_diffeo("cubic")).coefficient(T_SYM, X_SYM, Y_SYM)
        expected = -6 * X_SYM / ((1 + 3 * X_SYM ** 2) * Y_SYM)
        assert sympy.simplify(coefficient - expected) == 0

    def test_inverse_map_is_rejected(self):
        with pytest.raises(SupportError):
            gv_pullback_check(get_diffeo("cubic^-1"))

    def test_suite(self):
        report = verify_gv("cubic", seed=0)
        assert report.passed, report.first_failure()
        assert report.suite == "gv-pullback"
