import math

import numpy as np
import pytest

from selfaffine.errors import InvalidParams
from selfaffine.families import (
    CURVES,
    curve_polyline,
    curve_residual,
    is_member,
    is_special,
    points_on_curve,
    sample_curve,
    special_point,
    table1_solutions,
)
from selfaffine.polynomials import Poly2, real_roots_in

# root of x^3 - 2x^2 + 3x - 1 in (0, 1), computed with mpmath at 30 digits
X0 = 0.430159709001946734975213
Y0 = X0 * X0 - X0 + 1


def test_curve_residual_examples():
    assert curve_residual("C", 0.5, 0.75) == 0.0
    assert curve_residual("A", 0.5, 0.5) == pytest.approx(-0.25, abs=1e-15)
    y = 0.5 + math.sqrt(0.75) / 3
    assert abs(curve_residual("B1", 0.5, 0.78868)) < 1e-4
    assert curve_residual(CURVES["B1"], 0.5, y) == pytest.approx(0.0, abs=1e-14)


def test_a_curve_identity():
    # y^3 + x y^2 - x^2 - y^2 == (x + y - 1) y^2 - x^2 at coefficient level
    rhs = Poly2({(1, 2): 1, (0, 3): 1, (0, 2): -1, (2, 0): -1})
    assert CURVES["A"].poly == rhs
    assert CURVES["A"].poly - rhs == Poly2({})


def test_b2_coefficients():
    # x^3 + (-y^2 + y - 2) x^2 + (-y^3 + 2y^2 - y + 1) x + y^2 - y
    p = CURVES["B2"].poly
    for x, y in [(0.3, 0.8), (0.61, 0.95), (1.7, 0.2)]:
        expected = x ** 3 + (-y * y + y - 2) * x * x + (-y ** 3 + 2 * y * y - y + 1) * x + y * y - y
        assert p(x, y) == pytest.approx(expected, abs=1e-14)


def test_member_examples():
    assert is_member(0.5, (7 - math.sqrt(17)) / 4) == {"S8"}
    assert is_member(0.4, 2 / 3) == {"S12"}
    assert is_member(0.5, 0.75) == {"C"}


def test_special_point_membership():
    # the printed decimals sit about 1e-5 off the curve
    assert is_member(0.43015, 0.75487, tol=1e-4) == {"C"}
    assert is_special(0.43015, 0.75487, tol=1e-4)
    assert is_member(X0, Y0) == {"C"}
    assert is_special(X0, Y0)
    assert special_point() == pytest.approx((X0, Y0), abs=1e-15)


def test_member_normalizes_first():
    # the Pbar3prime encoding of (2/3, 5/6) and a C-point in another region
    assert is_member(1.5, 0.75) == set()
    x, y = 0.5, 0.75
    s = x + y - 1
    assert is_member(1 / y, s / y) == {"C"}


def test_member_invalid():
    with pytest.raises(InvalidParams):
        is_member(0.2, 0.3)


def test_sample_c():
    assert sample_curve("C", 3) == pytest.approx([(0.25, 0.8125), (0.5, 0.75), (0.75, 0.8125)])


def test_a_at_fixed_y():
    xs = [p[0] for p in points_on_curve("A", y=0.9)]
    assert xs == pytest.approx([0.11686, 0.69314], abs=1e-5)


def test_b1_at_fixed_x():
    pts = points_on_curve("B1", x=0.5)
    assert [p[1] for p in pts] == pytest.approx([0.78868], abs=1e-5)


def test_points_on_curve_needs_one_coordinate():
    with pytest.raises(InvalidParams):
        points_on_curve("A")
    with pytest.raises(InvalidParams):
        sample_curve("C", 0)


@pytest.mark.parametrize("name", ["A", "B1", "B2", "C"])
def test_samples_lie_on_curve_inside_P(name):
    pts = sample_curve(name, 500)
    assert len(pts) > 100
    for x, y in pts:
        assert abs(curve_residual(name, x, y)) < 1e-12
        assert x < y and y < 1 and x + y > 1


def test_t_samples():
    pts = sample_curve("T", 4)
    assert pts == [(0.25, 1.0), (0.5, 1.0), (0.75, 1.0), (1.0, 1.0)]


def test_curves_pairwise_disjoint_on_sweep():
    """10^4 sampled points; all curves share the limit corners (0,1) and (1,1), so those are cut."""
    names = ["A", "B1", "B2", "C"]
    for a in names:
        for x, y in curve_polyline(a, 2500):
            if math.hypot(x, y - 1) < 0.02 or math.hypot(x - 1, y - 1) < 0.02:
                continue
            for b in names:
                if b != a:
                    assert CURVES[b].distance(x, y) > 1e-9


class TestSingularTable:
    printed = {1: (0.54368, 0.83928), 5: (0.47759, 0.81530), 9: (0.59100, 0.85403),
               12: (0.4, 0.66666)}

    def test_thirteen_rows(self):
        sols = table1_solutions()
        assert [s.id for s in sols] == list(range(1, 14))

    @pytest.mark.parametrize("k", [1, 5, 9, 12])
    def test_printed_values(self, k):
        s = table1_solutions()[k - 1]
        assert s.value == pytest.approx(self.printed[k], abs=1e-5)

    def test_row9_system(self):
        s = table1_solutions()[8]
        x, y = s.value
        assert x * x * y + 2 * y * y * x + y ** 3 - 4 * x * y - 4 * y * y + x + 3 * y == \
            pytest.approx(0, abs=1e-12)
        assert x * x + x * y - y == pytest.approx(0, abs=1e-12)

    def test_residuals_and_closed_forms(self):
        for s in table1_solutions():
            r1, r2 = s.residuals()
            assert abs(r1) < 1e-12 and abs(r2) < 1e-12
            x, y = s.value
            assert x + y > 1 and x < y < 1
            if s.closed_value is not None:
                assert s.value == pytest.approx(s.closed_value, abs=1e-14)
        assert [s.id for s in table1_solutions() if s.closed_form] == [5, 8, 12]

    def test_closed_form_values(self):
        s5 = table1_solutions()[4]
        assert s5.closed_value == pytest.approx(((9 - 4 * math.sqrt(2)) / 7,
                                                 (10 + math.sqrt(2)) / 14), abs=1e-15)
        assert s5.closed_value == pytest.approx((0.47759, 0.81530), abs=1e-5)

    def test_singular_points_not_on_family_curves(self):
        for s in table1_solutions():
            assert is_member(*s.value) == {s.name}


def test_real_roots_in():
    assert real_roots_in(np.array([1.0, -3.0, 2.0]), 0.0, 3.0) == pytest.approx([1.0, 2.0])
    assert real_roots_in(np.array([1.0, 0.0, 1.0]), -5, 5) == []
    assert real_roots_in(np.array([0.0, 0.0, 2.0]), -5, 5) == []
