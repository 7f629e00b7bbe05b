import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatreach.domains import (AREA_D, PERIMETER_D, SECTOR_DELTA, SQUARE_D, Z0, Z1, Contour,
                               boundary_distance, contains, dilated_square, far_field_constant,
                               gauss_legendre, graded_breaks, make_area_rule, make_boundary_rule,
                               panel_rule, truncated_sector, winding_number)


def test_contains_examples():
    assert contains(SQUARE_D, np.pi / 2)
    assert not contains(SQUARE_D, Z0)
    assert contains(SECTOR_DELTA, 1 + 0.5j)


def test_boundary_distance_examples():
    assert boundary_distance(SQUARE_D, np.pi / 2) == pytest.approx(np.pi / (2 * np.sqrt(2)), abs=1e-15)
    assert boundary_distance(SQUARE_D, Z0) == pytest.approx(0.0, abs=1e-15)
    assert boundary_distance(SQUARE_D, np.pi / 2 + 1j * np.pi / 4) == pytest.approx(np.pi / (4 * np.sqrt(2)), abs=1e-15)


def test_vertex_distance_outside_corner():
    # beyond the corner 0 the nearest boundary point is the vertex itself
    z = -0.3 + 0.0j
    assert boundary_distance(SQUARE_D, z) == pytest.approx(0.3, abs=1e-15)


def test_square_area_and_symmetry():
    rule = make_area_rule(SQUARE_D, 8)
    assert rule.integrate(np.ones(len(rule))) == pytest.approx(AREA_D, rel=1e-13)
    assert abs(rule.integrate(rule.nodes - np.pi / 2)) < 1e-13


def test_sector_gaussian_matches_refined_rule():
    f = lambda z: np.exp(-(z * z).real)
    coarse = make_area_rule(truncated_sector(10.0), 8)
    fine = make_area_rule(truncated_sector(10.0), 32)
    # oracle: the radial integral in closed form, then scipy quad over the angle,
    # int (1 - e^{-100 cos 2t}) / (2 cos 2t) dt on (-pi/4, pi/4)
    exact = 2.9377415044559574
    a, b = coarse.integrate(f(coarse.nodes)), fine.integrate(f(fine.nodes))
    assert abs(a - b) < 1e-6
    assert b == pytest.approx(exact, rel=1e-9)


def test_unbounded_needs_truncation():
    with pytest.raises(ValueError):
        make_area_rule(SECTOR_DELTA, 8)


def test_boundary_rule_examples():
    rule = make_boundary_rule(Contour.square(0.0), 64)
    assert rule.integrate(np.ones(len(rule))) == pytest.approx(PERIMETER_D, abs=1e-10)
    assert abs(rule.contour_integrate(np.ones(len(rule)))) < 1e-10
    g = make_boundary_rule(Contour.square(0.0), 64, panels=4, grade=8)
    assert abs(g.contour_integrate(1 / (g.nodes - np.pi / 2)) - 2j * np.pi) < 1e-8
    assert winding_number(g, np.pi / 2) == pytest.approx(1.0, abs=1e-12)


def test_side_orientation():
    s = Contour.square(0.0).sides
    assert [x.label for x in s] == ["g1+", "g1-", "g2-", "g2+"]
    assert s[0].start == Z0 and s[1].end == Z1


def test_far_field_constant_decreases_with_margin():
    assert far_field_constant(1.0) < far_field_constant(0.5)


def test_far_field_inequality_at_nodes():
    a = 0.5
    C = far_field_constant(a)
    r = np.geomspace(0.3, 30, 40)
    th = np.linspace(0, 2 * np.pi, 60, endpoint=False)
    z = (np.pi / 2 + r[:, None] * np.exp(1j * th[None, :])).ravel()
    z = z[contains(SECTOR_DELTA, z) & ~contains(dilated_square(a), z)]
    assert np.all(np.abs(z) + 1 <= C * boundary_distance(SQUARE_D, z) * (1 + 1e-12))


def test_gauss_legendre_exactness():
    x, w = gauss_legendre(10)
    assert np.sum(w * x ** 18) == pytest.approx(2 / 19, rel=1e-13)


def test_graded_breaks_reach_endpoint():
    br = graded_breaks(0.0, 1.0, panels=2, grade_left=10)
    assert br[0] == 0 and br[-1] == 1 and br[1] <= 2.0 ** -10 + 1e-15
    t, w = panel_rule(br, 8)
    assert np.sum(w * np.sqrt(t)) == pytest.approx(2 / 3, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, np.pi - 0.05), st.floats(-1.5, 1.5))
def test_distance_zero_iff_on_boundary_and_lipschitz(x, y):
    z = complex(x, y)
    d = boundary_distance(SQUARE_D, z)
    assert d >= 0
    h = 1e-3
    d2 = boundary_distance(SQUARE_D, z + h)
    assert abs(d2 - d) <= h * (1 + 1e-9)
    if contains(SQUARE_D, z):
        assert d > 0


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 12))
def test_square_rule_integrates_quadratics(res):
    rule = make_area_rule(SQUARE_D, res)
    # int_D |z - pi/2|^2 dA = (side^4)/6 for a square centred at pi/2
    side = np.pi / np.sqrt(2)
    assert rule.integrate(np.abs(rule.nodes - np.pi / 2) ** 2) == pytest.approx(side ** 4 / 6, rel=1e-12)
