import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatreach.domains import (PERIMETER_D, RIGHT_HALF_PLANE, SQUARE_D, Z0, Z1, Contour, make_area_rule,
                               make_boundary_rule, truncated_sector)
from heatreach.spaces import (UNIT, VERTEX, ComplexField, bergman_norm, l1_boundary_norm, llogl_functional,
                              omega0, omega_pi, pointwise_growth_check, smirnov_norm, vertex_weighted_norm)

SQ = make_area_rule(SQUARE_D, 10)


def test_bergman_unit_square():
    r = bergman_norm(lambda z: np.ones_like(z), SQUARE_D, rule=SQ)
    assert r.value == pytest.approx(np.pi / np.sqrt(2), rel=1e-13)


def test_bergman_vertex_weight_collapses():
    rule = make_area_rule(SQUARE_D, 10, levels=10)
    r = bergman_norm(lambda z: (z - Z0) * (z - Z1), SQUARE_D, VERTEX, rule)
    assert r.value == pytest.approx(np.pi / np.sqrt(2), rel=1e-12)


def test_bergman_half_plane():
    r = bergman_norm(lambda z: 1 / (z + 1) ** 2, RIGHT_HALF_PLANE, resolution=16, truncation_R=1e4)
    assert r.value == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-6)


def test_norm_report_json_fields():
    r = bergman_norm(lambda z: z, SQUARE_D, rule=SQ)
    d = json.loads(r.to_json())
    assert {"space", "domain", "weight", "value", "tail_bound", "refinement_delta"} <= set(d)


def test_vertex_weighted_norm_detects_divergence():
    r = vertex_weighted_norm(lambda z: np.ones_like(z))
    assert r.extra["diverges"] and not np.isfinite(r.value)
    assert r.extra["diverges_at"] == ["z0", "z1"]
    ok = vertex_weighted_norm(lambda z: (z - Z0) * (z - Z1))
    assert ok.value == pytest.approx(np.pi / np.sqrt(2), rel=1e-6)


def test_weight_consistency_on_real_axis():
    x = np.linspace(0.01, np.pi - 0.01, 50)
    for tau in (0.3, 1.0, 2.5):
        assert np.allclose(omega0(tau)(x), np.exp(x ** 2 / (2 * tau)) / tau, rtol=1e-14, atol=0)
        assert np.allclose(omega_pi(tau)(x), np.exp((np.pi - x) ** 2 / (2 * tau)) / tau, rtol=1e-14, atol=0)


def test_vertex_weight_rejects_vertex():
    with pytest.raises(ValueError):
        VERTEX(np.array([Z0]))


def test_smirnov_examples():
    one = smirnov_norm(lambda z: np.ones_like(z), 1)
    assert one.value == pytest.approx(PERIMETER_D, rel=1e-12)
    assert smirnov_norm(lambda z: np.zeros_like(z), 2).value == 0
    f = lambda z: z - np.pi / 2
    rule = make_boundary_rule(Contour.square(0.0), 64, panels=4, grade=12)
    direct = np.sqrt(rule.integrate(np.abs(f(rule.nodes)) ** 2))
    r = smirnov_norm(f, 2)
    assert r.value == pytest.approx(direct, abs=1e-8) and r.monotone


def test_llogl_examples():
    assert llogl_functional(lambda z: np.ones_like(z)) == 0
    assert llogl_functional(lambda z: np.full(np.shape(z), 0.5 + 0j)) == 0
    assert llogl_functional(lambda z: np.full(np.shape(z), np.e + 0j)) == pytest.approx(np.e * PERIMETER_D, rel=1e-12)


def test_smirnov_ordering():
    # finite E^2 norm implies finite L log L and E^1 values
    for f in (lambda z: np.exp(z), lambda z: 1 / (z + 1), lambda z: z ** 3):
        assert np.isfinite(smirnov_norm(f, 2).value)
        assert np.isfinite(llogl_functional(f))
        assert np.isfinite(smirnov_norm(f, 1).value)


def test_pointwise_growth_examples():
    one = pointwise_growth_check(lambda z: np.ones_like(z), SQUARE_D, np.pi / np.sqrt(2), SQ)
    assert one.worst_ratio <= 1
    zero = pointwise_growth_check(lambda z: np.zeros_like(z), SQUARE_D, 0.0, SQ)
    assert zero.worst_ratio == 0
    f = lambda z: 1 / (z - (np.pi / 2 + 1j * np.pi / 2 + 0.1))
    n = bergman_norm(f, SQUARE_D, rule=make_area_rule(SQUARE_D, 16, levels=10)).value
    assert pointwise_growth_check(f, SQUARE_D, n, SQ).holds


def test_sector_tail_is_reported():
    r = bergman_norm(lambda z: 1 / (z + 1) ** 2, truncated_sector(16.0), resolution=8)
    assert r.tail_bound == 0.0 or r.tail_bound < 1e-2


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
       st.integers(0, 3))
def test_norm_homogeneity(c, k):
    f = lambda z: np.exp(k * z) / (z + 2)
    a = bergman_norm(f, SQUARE_D, rule=SQ).value
    b = bergman_norm(lambda z: c * f(z), SQUARE_D, rule=SQ).value
    assert b == pytest.approx(abs(c) * a, rel=1e-13, abs=1e-300)
    s1 = smirnov_norm(f, 1, [0.1], nodes_per_side=16).value
    s2 = smirnov_norm(lambda z: c * f(z), 1, [0.1], nodes_per_side=16).value
    assert s2 == pytest.approx(abs(c) * s1, rel=1e-12, abs=1e-300)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 0.9), st.floats(0.1, 0.9))
def test_subdomain_monotonicity(p, q):
    # restricting an integral to a sub-square of D (lower-left corner) never increases the norm
    f = lambda z: np.exp(1j * z) + z
    full = bergman_norm(f, SQUARE_D, rule=SQ).value
    u = (SQ.nodes * np.conj(Z1)).real / abs(Z1) ** 2
    v = (SQ.nodes * np.conj(Z0)).real / abs(Z0) ** 2
    m = (u < p) & (v < q)
    sub = np.sqrt(np.sum(np.abs(f(SQ.nodes[m])) ** 2 * SQ.weights[m]))
    assert sub <= full


def test_complex_field_scaled():
    F = ComplexField.from_function(lambda z: z ** 2, SQ)
    G = F.scaled(2j)
    assert np.allclose(G.values, 2j * F.values)
    assert G(1.0 + 0j) == 2j
