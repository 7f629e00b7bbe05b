import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatreach import cauchy as cz
from heatreach.domains import SECTOR_DELTA, Z0, Z1, contains, dilated_square, make_area_rule
from heatreach.verify import log_trace, square_grid

ONE = lambda z: np.ones(np.shape(z), dtype=complex)


@pytest.fixture(scope="module")
def ones():
    return cz.decompose(cz.BoundaryTrace(ONE))


def test_centre_values(ones):
    for p in ones:
        assert abs(p(np.pi / 2) - 0.5) < 1e-12
    assert abs(cz.reconstruct(ones, np.pi / 2 + 1j * np.pi / 4) - 1) < 1e-8
    lin = cz.decompose(cz.BoundaryTrace(lambda z: np.asarray(z, dtype=complex) - np.pi / 2))
    assert abs(cz.reconstruct(lin, np.pi / 2)) < 1e-12


def test_near_side_reconstruction(ones):
    # targets 1e-6 from a side still reproduce f through singularity subtraction
    z = np.array([Z0 / 2 + 1e-6 * np.exp(-1j * np.pi / 4), np.pi / 2 - 1j * (np.pi / 2 - 1e-5)])
    assert np.max(np.abs(cz.reconstruct(ones, z) - 1)) < 1e-8


def test_divisor():
    assert cz.P(0) == 2j * np.pi
    assert abs(cz.P(np.pi)) == pytest.approx(np.pi * np.sqrt(5), rel=1e-15)


def test_step_one_integrand_finite():
    rule = make_area_rule(SECTOR_DELTA, 12, 400.0)
    outside = ~contains(dilated_square(0.5), rule.nodes)
    z, w = rule.nodes[outside], rule.weights[outside]
    val = np.sum(w / (np.abs(cz.P(z)) ** 2 * (1 + np.abs(z)) ** 2))
    coarse = make_area_rule(SECTOR_DELTA, 6, 400.0)
    m = ~contains(dilated_square(0.5), coarse.nodes)
    val2 = np.sum(coarse.weights[m] / (np.abs(cz.P(coarse.nodes[m])) ** 2 * (1 + np.abs(coarse.nodes[m])) ** 2))
    assert np.isfinite(val) and abs(val - val2) < 0.05 * val


def test_far_field(ones):
    lo = cz.far_field_bound(ones[0], 0.5)
    assert lo.C_empirical <= 3 * lo.bound
    vals = list(lo.by_radius.values())
    assert max(vals) / min(vals) < 2  # consistent across radii
    hi = cz.far_field_bound(ones[0], 1.0)
    assert hi.C_a < lo.C_a
    zero = cz.decompose(cz.BoundaryTrace(lambda z: 0 * ONE(z)))
    r = cz.far_field_bound(zero[1])
    assert r.C_empirical == 0 and r.bound == 0
    with pytest.raises(ValueError):
        cz.far_field_bound(ones[0], 0.5, probes=[np.pi / 2])


def test_side_map_endpoints(ones):
    g1p = ones[0]
    assert g1p.to_w(0) == 1
    assert g1p.to_w((1 + 1j) * np.pi / 2) == 0


def test_near_field_two_routes(ones):
    r = cz.near_field_membership(ones[0], 0.5)
    assert r.agree and abs(r.direct - r.transformed) < 1e-4


def test_near_field_unbounded_trace():
    p = cz.decompose(log_trace())[0]
    r = cz.near_field_membership(p, 0.5)
    assert np.isfinite(r.direct) and r.agree and r.refinement_delta < 0.05


def test_log_trace_functionals():
    tr = log_trace()
    assert tr.l1_finite and tr.llogl_finite
    assert tr.l1 == pytest.approx(9.0178, abs=1e-3)


def test_infinite_trace_rejected():
    tr = cz.BoundaryTrace(lambda z: 1 / np.asarray(z, dtype=complex), singular_vertices=(0,))
    assert not tr.l1_finite
    with pytest.raises(ValueError):
        cz.decompose(tr)


def test_multiplier_transparency():
    f = lambda z: np.asarray(z, dtype=complex) ** 2 + 1j
    z = square_grid(8)
    pf = cz.decompose(cz.BoundaryTrace(lambda u: cz.P(u) * f(u)))
    plain = cz.decompose(cz.BoundaryTrace(f))
    assert np.max(np.abs(cz.reconstruct(pf, z) / cz.P(z) - cz.reconstruct(plain, z))) < 1e-10
    for a, b in zip(pf, plain):
        gap = a(z) - cz.P(z) * b(z) - cz.side_constant(b)
        assert np.max(np.abs(gap)) < 1e-10


def test_side_constants_for_one(ones):
    want = {"g1+": -0.5 + 0.5j, "g1-": -0.5 - 0.5j, "g2-": 0.5 - 0.5j, "g2+": 0.5 + 0.5j}
    for p in ones:
        assert abs(cz.side_constant(p) - want[p.label]) < 1e-14


def test_growth_ceiling_bounded():
    g = cz.growth_ceiling(cz.decompose(log_trace()), 8)
    assert np.all(np.isfinite(g)) and max(g) < 1


def test_pieces_are_holomorphic(ones):
    z = square_grid(5)
    p = cz.decompose(log_trace())
    for piece in p:
        assert np.max(piece.dbar_residual(z)) < 1e-6


@settings(max_examples=15, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=4))
def test_polynomial_reconstruction(coeffs):
    f = lambda z: np.polyval(coeffs, np.asarray(z, dtype=complex))
    z = square_grid(6)
    err = np.max(np.abs(cz.reconstruct(cz.decompose(cz.BoundaryTrace(f)), z) - f(z)))
    scale = 1 + np.max(np.abs(f(z)))
    assert err < 1e-10 * scale


@settings(max_examples=10, deadline=None)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_decomposition_linear(c):
    f = lambda z: np.exp(np.asarray(z, dtype=complex))
    g = lambda z: np.asarray(z, dtype=complex) ** 3
    h = lambda z: c * f(z) + g(z)
    z = np.array([0.7 + 0.1j, 2.0 - 0.4j, np.pi / 2 + 1.2j])
    for a, b, s in zip(cz.decompose(cz.BoundaryTrace(f)), cz.decompose(cz.BoundaryTrace(g)),
                       cz.decompose(cz.BoundaryTrace(h))):
        assert np.max(np.abs(s(z) - c * a(z) - b(z))) < 1e-11 * (1 + abs(c))
