import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc

from heatreach import heat as ht
from heatreach.transforms import TimeSignal

ONE = lambda s: np.ones(np.shape(s), dtype=complex)


def ctrl(f0=None, fpi=None, tau=1.0):
    return ht.ControlSignal.from_functions(f0, fpi, tau)


def test_semigroup_examples():
    f = ht.SineState.mode(1, 10)
    assert ht.semigroup(f, 1.0).coeffs[0] == pytest.approx(np.exp(-1))
    g = ht.SineState(np.arange(1, 6) + 0j)
    assert np.array_equal(ht.semigroup(g, 0.0).coeffs, g.coeffs)
    assert ht.semigroup(ht.SineState.mode(3, 5), 0.5).coeffs[2] == pytest.approx(np.exp(-4.5), rel=1e-15)
    with pytest.raises(ValueError):
        ht.semigroup(g, -1.0)


def test_from_function_sine_coefficients():
    st_ = ht.SineState.from_function(lambda x: np.sin(x) + 0.5 * np.sin(4 * x), 8)
    want = np.zeros(8)
    want[0], want[3] = 1, 0.5
    assert np.max(np.abs(st_.coeffs - want)) < 1e-14


def test_control_to_state_examples():
    N = 12
    n = np.arange(1, N + 1)
    b = ht.control_to_state(ctrl(ONE), N)
    assert np.max(np.abs(b.coeffs - 2 / (np.pi * n) * (1 - np.exp(-n ** 2)))) < 1e-13
    assert ht.control_to_state(ht.ControlSignal.zero(1.0), N).norm() == 0
    both = ht.control_to_state(ctrl(ONE, ONE), N)
    assert np.max(np.abs(both.coeffs[1::2])) < 1e-15


def test_simulate_examples():
    f = ht.SineState.mode(1, 20)
    out = ht.simulate(f, ht.ControlSignal.zero(1.0), [0, 0.5, 1.0])
    assert [s.coeffs[0].real for s in out] == pytest.approx([1, np.exp(-0.5), np.exp(-1)], rel=1e-15)
    y = ht.simulate(ht.SineState.zero(20), ctrl(ONE), [1.0])[0]
    assert y.coeffs[0] == pytest.approx(2 / np.pi * (1 - np.exp(-1)), rel=1e-13)
    with pytest.raises(ValueError):
        ht.simulate(f, ht.ControlSignal.zero(1.0), [1.5])


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.floats(0.05, 1.0),
       st.floats(-2, 2), st.floats(-2, 2))
def test_superposition(a, t, c0, c1):
    f = ht.SineState(np.array(a) + 0j)
    u = ctrl(lambda s: c0 * s + 0j * s, lambda s: c1 * np.cos(s) + 0j, 1.0)
    both = ht.simulate(f.truncated(30), u, [t])[0]
    free = ht.simulate(f.truncated(30), ht.ControlSignal.zero(1.0), [t])[0]
    forced = ht.simulate(ht.SineState.zero(30), u, [t])[0]
    assert np.max(np.abs(both.coeffs - free.coeffs - forced.coeffs)) <= 1e-14 * (1 + both.norm())


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_semigroup_composition(s, t):
    f = ht.SineState(np.linspace(1, 0.1, 15) + 0j)
    a = ht.semigroup(ht.semigroup(f, s), t).coeffs
    b = ht.semigroup(f, s + t).coeffs
    assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def test_phi_tilde_erfc_anchor():
    s = np.linspace(0, 3, 52)[1:-1]
    one = TimeSignal.on_interval(ONE, 1.0)
    assert np.max(np.abs(ht.phi_tilde(one, s + 0j, 1.0) - erfc(s / 2))) < 1e-8
    assert abs(ht.phi_tilde(one, np.array([1e-9 + 0j]), 1.0)[0] - 1) < 1e-8
    four = TimeSignal.on_interval(ONE, 0.25)
    assert np.max(np.abs(ht.phi_tilde(four, s + 0j, 0.25) - erfc(s))) < 1e-8


def test_phi_tilde_chain_cross_check():
    u = TimeSignal.on_interval(lambda s: s * (1 - s) + 0j, 1.0)
    r = np.linspace(0.3, 4, 10)
    th = np.linspace(-0.6, 0.6, 10)
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    assert np.max(np.abs(ht.phi_tilde(u, z, 1.0) - ht.phi_tilde_chain(u, z))) < 1e-6


def _k0_oracle(sigma, z, M=10):
    with mp.workdps(30):
        return complex(-1 / mp.sqrt(mp.pi * sigma) * mp.fsum(
            mp.e ** (-(z + 2 * m * mp.pi) ** 2 / (4 * sigma)) for m in range(-M, M + 1) if m))


def test_kernel_tilde_against_mpmath():
    k = ht.kernel_K0_tilde(1.0, np.pi / 2)
    assert k.value == pytest.approx(_k0_oracle(1.0, mp.pi / 2), abs=1e-15)
    assert k.value.real == pytest.approx(-0.0021898, abs=5e-8)
    assert k.tail_bound < 1e-100
    z = 0.4 + 0.3j
    assert ht.kernel_K0_tilde(0.5, z).value == pytest.approx(_k0_oracle(0.5, mp.mpc(0.4, 0.3)), abs=1e-15)
    assert abs(ht.kernel_K0_tilde(1e-3, np.pi / 2).value) < 1e-300


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(-3, 3), st.floats(-1, 1))
def test_kernel_tilde_reflection_symmetry(sigma, x, y):
    z = complex(x, y)
    a = ht.kernel_K0_tilde(sigma, z).value
    b = ht.kernel_K0_tilde(sigma, -z).value
    assert abs(a - b) <= 1e-13 * (abs(a) + 1e-300)


def test_kernel_series_tail_bound():
    k = ht.kernel_K0_series(0.1, 1.0, N=20)
    ref = ht.kernel_K0_series(0.1, 1.0, N=400)
    assert abs(k.value - ref.value) <= k.tail_bound


def test_remainder_examples():
    zero = TimeSignal.on_interval(lambda s: 0 * s + 0j, 1.0)
    z = np.array([0.5 + 0.2j, np.pi / 2])
    assert np.all(ht.remainder_R0(zero, z) == 0)
    u = TimeSignal.on_interval(lambda s: np.cos(3 * s) + 0j, 1.0)
    assert np.max(np.abs(ht.remainder_R0(u, z) - ht.remainder_R0_images(u, z))) < 1e-10
    one = TimeSignal.on_interval(ONE, 1.0)
    r = abs(ht.remainder_R0(one, np.array([np.pi / 2]))[0])
    assert r < 0.05 * abs(ht.phi_tilde(one, np.array([np.pi / 2 + 0j]), 1.0)[0])


def test_remainder_proxy_decreases():
    p = [ht.remainder_norm_proxy(t, K=6) for t in (1.0, 0.5, 0.25, 0.1)]
    assert all(b < a for a, b in zip(p, p[1:]))


def test_operator_representation_matches_series():
    # controls vanishing at the final time keep the sine series pointwise convergent
    u = ctrl(lambda s: np.sin(np.pi * s) + 0j, lambda s: s * (1 - s) + 0j, 1.0)
    x = np.linspace(0.5, np.pi - 0.5, 12)
    series = ht.control_to_state(u, 200)(x)
    ops = ht.state_from_operators(u, x + 0j)
    assert np.max(np.abs(series - ops)) < 1e-4


def test_inverse_crime_and_null_control():
    target = ht.control_to_state(ctrl(ONE), 20)
    u, rep = ht.synthesize_lsq(target, 1.0, K=24)
    assert rep.residual < 1e-6
    f = ht.SineState.from_function(np.sin, 20)
    u, rep = ht.synthesize_lsq(ht.SineState.zero(20), 1.0, K=24, f=f)
    assert rep.final_state_norm < 1e-8 * f.norm()


def test_parabola_target_and_time_invariance():
    g = ht.SineState.from_function(lambda x: x * (np.pi - x), 20)
    res = {}
    for K in (4, 12, 24):
        res[K] = ht.synthesize_lsq(g, 1.0, K=K)[1].residual
    assert res[24] < 1e-3
    r_half = ht.synthesize_lsq(g, 0.5, K=24)[1].residual
    assert r_half <= 10 * max(res[24], 1e-14)


def test_synthesis_report_fields():
    _, rep = ht.synthesize_lsq(ht.SineState.mode(1, 10), 1.0, K=8)
    d = rep.to_dict()
    assert {"residual", "lambda", "condition_estimate", "K", "N"} <= set(d)
    lc = d["lcurve"]
    r = [row["residual"] for row in lc]
    sn = [row["solution_norm"] for row in lc]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(r, r[1:]))
    assert all(b <= a * (1 + 1e-9) for a, b in zip(sn, sn[1:]))


def test_chain_examples():
    u, rep = ht.synthesize_chain(ht.ChainTarget("erfc", 1.0))
    assert rep.max_error < 1e-8
    assert np.allclose(u.u0(np.linspace(0.1, 0.9, 5)), 1)
    u, rep = ht.synthesize_chain(ht.ChainTarget("zero", 1.0))
    assert rep.u0_norm == 0
    with pytest.raises(ht.NotInRangeError):
        ht.synthesize_chain(ht.ChainTarget("x0_box", 1.0, (0.05, 0.2)))


def test_paley_wiener_probe_finite():
    pw = ht.paley_wiener_probe(1.0)
    assert pw["finite"] and np.isfinite(pw["growth_ratio"])


def test_isometry_for_vanishing_controls():
    for name in ("s", "sin(pi s)"):
        rep = ht.isometry_ratio(ht.ISOMETRY_FAMILY[name], 1.0, resolution=10, angular_levels=10)
        assert 0.998 <= rep.ratio <= 1.0 + 1e-12


@settings(max_examples=10, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_control_to_state_linear(c0, c1):
    a = ctrl(lambda s: s + 0j)
    b = ctrl(lambda s: np.cos(s) + 0j)
    ab = ctrl(lambda s: c0 * s + c1 * np.cos(s) + 0j)
    lhs = ht.control_to_state(ab, 40).coeffs
    rhs = c0 * ht.control_to_state(a, 40).coeffs + c1 * ht.control_to_state(b, 40).coeffs
    assert np.max(np.abs(lhs - rhs)) <= 1e-14 * (1 + np.max(np.abs(lhs)))
