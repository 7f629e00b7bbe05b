import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatreach import cousin as cs
from heatreach.domains import SQUARE_D, TRANSITION_BAND_E, Z0, Z1, contains

PU = cs.build_partition()
PHI = lambda z: (np.asarray(z, dtype=complex) - Z0) * (np.asarray(z, dtype=complex) - Z1)


def split_for(phi):
    pu = cs.build_partition()
    phi0 = lambda z: np.asarray(phi(z), dtype=complex) * cs.P4(z)
    return cs.CousinSplit(phi, cs.P4, pu, cs.dbar_datum(phi0, pu))


def test_chi_values_on_the_axis():
    assert PU.chi1(np.pi / 4 + 0j) == 0
    assert PU.chi1(3 * np.pi / 4 + 0j) == 1
    assert PU.chi1(np.pi / 2 + 0j) == pytest.approx(0.5, abs=1e-15)


def test_partition_sums_to_one_exactly():
    rng = np.random.default_rng(1)
    z = rng.uniform(-2, 5, 10 ** 4) + 1j * rng.uniform(-3, 3, 10 ** 4)
    assert np.all(PU.chi1(z) + PU.chi2(z) == 1)


def test_partition_supports():
    # chi1 vanishes on (pi - Delta) outside D and chi2 on Delta outside D
    z = np.array([-1.0 + 0.2j, 0.1 + 0j, np.pi + 2 + 0.5j, np.pi - 0.1 + 0j])
    assert list(PU.chi1(z)) == [0, 0, 1, 1]


def test_dbar_chi_examples():
    assert abs(cs.dbar_of_chi(PU, np.pi / 2 + 0j)) == pytest.approx(abs(cs.dpsi(0.5)) / np.pi, rel=1e-14)
    assert cs.dpsi(0.5) == pytest.approx(2.0, rel=1e-14)
    out = np.array([0.3 + 0j, 2.9 + 0j, np.pi / 2 + 0.5 + 1.0j])
    assert not np.any(contains(TRANSITION_BAND_E, out))
    assert np.all(PU.dbar_chi1(out) == 0)
    with pytest.raises(ValueError):
        PU.dbar_chi1(np.array([Z0]))


def test_dbar_chi_against_finite_differences():
    rng = np.random.default_rng(2)
    z = np.pi / 2 + rng.uniform(-0.5, 0.5, 200) + 1j * rng.uniform(-1.0, 1.0, 200)
    z = z[contains(TRANSITION_BAND_E, z)]
    assert np.max(np.abs(PU.dbar_chi1(z) - PU.dbar_chi1_fd(z))) < 1e-8


def test_partition_bound_stable_and_probe():
    a, b = PU.bound_sup(32), PU.bound_sup(64)
    assert np.isfinite(a) and abs(a - b) < 0.05 * b
    assert b == pytest.approx(np.pi / 2, rel=1e-12)
    probe = PU.annulus_probe(10)
    assert min(probe[-4:]) > 0.4


def test_quintic_cutoff():
    pu = cs.build_partition("quintic")
    assert pu.chi1(np.pi / 4 + 0j) == 0 and pu.chi1(3 * np.pi / 4 + 0j) == 1


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0))
def test_psi_symmetry_and_range(t):
    for kind in cs.CutoffKind:
        a, b = cs.psi(t, kind), cs.psi(1 - t, kind)
        assert 0 <= a <= 1
        assert a + b == pytest.approx(1.0, abs=1e-14)
        assert cs.dpsi(t, kind) >= 0


@settings(max_examples=50, deadline=None)
@given(st.floats(-1.2, 1.2), st.floats(0.0, 1.0))
def test_chi_sum_and_range_in_D(y, s):
    al = cs.alpha(y)
    z = complex(np.pi / 2 - al + 2 * al * s, y)
    c = PU.chi1(np.array([z]))[0]
    assert 0 <= c <= 1
    assert c + PU.chi2(np.array([z]))[0] == 1


def test_disc_datum_is_exact():
    c, r = np.pi / 2 + 0.1j, 0.3
    v = cs.disc_datum(c, r)
    zo = np.array([c + 0.5, c - 0.45j, 3.0 + 1j])
    assert np.max(np.abs(cs.solve_dbar(v, zo) - r * r / (zo - c))) < 1e-10
    zi = np.array([c + 0.1, c - 0.05j])
    assert np.max(np.abs(cs.solve_dbar(v, zi) - np.conj(zi - c))) < 1e-10


def test_zero_datum():
    v = cs.disc_datum(np.pi / 2, 0.2, 0.0)
    assert np.all(cs.solve_dbar(v, np.array([1.0 + 0j, 2.0 + 0.3j])) == 0)


def test_band_solver_matches_boundary_form():
    sp = split_for(PHI)
    z = np.array([np.pi / 2 + 0.1j, 1.2 - 0.5j, 2.0 + 0.3j, 0.5 + 0.1j, 5.0 + 1j])
    got = sp.u(z)
    want = cs.pompeiu_boundary_form(sp.phi0, sp.partition, z)
    assert np.max(np.abs(got - want)) < 1e-9


def test_split_identity_and_holomorphy():
    sp = split_for(PHI)
    zi = cs.identity_nodes(10)
    assert np.max(np.abs(PHI(zi) - sp.f1(zi, 0) - sp.f2(zi, 0))) < 1e-12
    for k, fn in ((1, sp.f1), (2, sp.f2)):
        z = cs.holomorphy_nodes(k, n=3)
        assert np.max(cs._fd_dbar(fn, z, 5e-3)) < 1e-4


def test_zero_phi_gives_zero_split():
    sp = split_for(lambda z: 0 * np.asarray(z, dtype=complex))
    z = np.array([1.0 + 0.2j, 2.0 - 0.1j, -1.0 + 0j])
    assert np.all(sp.f1(z) == 0) and np.all(sp.f2(z) == 0)


def test_multipliers_zero_free_where_needed():
    sector_pts = np.array([1j, -1j])  # zeros of 1 + z^2 lie in pi - Delta
    assert np.all(np.abs(cs.one_plus_z2(sector_pts)) == 0)
    r = np.linspace(0, 40, 200)
    th = np.linspace(-np.pi / 4, np.pi / 4, 50)
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    assert np.min(np.abs(cs.P4(z))) > 0.5 and np.min(np.abs(cs.P4(np.pi - z))) > 0.5


def test_rejects_divergent_weighted_norm():
    with pytest.raises(ValueError):
        cs.cousin_split(lambda z: np.ones_like(np.asarray(z, dtype=complex)))


def test_band_datum_norm_refines():
    sp = split_for(PHI)
    a, b = sp.datum.l2_norm_sq(16), sp.datum.l2_norm_sq(24)
    assert abs(a - b) < 1e-10 * b
