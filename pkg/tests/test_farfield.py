import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LAM, N, UNIT
from diskcouple.farfield import (EPS0, AngularGrid, DesignInvalid, FarFieldMap, GratingDesign, GratingRing,
                                 dipole_far_field, effective_dipole, far_field_sum, paraxial_far_field,
                                 polarizability_from_hole, radiated_power, radiation_prefactor)
from diskcouple.modes import resonant_mode

K = 2 * np.pi / LAM


def unit_vectors(n, seed):
    v = np.random.default_rng(seed).normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_dipole_axis_null_and_transverse():
    z = np.array([0, 0, 1.0])
    assert np.allclose(dipole_far_field(1e-30 * z, np.zeros(3), z, K), 0)
    e = dipole_far_field(np.array([1e-30, 0, 0]), np.zeros(3), z, K)
    assert e[0] == pytest.approx(radiation_prefactor(K) * 1e-30, rel=1e-14)
    assert e[1] == e[2] == 0


def test_dipole_pattern_matches_sin_squared():
    dirs = unit_vectors(1000, 1)
    axis = unit_vectors(1, 2)[0]
    p = 2e-30 * axis
    r_m = np.array([3e-7, -1e-7, 5e-8])
    e = dipole_far_field(p, r_m, dirs, K)
    got = np.sum(np.abs(e) ** 2, axis=-1)
    sin2 = 1 - (dirs @ axis) ** 2
    expect = (radiation_prefactor(K) * 2e-30) ** 2 * sin2
    keep = sin2 > 1e-6
    assert np.max(np.abs(got[keep] / expect[keep] - 1)) < 1e-9


def test_dipole_phase_convention():
    z = np.array([0, 0, 1.0])
    e = dipole_far_field(np.array([1.0, 0, 0]), np.array([0, 0, LAM / 4]), z, K)
    assert np.angle(e[0]) == pytest.approx(-np.pi / 2)


def test_effective_dipoles(mode13, hole_A):
    ring = GratingRing(13, mode13.r_peak, hole_A)
    mags = [np.linalg.norm(effective_dipole(mode13, ring, m)[1]) for m in range(1, 14)]
    assert np.allclose(mags, mags[0], rtol=1e-12)
    ring = GratingRing(12, mode13.r_peak, hole_A)
    for m in range(1, 7):
        pos_a, p_a = effective_dipole(mode13, ring, m)
        pos_b, p_b = effective_dipole(mode13, ring, m + 6)
        # opposite sides: envelope and radial unit vector both flip
        assert np.allclose(pos_a[:2], -pos_b[:2])
        assert np.cos(ring.angles[m - 1]) == pytest.approx(-np.cos(ring.angles[m + 5]))
        assert np.allclose(p_a, p_b, atol=1e-12 * abs(hole_A))
    pos, p = effective_dipole(mode13, GratingRing(12, mode13.r_peak, 0.0), 3)
    assert not np.any(p)
    with pytest.raises(ValueError):
        effective_dipole(mode13, ring, 13)


def test_single_scatterer_reduces_to_dipole(mode13, hole_A):
    grid = AngularGrid(37, 48)
    ring = GratingRing(1, mode13.r_peak, hole_A, z_s=2e-8)
    ff = far_field_sum(mode13, GratingDesign((ring,)), grid)
    pos, p = effective_dipole(mode13, ring, 1)
    assert np.allclose(ff.E, dipole_far_field(p, pos, grid.directions(), K), rtol=1e-12, atol=0)


def test_intensity_scales_with_polarizability_squared(mode13, hole_A):
    grid = AngularGrid(31, 40)
    a = far_field_sum(mode13, GratingDesign((GratingRing(12, mode13.r_peak, hole_A),)), grid)
    b = far_field_sum(mode13, GratingDesign((GratingRing(12, mode13.r_peak, 3 * hole_A),)), grid)
    assert np.allclose(b.intensity, 9 * a.intensity, rtol=1e-12, atol=1e-14 * b.intensity.max())


def test_design_validation(mode13, hole_A):
    too_big = GratingDesign((GratingRing(12, 1.01 * mode13.geometry.R, hole_A),))
    with pytest.raises(DesignInvalid):
        far_field_sum(mode13, too_big, AngularGrid(5, 8))
    with pytest.raises(ValueError):
        GratingDesign((GratingRing(12, 5e-7, hole_A), GratingRing(12, 5e-7, hole_A)))
    d = GratingDesign((GratingRing(12, 2e-7, hole_A), GratingRing(12, 7e-7, hole_A)))
    assert d.rings[0].r_s > d.rings[1].r_s
    assert d.L(13) == [1, 1]


def test_ring_order_and_determinism(mode13, hole_A):
    grid = AngularGrid(31, 40)
    outer = GratingRing(12, mode13.r_peak, hole_A, z_s=1e-8)
    inner = GratingRing(12, 0.6 * mode13.r_peak, 2 * hole_A, z_s=-2e-8)
    a = far_field_sum(mode13, GratingDesign((outer, inner)), grid)
    b = far_field_sum(mode13, GratingDesign((inner, outer)), grid)
    assert np.array_equal(a.E, b.E)


def _pole_ratio(ff):
    return ff.intensity[0, 0] / ff.intensity.max()


@pytest.mark.parametrize("pol", ["TE_RADIAL", "TE_AZIMUTHAL"])
def test_pole_rules_in_plane(pol, hole_A):
    mode = resonant_mode(13, LAM, 0.57 * UNIT, polarization=pol)
    grid = AngularGrid(91, 120)
    for L in (0, 1, 2, 3):
        ff = far_field_sum(mode, GratingDesign((GratingRing(13 - L, mode.r_peak, hole_A),)), grid)
        if L == 1:
            assert _pole_ratio(ff) > 0.5
        else:
            assert _pole_ratio(ff) < 1e-12


def test_pole_rule_tm(mode13_tm, hole_A):
    grid = AngularGrid(91, 120)
    for L in (0, 1, 2):
        ff = far_field_sum(mode13_tm, GratingDesign((GratingRing(13 - L, mode13_tm.r_peak, hole_A),)), grid)
        assert ff.intensity[0, 0] <= 1e-12 * ff.intensity.max()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 3), st.floats(0.3, 0.99), st.floats(-0.5, 0.5))
def test_up_down_symmetry(mode13, hole_A, L, frac, phi0):
    grid = AngularGrid(37, 36)
    ring = GratingRing(13 - L, frac * mode13.geometry.R, hole_A, phi_0=phi0)
    I = far_field_sum(mode13, GratingDesign((ring,)), grid).intensity
    assert np.allclose(I, I[::-1], rtol=0, atol=1e-10 * I.max())


def test_paraxial_exact_at_pole(mode13, hole_A):
    ring = GratingRing(12, mode13.r_peak, hole_A, z_s=1e-8)
    low = AngularGrid(11, 36, np.radians(10))
    par = paraxial_far_field(mode13, ring, low)
    full = far_field_sum(mode13, GratingDesign((ring,)), low)
    assert np.allclose(par.E[0], full.E[0], rtol=1e-10, atol=0)


def test_paraxial_l0_null(mode13, hole_A):
    ring = GratingRing(13, mode13.r_peak, hole_A)
    par = paraxial_far_field(mode13, ring, AngularGrid(11, 36, np.radians(10)))
    assert np.max(np.abs(par.E[0])) <= 1e-12 * np.max(np.abs(par.E))


def test_paraxial_grid_limit(mode13, hole_A):
    with pytest.raises(ValueError):
        paraxial_far_field(mode13, GratingRing(12, mode13.r_peak, hole_A), AngularGrid(11, 8, np.radians(40)))


def test_polarizability():
    assert polarizability_from_hole(30e-9, 0.0, N) == 0
    a1 = polarizability_from_hole(20e-9, 50e-9, N)
    a2 = polarizability_from_hole(40e-9, 50e-9, N)
    assert a1 < 0 and a2 == pytest.approx(4 * a1, rel=1e-14)
    v = np.pi * (30e-9) ** 2 * 0.57 * UNIT
    eps = N**2
    assert polarizability_from_hole(30e-9, 0.57 * UNIT, N) == pytest.approx(3 * EPS0 * eps * v * (1 - eps) / (1 + 2 * eps))


def test_grid_weights():
    g = AngularGrid()
    assert g.weights().sum() == pytest.approx(4 * np.pi, rel=1e-14)
    theta_c = np.arcsin(0.6)
    assert g.weights(theta_c).sum() == pytest.approx(2 * np.pi * (1 - np.cos(theta_c)), rel=1e-13)
    assert g.refined().n_theta == 361 and g.refined().n_psi == 720
    assert AngularGrid.parse("91x180") == AngularGrid(91, 180)


def test_radiated_power_matches_larmor():
    grid = AngularGrid(181, 90)
    p = np.array([1e-30, 2e-30, -0.5e-30])
    E = dipole_far_field(p, np.zeros(3), grid.directions(), K)
    power = radiated_power(FarFieldMap(grid, E))
    c = 299792458.0
    larmor = c * K**4 * np.sum(np.abs(p) ** 2) / (12 * np.pi * EPS0)
    assert power == pytest.approx(larmor, rel=1e-4)
