import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special
from scipy.sparse import diags
from scipy.sparse.linalg import eigsh

from conftest import LAM, N, UNIT
from diskcouple.modes import (DiskGeometry, NoGuidedMode, Polarization, WgmMode, disk_resonance_radius,
                              enumerate_resonant_designs, mode_volume, near_field, resonant_mode,
                              resonant_radius, slab_effective_index)


def fd_slab_te_index(h, lam, n1, n2, cells=4000):
    """Fundamental TE slab index from a finite-difference Helmholtz eigenproblem."""
    width = h + 2 * 2.0 * lam
    x = np.linspace(-width / 2, width / 2, cells)
    dx = x[1] - x[0]
    n = np.where(np.abs(x) <= h / 2, n1, n2)
    k0 = 2 * np.pi / lam
    main = (n * k0) ** 2 - 2 / dx**2
    off = np.full(cells - 1, 1 / dx**2)
    beta2 = eigsh(diags([off, main, off], [-1, 0, 1]), k=1, which="LA")[0][0]
    return np.sqrt(beta2) / k0


def test_slab_te_matches_finite_difference():
    h = 0.57 * UNIT
    n_eff = slab_effective_index(h, LAM, N, 1.0, Polarization.TE_RADIAL)
    assert n_eff == pytest.approx(fd_slab_te_index(h, LAM, N, 1.0), abs=2e-3)


def test_slab_tm_matches_tangent_form():
    h, k0 = 0.57 * UNIT, 2 * np.pi / LAM
    n_eff = slab_effective_index(h, LAM, N, 1.0, Polarization.TM_Z)
    u = k0 * h / 2 * np.sqrt(N**2 - n_eff**2)
    w = k0 * h / 2 * np.sqrt(n_eff**2 - 1)
    assert u * np.tan(u) == pytest.approx(N**2 * w, rel=1e-8)


def test_slab_limits():
    assert slab_effective_index(1e-3 * LAM, LAM) - 1.0 < 1e-3
    assert N - slab_effective_index(20 * LAM, LAM) < 1e-3
    assert slab_effective_index(0.57 * UNIT, LAM, polarization="TM_Z") < slab_effective_index(0.57 * UNIT, LAM)


def test_slab_cutoff_raises():
    with pytest.raises(NoGuidedMode):
        slab_effective_index(1e-12 * LAM, LAM)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(1.01, 1.5), st.sampled_from(list(Polarization)))
def test_slab_index_increases_with_thickness(h, ratio, pol):
    a = slab_effective_index(h * UNIT, LAM, polarization=pol)
    b = slab_effective_index(h * ratio * UNIT, LAM, polarization=pol)
    assert 1.0 < a < b < N


def test_resonant_radius_examples():
    assert resonant_radius(13, LAM, 1.498) == pytest.approx(880e-9, rel=1e-3)
    assert resonant_radius(13, LAM, 1.498) / UNIT == pytest.approx(3.33, abs=0.01)
    assert resonant_radius(1, 2 * np.pi, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert resonant_radius(26, LAM, 1.5) == pytest.approx(2 * resonant_radius(13, LAM, 1.5), rel=1e-15)


@given(st.integers(1, 200), st.floats(1e-7, 1e-5), st.floats(1.0, 4.0))
def test_resonance_round_trip(P, lam, n_eff):
    R = resonant_radius(P, lam, n_eff)
    assert 2 * np.pi * n_eff * R / P == pytest.approx(lam, rel=1e-12)


def test_disk_resonance_against_asymptotic_formula():
    # Airy-zero expansion of the first radial resonance, in-plane polarisation (p = 1/m)
    n_slab = slab_effective_index(0.57 * UNIT, LAM)
    a1 = 2.338107
    for P in (9, 13, 16):
        m = n_slab
        x = (P + 2 ** (-1 / 3) * a1 * P ** (1 / 3) - 1 / (m * np.sqrt(m**2 - 1))
             + 0.3 * 2 ** (-2 / 3) * a1**2 * P ** (-1 / 3)) / n_slab
        R = disk_resonance_radius(P, LAM, n_slab)
        assert R == pytest.approx(x * LAM / (2 * np.pi), rel=0.02)


def test_enumerate_designs():
    rows = enumerate_resonant_designs(LAM, 12, 14, 0.57 * UNIT)
    assert [r.P for r in rows] == [12, 13, 14]
    assert rows[0].R < rows[1].R < rows[2].R
    mode = resonant_mode(13, LAM, 0.57 * UNIT)
    assert rows[1].R == pytest.approx(mode.geometry.R, rel=1e-14)
    assert rows[1].R == pytest.approx(resonant_radius(13, LAM, rows[1].n_eff), rel=1e-12)
    full = enumerate_resonant_designs(LAM, 9, 16, 0.57 * UNIT)
    assert full[0].R / UNIT < 3.33 < full[-1].R / UNIT
    assert 2.2 < full[0].R / UNIT and full[-1].R / UNIT < 4.2


def test_mode_invariants(mode13):
    g = mode13.geometry
    assert g.n_clad < mode13.n_eff < g.n_disk
    assert 0 < mode13.r_peak < g.R
    assert 2 * np.pi * mode13.n_eff * g.R / mode13.P == pytest.approx(mode13.lambda_res, rel=1e-12)
    with pytest.raises(ValueError):
        WgmMode(13, Polarization.TE_RADIAL, LAM, 1.2, 2.0, 1e-7, 1.0, DiskGeometry(R=1e-6, h=1e-7))


def test_near_field_examples(mode13):
    P = mode13.P
    assert np.allclose(near_field(mode13, mode13.r_peak, np.pi / (2 * P), 0.0), 0, atol=1e-15)
    assert abs(near_field(mode13, mode13.r_peak, 0.0, 0.0)[0]) == pytest.approx(1.0, rel=1e-12)
    r = np.linspace(0, mode13.geometry.R, 2001)
    assert np.max(np.abs(near_field(mode13, r, 0.0, 0.0))) <= 1 + 1e-12


@settings(deadline=None)
@given(st.floats(0, 1.2), st.floats(-10, 10), st.floats(-0.6, 0.6))
def test_near_field_symmetries(mode13, rf, phi, zf):
    g = mode13.geometry
    r, z = rf * g.R, zf * g.h
    e = near_field(mode13, r, phi, z)
    assert np.allclose(e, near_field(mode13, r, -phi, z), atol=1e-12)
    assert np.allclose(e, near_field(mode13, r, phi + 2 * np.pi, z), atol=1e-9)
    if r > g.R or abs(z) > g.h / 2:
        assert not np.any(e)


@pytest.mark.parametrize("pol,axis", [("TE_RADIAL", 0), ("TE_AZIMUTHAL", 1), ("TM_Z", 2)])
def test_near_field_polarization_axis(pol, axis):
    mode = resonant_mode(13, LAM, 0.57 * UNIT, polarization=pol)
    e = near_field(mode, mode.r_peak, 0.1, 0.0)
    assert np.flatnonzero(e).tolist() == [axis]


@given(st.integers(1, 60), st.integers(1, 60))
def test_sampling_identity(P, G):
    phi = 2 * np.pi * np.arange(1, G + 1) / G
    assert np.allclose(np.cos(P * phi), np.cos((P - G) * phi), atol=1e-12)


def closed_form_volume(mode):
    g = mode.geometry
    a = mode.k_inside
    P = mode.P
    x = a * g.R
    radial = g.R**2 / 2 * (special.jvp(P, x) ** 2 + (1 - P**2 / x**2) * special.jv(P, x) ** 2)
    return mode.E_rs_scale**2 * radial * np.pi * g.h / 2 / (mode.lambda_res / g.n_disk) ** 3


def test_mode_volume_closed_form(mode13):
    assert mode_volume(mode13) == pytest.approx(closed_form_volume(mode13), rel=1e-3)


def test_mode_volume_brute_force_grid(mode13):
    g = mode13.geometry
    nr, nphi, nz = 400, 128, 40
    r = (np.arange(nr) + 0.5) * g.R / nr
    phi = (np.arange(nphi) + 0.5) * 2 * np.pi / nphi
    z = -g.h / 2 + (np.arange(nz) + 0.5) * g.h / nz
    R_, PHI, Z = np.meshgrid(r, phi, z, indexing="ij")
    e2 = np.sum(np.abs(near_field(mode13, R_, PHI, Z)) ** 2, axis=-1)
    integral = np.sum(e2 * R_) * (g.R / nr) * (2 * np.pi / nphi) * (g.h / nz)
    assert mode_volume(mode13) == pytest.approx(integral / (LAM / N) ** 3, rel=2e-3)


def test_mode_volume_grows_with_radius():
    vols = [mode_volume(resonant_mode(P, LAM, 0.57 * UNIT)) for P in range(9, 17)]
    assert all(b > a for a, b in zip(vols, vols[1:]))
