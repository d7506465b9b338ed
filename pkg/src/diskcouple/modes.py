"""Whispering-gallery modes of a thin dielectric microdisk.

The disk is reduced to two dimensions with the effective index of the
fundamental symmetric-slab mode. Resonant radii follow from matching the
interior Bessel field to the exterior field at the rim; the reported
``n_eff`` is the rim index that satisfies ``lambda = 2 pi n_eff R / P``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize, special

N_DIAMOND = 2.41


class NoGuidedMode(ValueError):
    """Raised when the slab or disk resonance condition has no root."""


class Polarization(str, enum.Enum):
    TE_RADIAL = "TE_RADIAL"
    TE_AZIMUTHAL = "TE_AZIMUTHAL"
    TM_Z = "TM_Z"

    @property
    def in_plane(self) -> bool:
        return self is not Polarization.TM_Z


@dataclass(frozen=True)
class DiskGeometry:
    """Dielectric disk of radius ``R`` and thickness ``h`` (meters)."""

    R: float
    h: float
    n_disk: float = N_DIAMOND
    n_clad: float = 1.0

    def __post_init__(self):
        if not (self.R > 0 and self.h > 0):
            raise ValueError(f"disk dimensions must be positive, got R={self.R}, h={self.h}")
        if not (self.n_disk > self.n_clad >= 1.0):
            raise ValueError(f"need n_disk > n_clad >= 1, got {self.n_disk}, {self.n_clad}")


@dataclass(frozen=True)
class WgmMode:
    """Standing-wave WGM of azimuthal order ``P`` resonant at ``lambda_res``.

    ``n_eff`` is the rim effective index (``lambda_res = 2 pi n_eff R / P``),
    ``n_slab`` the slab index setting the radial wavevector inside the disk.
    """

    P: int
    polarization: Polarization
    lambda_res: float
    n_eff: float
    n_slab: float
    r_peak: float
    E_rs_scale: float
    geometry: DiskGeometry = field(repr=False)

    def __post_init__(self):
        g = self.geometry
        if self.P < 1:
            raise ValueError("azimuthal order P must be >= 1")
        if not (g.n_clad < self.n_eff < g.n_disk):
            raise ValueError(f"n_eff={self.n_eff} outside ({g.n_clad}, {g.n_disk})")
        if abs(2 * np.pi * self.n_eff * g.R / self.P - self.lambda_res) > 1e-9 * self.lambda_res:
            raise ValueError("resonance condition lambda = 2 pi n_eff R / P violated")
        if not (0 < self.r_peak < g.R):
            raise ValueError(f"r_peak={self.r_peak} not inside the disk")

    @property
    def k_inside(self) -> float:
        return 2 * np.pi * self.n_slab / self.lambda_res


class ResonantDesign(NamedTuple):
    P: int
    R: float
    n_eff: float


def slab_effective_index(h, lam, n_disk=N_DIAMOND, n_clad=1.0,
                         polarization=Polarization.TE_RADIAL) -> float:
    """Effective index of the fundamental mode of a symmetric slab.

    TE slab modes (field parallel to the faces) are used for in-plane disk
    polarizations, TM slab modes for ``TM_Z``. The root is bracketed in
    ``(n_clad, n_disk)`` and found by bisection.
    """
    if not (h > 0 and lam > 0):
        raise ValueError("h and lambda must be positive")
    if not n_disk > n_clad:
        raise ValueError("n_disk must exceed n_clad")
    pol = Polarization(polarization)
    k0 = 2 * np.pi / lam
    ratio = 1.0 if pol.in_plane else (n_disk / n_clad) ** 2

    def mismatch(n):
        kappa = k0 * np.sqrt(max(n_disk**2 - n**2, 0.0))
        gamma = k0 * np.sqrt(max(n**2 - n_clad**2, 0.0))
        return np.arctan2(ratio * gamma, kappa) - kappa * h / 2

    lo, hi = n_clad, n_disk
    if not (mismatch(lo) < 0 < mismatch(hi)):
        raise NoGuidedMode(f"no guided slab mode for h={h:g}, lambda={lam:g}")
    n = optimize.bisect(mismatch, lo, hi, xtol=1e-10, rtol=4 * np.finfo(float).eps, maxiter=200)
    if n - n_clad <= 2e-10 or n_disk - n <= 2e-10:
        raise NoGuidedMode(f"slab mode indistinguishable from cutoff for h={h:g}, lambda={lam:g}")
    return float(n)


def resonant_radius(P, lam, n_eff) -> float:
    """Radius at which order ``P`` resonates: ``R = P lambda / (2 pi n_eff)``."""
    if P < 1 or lam <= 0 or n_eff <= 0:
        raise ValueError("need P >= 1, lambda > 0, n_eff > 0")
    return P * lam / (2 * np.pi * n_eff)


def _rim_mismatch(u, P, n_in, n_out, in_plane):
    # u = n_in * k0 * R; exterior field taken as Y_P (radiation leakage neglected)
    v = u * n_out / n_in
    lhs = special.jvp(P, u) / special.jv(P, u)
    rhs = special.yvp(P, v) / special.yv(P, v)
    if in_plane:
        return lhs / n_in - rhs / n_out
    return n_in * lhs - n_out * rhs


def disk_resonance_radius(P, lam, n_slab, n_clad=1.0, polarization=Polarization.TE_RADIAL) -> float:
    """Radius of the fundamental radial WGM of order ``P`` for a 2D disk of index ``n_slab``."""
    pol = Polarization(polarization)
    jp1 = special.jnp_zeros(P, 1)[0]
    j1 = special.jn_zeros(P, 1)[0]
    eps = 1e-9 * j1
    try:
        u = optimize.brentq(_rim_mismatch, jp1 + eps, j1 - eps,
                            args=(P, n_slab, n_clad, pol.in_plane), xtol=1e-14, rtol=1e-14)
    except ValueError as exc:
        raise NoGuidedMode(f"no WGM resonance for P={P}, n_slab={n_slab:g}") from exc
    return u * lam / (2 * np.pi * n_slab)


def enumerate_resonant_designs(lambda_target, P_min, P_max, h, n_disk=N_DIAMOND, n_clad=1.0,
                               polarization=Polarization.TE_RADIAL) -> list[ResonantDesign]:
    """Resonant radius and rim index for every order in ``[P_min, P_max]``."""
    if P_min < 1:
        raise ValueError("P_min must be >= 1")
    n_slab = slab_effective_index(h, lambda_target, n_disk, n_clad, polarization)
    out = []
    for P in range(P_min, P_max + 1):
        R = disk_resonance_radius(P, lambda_target, n_slab, n_clad, polarization)
        n_eff = P * lambda_target / (2 * np.pi * R)
        if not n_eff > n_clad:
            raise NoGuidedMode(f"P={P} resonance is not confined at the rim (n_slab={n_slab:g})")
        out.append(ResonantDesign(P, R, n_eff))
    return out


def resonant_mode(P, lam, h, n_disk=N_DIAMOND, n_clad=1.0,
                  polarization=Polarization.TE_RADIAL) -> WgmMode:
    """Build the disk resonant at ``lam`` for order ``P`` and return its mode."""
    pol = Polarization(polarization)
    n_slab = slab_effective_index(h, lam, n_disk, n_clad, pol)
    R = disk_resonance_radius(P, lam, n_slab, n_clad, pol)
    if not P * lam / (2 * np.pi * R) > n_clad:
        raise NoGuidedMode(f"P={P} resonance is not confined at the rim (n_slab={n_slab:g})")
    geometry = DiskGeometry(R=R, h=h, n_disk=n_disk, n_clad=n_clad)
    return mode_on_geometry(geometry, P, lam, n_slab, pol)


def mode_on_geometry(geometry: DiskGeometry, P, lam, n_slab, polarization) -> WgmMode:
    k_in = 2 * np.pi * n_slab / lam
    x_peak = special.jnp_zeros(P, 1)[0]
    r_peak = x_peak / k_in
    if r_peak >= geometry.R:
        # field still rising at the rim: normalise to the edge value
        r_peak = geometry.R * (1 - 1e-12)
        x_peak = k_in * r_peak
    scale = 1.0 / abs(special.jv(P, x_peak))
    # resonant wavelength consistent with the given radius and rim index
    n_eff = P * lam / (2 * np.pi * geometry.R)
    return WgmMode(P=P, polarization=Polarization(polarization), lambda_res=lam, n_eff=n_eff,
                   n_slab=n_slab, r_peak=r_peak, E_rs_scale=scale, geometry=geometry)


def radial_profile(mode: WgmMode, r):
    r = np.asarray(r, dtype=float)
    f = mode.E_rs_scale * special.jv(mode.P, mode.k_inside * r)
    return np.where((r >= 0) & (r <= mode.geometry.R), f, 0.0)


def vertical_profile(mode: WgmMode, z):
    z = np.asarray(z, dtype=float)
    h = mode.geometry.h
    return np.where(np.abs(z) <= h / 2, np.cos(np.pi * z / h), 0.0)


_POL_AXIS = {Polarization.TE_RADIAL: 0, Polarization.TE_AZIMUTHAL: 1, Polarization.TM_Z: 2}


def near_field(mode: WgmMode, r, phi, z):
    """Standing-wave field ``(E_r, E_phi, E_z)`` at cylindrical points.

    Inputs broadcast; the result has a trailing axis of length 3. Points
    outside the disk give zero.
    """
    r, phi, z = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (r, phi, z)))
    amp = radial_profile(mode, r) * np.cos(mode.P * phi) * vertical_profile(mode, z)
    out = np.zeros(r.shape + (3,), dtype=complex)
    out[..., _POL_AXIS[mode.polarization]] = amp
    return out


def _converged(integrate, n0, tol, max_doublings=14):
    n = n0
    prev = integrate(n)
    for _ in range(max_doublings):
        n *= 2
        cur = integrate(n)
        if abs(cur - prev) <= tol * abs(cur):
            return cur
        prev = cur
    raise RuntimeError("quadrature failed to converge")


def mode_volume(mode: WgmMode, tol=1e-3) -> float:
    """Mode volume in units of ``(lambda / n_disk)**3``.

    Cylindrical-grid quadrature of ``eps |E|^2`` over the disk. The field is
    a product of radial, azimuthal and vertical factors, so the grid sum is
    evaluated factor by factor; each factor is refined by grid doubling until
    the relative change drops below ``tol``.
    """
    g = mode.geometry

    def radial(n):
        r = np.linspace(0.0, g.R, n + 1)
        return integrate.trapezoid(radial_profile(mode, r) ** 2 * r, r)

    def azimuthal(n):
        phi = (np.arange(n) + 0.5) * 2 * np.pi / n
        return np.sum(np.cos(mode.P * phi) ** 2) * 2 * np.pi / n

    def vertical(n):
        z = np.linspace(-g.h / 2, g.h / 2, n + 1)
        return integrate.trapezoid(vertical_profile(mode, z) ** 2, z)

    # refine factors well past tol so the product still meets it
    integral = (_converged(radial, 64, tol / 10) * _converged(azimuthal, 4 * mode.P + 4, tol / 10)
                * _converged(vertical, 16, tol / 10))
    peak = 1.0  # near field normalised to unit maximum; eps cancels inside the disk
    return integral / peak / (mode.lambda_res / g.n_disk) ** 3


def mode_energy_integral(mode: WgmMode, tol=1e-3) -> float:
    """``integral eps_r |E|^2 dV`` in m^3 for unit peak field."""
    g = mode.geometry
    return g.n_disk**2 * mode_volume(mode, tol) * (mode.lambda_res / g.n_disk) ** 3
