"""Point-dipole scattering from grating perturbations and far-field sums.

Each perturbation radiates as a dipole ``p = A E_mode(r_m)``. Fields are
reported in the normalised far-field limit ``D * E`` with the common factor
``exp(jkD)`` removed, so ``|E|^2`` integrated over solid angle and divided by
``2 Z0`` is the radiated power.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import constants

from .modes import WgmMode, near_field

EPS0 = constants.epsilon_0
Z0 = constants.physical_constants["characteristic impedance of vacuum"][0]


class DesignInvalid(ValueError):
    """Grating geometry incompatible with the disk."""


@dataclass(frozen=True)
class GratingRing:
    """``G`` identical scatterers on a circle of radius ``r_s`` at height ``z_s``."""

    G: int
    r_s: float
    A: float
    z_s: float = 0.0
    phi_0: float = 0.0

    def __post_init__(self):
        if self.G < 1:
            raise ValueError("ring needs at least one scatterer")
        if not self.r_s > 0:
            raise ValueError("ring radius must be positive")

    @property
    def angles(self):
        m = np.arange(1, self.G + 1)
        return 2 * np.pi * m / self.G + self.phi_0

    def L(self, P: int) -> int:
        return P - self.G


@dataclass(frozen=True)
class GratingDesign:
    """Zero, one or two rings; stored outer ring first."""

    rings: tuple[GratingRing, ...] = ()

    def __post_init__(self):
        rings = tuple(sorted(self.rings, key=lambda ring: -ring.r_s))
        if len(rings) > 2:
            raise ValueError("at most two rings are supported")
        if len(rings) == 2 and rings[0].r_s == rings[1].r_s:
            raise ValueError("ring radii must be distinct")
        object.__setattr__(self, "rings", rings)

    @property
    def is_bare(self) -> bool:
        return not self.rings or all(ring.A == 0 for ring in self.rings)

    def validate(self, mode: WgmMode):
        R = mode.geometry.R
        for ring in self.rings:
            if ring.r_s > R:
                raise DesignInvalid(f"ring radius {ring.r_s:.4g} m exceeds disk radius {R:.4g} m")

    def L(self, P: int) -> list[int]:
        return [ring.L(P) for ring in self.rings]


def _theta_weights(theta, theta_max):
    """Weights for the integral of ``I(theta) sin(theta)`` on ``[theta[0], theta_max]``
    with ``I`` interpolated linearly between nodes."""
    w = np.zeros_like(theta)
    for i in range(len(theta) - 1):
        a, b = theta[i], theta[i + 1]
        if a >= theta_max:
            break
        c = min(b, theta_max)
        d = b - a
        i0 = np.cos(a) - np.cos(c)  # int sin
        i1 = (np.sin(c) - c * np.cos(c)) - (np.sin(a) - a * np.cos(a))  # int theta sin
        w[i] += (b * i0 - i1) / d
        w[i + 1] += (i1 - a * i0) / d
    return w


@dataclass(frozen=True)
class AngularGrid:
    """Polar grid ``theta in [0, theta_max]`` (inclusive) by ``psi in [0, 2 pi)``."""

    n_theta: int = 181
    n_psi: int = 360
    theta_max: float = np.pi

    @classmethod
    def parse(cls, text: str) -> "AngularGrid":
        nt, npsi = text.lower().split("x")
        return cls(int(nt), int(npsi))

    def refined(self) -> "AngularGrid":
        return AngularGrid(2 * self.n_theta - 1, 2 * self.n_psi, self.theta_max)

    @cached_property
    def theta(self):
        return np.linspace(0.0, self.theta_max, self.n_theta)

    @cached_property
    def psi(self):
        return np.arange(self.n_psi) * (2 * np.pi / self.n_psi)

    def directions(self):
        th, ps = np.meshgrid(self.theta, self.psi, indexing="ij")
        return np.stack([np.sin(th) * np.cos(ps), np.sin(th) * np.sin(ps), np.cos(th)], axis=-1)

    def weights(self, theta_max=None):
        tmax = self.theta_max if theta_max is None else min(theta_max, self.theta_max)
        wt = _theta_weights(self.theta, tmax)
        return np.outer(wt, np.full(self.n_psi, 2 * np.pi / self.n_psi))


@dataclass(frozen=True)
class FarFieldMap:
    grid: AngularGrid
    E: np.ndarray = field(repr=False)  # (n_theta, n_psi, 3) complex, Cartesian

    @property
    def theta_grid(self):
        return self.grid.theta

    @property
    def psi_grid(self):
        return self.grid.psi

    @cached_property
    def intensity(self):
        return np.sum(np.abs(self.E) ** 2, axis=-1)

    @property
    def weights(self):
        return self.grid.weights()

    def integral(self, theta_max=None) -> float:
        return float(np.sum(self.grid.weights(theta_max) * self.intensity))

    def spherical_components(self):
        """``(E_theta, E_psi)`` on the grid."""
        th, ps = np.meshgrid(self.grid.theta, self.grid.psi, indexing="ij")
        e_th = np.stack([np.cos(th) * np.cos(ps), np.cos(th) * np.sin(ps), -np.sin(th)], axis=-1)
        e_ps = np.stack([-np.sin(ps), np.cos(ps), np.zeros_like(ps)], axis=-1)
        return np.sum(self.E * e_th, axis=-1), np.sum(self.E * e_ps, axis=-1)


def radiation_prefactor(k):
    """``omega^2 / (4 pi eps0 c^2)`` written as ``k^2 / (4 pi eps0)``."""
    return k**2 / (4 * np.pi * EPS0)


def dipole_far_field(p, r_m, direction, k):
    """Radiation-zone field ``D * E`` of dipole ``p`` at ``r_m`` seen along ``direction``.

    ``direction`` may be an array of unit vectors with trailing axis 3.
    """
    p = np.asarray(p, dtype=complex)
    r_m = np.asarray(r_m, dtype=float)
    l_hat = np.asarray(direction, dtype=float)
    transverse = p - l_hat * np.sum(l_hat * p, axis=-1, keepdims=True)
    phase = np.exp(-1j * k * np.sum(l_hat * r_m, axis=-1, keepdims=True))
    return radiation_prefactor(k) * transverse * phase


def _cyl_to_cart(vec, phi):
    c, s = np.cos(phi), np.sin(phi)
    out = np.empty_like(vec)
    out[..., 0] = vec[..., 0] * c - vec[..., 1] * s
    out[..., 1] = vec[..., 0] * s + vec[..., 1] * c
    out[..., 2] = vec[..., 2]
    return out


def ring_dipoles(mode: WgmMode, ring: GratingRing):
    """Positions ``(G, 3)`` and Cartesian dipole moments ``(G, 3)`` of a ring."""
    phi = ring.angles
    pos = np.stack([ring.r_s * np.cos(phi), ring.r_s * np.sin(phi), np.full(ring.G, ring.z_s)], axis=-1)
    e_cyl = near_field(mode, ring.r_s, phi, ring.z_s)
    return pos, ring.A * _cyl_to_cart(e_cyl, phi)


def effective_dipole(mode: WgmMode, ring: GratingRing, m: int):
    if not 1 <= m <= ring.G:
        raise ValueError(f"scatterer index {m} outside 1..{ring.G}")
    pos, p = ring_dipoles(mode, ring)
    return pos[m - 1], p[m - 1]


def _design_dipoles(mode, rings):
    if not rings:
        return np.zeros((0, 3)), np.zeros((0, 3), dtype=complex)
    parts = [ring_dipoles(mode, ring) for ring in rings]
    return np.concatenate([a for a, _ in parts]), np.concatenate([b for _, b in parts])


def _array_sum(k, directions, pos, moments, paraxial=False, rows_per_chunk=64):
    n_t = directions.shape[0]
    out = np.zeros(directions.shape, dtype=complex)
    for start in range(0, n_t, rows_per_chunk):
        l_hat = directions[start:start + rows_per_chunk]
        phase = np.exp(-1j * k * (l_hat @ pos.T))
        S = phase @ moments
        if paraxial:
            S[..., 2] = 0.0
        else:
            S = S - l_hat * np.sum(l_hat * S, axis=-1, keepdims=True)
        out[start:start + rows_per_chunk] = S
    return radiation_prefactor(k) * out


def far_field_sum(mode: WgmMode, design: GratingDesign, grid: AngularGrid | None = None) -> FarFieldMap:
    """Coherent radiation-zone sum over every scatterer of every ring."""
    grid = grid or AngularGrid()
    design.validate(mode)
    k = 2 * np.pi / mode.lambda_res
    pos, moments = _design_dipoles(mode, design.rings)
    return FarFieldMap(grid, _array_sum(k, grid.directions(), pos, moments))


def paraxial_far_field(mode: WgmMode, ring: GratingRing, grid: AngularGrid) -> FarFieldMap:
    """Low-angle form: the transverse projection uses ``z`` in place of each ray
    direction, per-scatterer phases are kept."""
    if grid.theta_max > np.radians(30) + 1e-12:
        raise ValueError("paraxial grid limited to theta <= 30 degrees")
    k = 2 * np.pi / mode.lambda_res
    pos, moments = ring_dipoles(mode, ring)
    return FarFieldMap(grid, _array_sum(k, grid.directions(), pos, moments, paraxial=True))


def polarizability_from_hole(r_hole, t, n_disk) -> float:
    """Quasi-static polarizability (C m^2 / V) of a cylindrical air hole in the disk."""
    if r_hole < 0 or t < 0:
        raise ValueError("hole radius and depth must be non-negative")
    eps_h = n_disk**2
    eps_i = 1.0
    volume = np.pi * r_hole**2 * t
    return float(3 * EPS0 * eps_h * volume * (eps_i - eps_h) / (eps_i + 2 * eps_h))


def radiated_power(ff: FarFieldMap) -> float:
    """Total power (W) carried by a full-sphere map."""
    return ff.integral() / (2 * Z0)
