"""Spectral efficiency, collection efficiency and the scattering-loss Q model."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .farfield import AngularGrid, FarFieldMap, GratingDesign, far_field_sum, radiated_power
from .modes import WgmMode, mode_energy_integral, mode_volume

EPS0 = constants.epsilon_0


class EmptyMap(ValueError):
    """The far-field map carries no power."""


@dataclass(frozen=True)
class EmitterSpectrum:
    """Emitter described by ``beta = Gamma_total / Gamma_ZPL - 1`` and its ZPL wavelength."""

    beta: float
    lambda_zpl: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.lambda_zpl <= 0:
            raise ValueError("lambda_zpl must be positive")

    @classmethod
    def nv(cls):
        return cls(beta=30.0, lambda_zpl=637e-9)

    @classmethod
    def siv(cls, zpl_fraction=0.7):
        return cls.from_zpl_fraction(zpl_fraction, 737e-9)

    @classmethod
    def from_zpl_fraction(cls, fraction, lambda_zpl):
        if not 0 < fraction <= 1:
            raise ValueError("ZPL fraction must lie in (0, 1]")
        return cls(beta=1.0 / fraction - 1.0, lambda_zpl=lambda_zpl)


@dataclass(frozen=True)
class EfficiencyReport:
    F: float
    Q_intrinsic: float
    Q_scatter: float
    Q_total: float
    V: float
    eta1: float
    eta2_at_na: float
    eta: float
    upward_fraction: float
    na: float
    eta2_grating: float
    grating_fraction: float
    no_grating: bool = False

    def __post_init__(self):
        for name, value in vars(self).items():
            if name != "no_grating":
                object.__setattr__(self, name, float(value))


def eta1(F, beta) -> float:
    """Fraction of emission into the cavity-enhanced ZPL, ``F / (F + beta)``."""
    if F < 0 or beta < 0:
        raise ValueError("F and beta must be non-negative")
    if F == 0 and beta == 0:
        warnings.warn("eta1 undefined for F = beta = 0; returning 0", RuntimeWarning, stacklevel=2)
        return 0.0
    if math.isinf(F):
        return 1.0
    return F / (F + beta)


def purcell(Q, V) -> float:
    """Purcell factor ``3 / (4 pi^2) * Q / V`` with ``V`` in ``(lambda / n)^3``."""
    if not (Q > 0 and V > 0):
        raise ValueError("Q and V must be positive")
    return 3.0 / (4 * np.pi**2) * Q / V


def eta2(ff: FarFieldMap, na) -> float:
    """Share of the far-field power inside the cone ``theta < arcsin(na)``.

    Other half angles (up to the full sphere) go through :func:`cone_fraction`.
    """
    if not 0 < na <= 1:
        raise ValueError("NA must lie in (0, 1]")
    return cone_fraction(ff, math.asin(na))


def cone_fraction(ff: FarFieldMap, theta_c) -> float:
    total = ff.integral()
    if not total > 0:
        raise EmptyMap("far-field map carries no power")
    return ff.integral(theta_c) / total


def upward_fraction(ff: FarFieldMap) -> float:
    return cone_fraction(ff, np.pi / 2)


def quality_factor(mode: WgmMode, design: GratingDesign, Q_intrinsic, ff: FarFieldMap | None = None,
                   grid: AngularGrid | None = None):
    """Scattering-limited and loaded Q of ``mode`` with the grating ``design``.

    Stored energy uses unit peak field; the scattered power comes from the
    same normalisation through the far-field sum. Returns
    ``(Q_scatter, Q_total)``; a lossless grating gives ``Q_scatter = inf``.
    """
    if not Q_intrinsic > 0:
        raise ValueError("Q_intrinsic must be positive")
    if design.is_bare:
        return math.inf, float(Q_intrinsic)
    if ff is None:
        ff = far_field_sum(mode, design, grid)
    p_scat = radiated_power(ff)
    if p_scat <= 0:
        return math.inf, float(Q_intrinsic)
    omega = 2 * np.pi * constants.c / mode.lambda_res
    energy = 0.5 * EPS0 * mode_energy_integral(mode)
    q_scat = omega * energy / p_scat
    return q_scat, 1.0 / (1.0 / Q_intrinsic + 1.0 / q_scat)


def total_efficiency(mode: WgmMode, design: GratingDesign, emitter: EmitterSpectrum, Q_intrinsic=1e6,
                     na=0.6, grid: AngularGrid | None = None, ff: FarFieldMap | None = None) -> EfficiencyReport:
    """Evaluate a grating design end to end.

    Cavity loss not carried by the grating (``1/Q_intrinsic``) is assumed to
    leave the disk in-plane, outside any collection cone, so the collected
    share of cavity emission is ``eta2_grating * Q_total / Q_scatter``.
    """
    V = mode_volume(mode)
    if design.is_bare:
        F = purcell(Q_intrinsic, V)
        return EfficiencyReport(F=F, Q_intrinsic=Q_intrinsic, Q_scatter=math.inf, Q_total=float(Q_intrinsic),
                                V=V, eta1=eta1(F, emitter.beta), eta2_at_na=0.0, eta=0.0,
                                upward_fraction=math.nan, na=na, eta2_grating=math.nan,
                                grating_fraction=0.0, no_grating=True)
    if ff is None:
        ff = far_field_sum(mode, design, grid)
    q_scat, q_tot = quality_factor(mode, design, Q_intrinsic, ff=ff)
    F = purcell(q_tot, V)
    e1 = eta1(F, emitter.beta)
    e2_grating = eta2(ff, na)
    frac = q_tot / q_scat
    e2 = e2_grating * frac
    return EfficiencyReport(F=F, Q_intrinsic=float(Q_intrinsic), Q_scatter=q_scat, Q_total=q_tot, V=V,
                            eta1=e1, eta2_at_na=e2, eta=e1 * e2, upward_fraction=upward_fraction(ff),
                            na=na, eta2_grating=e2_grating, grating_fraction=frac)
