"""Semi-analytic design of grating-outcoupled microdisk spin-photon interfaces."""

__version__ = "0.1.0"

from .efficiency import EfficiencyReport, EmitterSpectrum, eta1, eta2, purcell, total_efficiency, upward_fraction
from .farfield import AngularGrid, FarFieldMap, GratingDesign, GratingRing, far_field_sum, polarizability_from_hole
from .modes import DiskGeometry, Polarization, WgmMode, enumerate_resonant_designs, resonant_mode
from .optimize import DesignContext, DesignVector, PsoConfig, objective, optimize_for_P, optimize_over_P
