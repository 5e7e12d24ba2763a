"""Scattering of slow particles by harmonically trapped ideal Bose, Fermi and
Boltzmann gases and Bose-Einstein condensates."""

__version__ = "0.1.0"

from .core import (
    AngularProfile,
    DomainError,
    MomentumTransfer,
    NumericalError,
    ScatteringContext,
    TrapGeometry,
    fixed_scatterer_amplitude,
    momentum_transfer,
    optical_theorem_check,
)
from .single import OscillatorState, amplitude_1d, amplitude_2d, amplitude_3d
from .thermal import (
    EnsembleSpec,
    Statistics,
    fermi_ground_profile,
    resolve_ensemble,
    solve_fugacity,
    thermal_amplitude,
    thermal_profile,
)
from .condensate import (
    bec_below_tc_profile,
    bec_ground_profile,
    double_well_profile,
    lattice_profile,
    total_cross_section,
)

__all__ = [
    "__version__",
    "AngularProfile",
    "DomainError",
    "MomentumTransfer",
    "NumericalError",
    "ScatteringContext",
    "TrapGeometry",
    "fixed_scatterer_amplitude",
    "momentum_transfer",
    "optical_theorem_check",
    "OscillatorState",
    "amplitude_1d",
    "amplitude_2d",
    "amplitude_3d",
    "EnsembleSpec",
    "Statistics",
    "fermi_ground_profile",
    "resolve_ensemble",
    "solve_fugacity",
    "thermal_amplitude",
    "thermal_profile",
    "bec_below_tc_profile",
    "bec_ground_profile",
    "double_well_profile",
    "lattice_profile",
    "total_cross_section",
]
