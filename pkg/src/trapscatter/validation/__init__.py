"""Independent brute-force checks of the closed forms, and a runnable suite."""

from .oracle import (
    MAX_ORACLE_STATES,
    MAX_QUANTUM_NUMBER,
    QuadratureSpec,
    axis_fourier_transform,
    direct_thermal_sum,
    quadrature_amplitude,
)
from .suite import MAX_DAMPING, CheckResult, random_amplitude_case, random_thermal_case, relative_error, run_suite

__all__ = [
    "MAX_ORACLE_STATES",
    "MAX_QUANTUM_NUMBER",
    "QuadratureSpec",
    "axis_fourier_transform",
    "direct_thermal_sum",
    "quadrature_amplitude",
    "CheckResult",
    "MAX_DAMPING",
    "random_amplitude_case",
    "random_thermal_case",
    "relative_error",
    "run_suite",
]
