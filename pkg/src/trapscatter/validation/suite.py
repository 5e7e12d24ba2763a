"""Randomized cross-checks between the closed forms and the brute-force oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import ScatteringContext, TrapGeometry, momentum_transfer
from ..single import OscillatorState, amplitude_3d
from ..specfun import oscillator_eigenfunction
from ..thermal import (
    EnsembleSpec,
    Statistics,
    thermal_amplitude_direct,
    thermal_amplitude_fast,
    total_number,
)
from .oracle import MAX_QUANTUM_NUMBER, direct_thermal_sum, quadrature_amplitude

__all__ = [
    "CheckResult",
    "random_amplitude_case",
    "random_thermal_case",
    "relative_error",
    "run_suite",
    "MAX_DAMPING",
]

# Largest Debye-Waller exponent sampled in thermal comparisons. Beyond it the
# level sum loses relative precision to cancellation (the result falls many
# orders of magnitude below its individual terms).
MAX_DAMPING = 6.0

_SQ2, _SQ3 = math.sqrt(2.0), math.sqrt(3.0)
_SHAPES = ((1.0, 1.0, 1.0), (1.0, 1.0, _SQ2), (1.0, _SQ2, 1.0 / _SQ2))


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: {self.cases} cases, worst {self.worst:.3e} (tol {self.tol:.1e})"


def relative_error(a, b, abs_floor: float = 0.0) -> float:
    """``|a - b| / max(|b|, abs_floor)``, worst over arrays."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), abs_floor)))


def random_amplitude_case(rng: np.random.Generator, nmax: int = 8):
    """Random state (dimension 1-3, ``n <= nmax``), ``k_as`` in [0.5, 6], lengths in [0.5, 2]."""
    dim = int(rng.integers(1, 4))
    ns = [int(n) for n in rng.integers(0, nmax + 1, size=dim)] + [None] * (3 - dim)
    state = OscillatorState(*ns)
    geom = TrapGeometry(*rng.uniform(0.5, 2.0, size=3))
    ctx = ScatteringContext(float(rng.uniform(0.5, 6.0)), float(rng.uniform(0.01, 1.0)))
    theta = float(rng.uniform(0.0, math.pi))
    phi = float(rng.uniform(0.0, 2.0 * math.pi))
    return ctx, geom, state, theta, phi


def random_thermal_case(rng: np.random.Generator, t_range=(0.2, 50.0)):
    """Random ensemble with direction limited to Debye-Waller exponents <= :data:`MAX_DAMPING`.

    Statistics, log-uniform ``t``, fugacity and (for bosons, sometimes) a
    condensate are drawn at random; trap shapes are commensurate so the
    level sum can be regrouped by energy.
    """
    stats = Statistics(rng.choice([s.value for s in Statistics]))
    t = float(math.exp(rng.uniform(math.log(t_range[0]), math.log(t_range[1]))))
    l = float(rng.uniform(0.5, 2.0))
    geom = TrapGeometry(*(l * np.array(_SHAPES[int(rng.integers(len(_SHAPES)))])))
    w = geom.level_spacings
    if stats is Statistics.BOLTZMANN:
        spec = EnsembleSpec(stats, float(rng.uniform(1.0, 1e4)), t)
    elif stats is Statistics.FERMI:
        hi = w.min() / t + math.log(0.99)
        log_z = float(rng.uniform(-6.0, hi))
        spec = EnsembleSpec(stats, 1.0, t, log_z)
        spec = EnsembleSpec(stats, total_number(spec, geom), t, log_z)
    elif rng.random() < 0.25:
        n0 = float(rng.uniform(1.0, 1e4))
        spec = EnsembleSpec(stats, 1.0, t, 0.0, n0)
        spec = EnsembleSpec(stats, total_number(spec, geom), t, 0.0, n0)
    else:
        log_z = -float(math.exp(rng.uniform(math.log(1e-4), math.log(6.0))))
        spec = EnsembleSpec(stats, 1.0, t, log_z)
        spec = EnsembleSpec(stats, total_number(spec, geom), t, log_z)
    coth = 1.0 + 2.0 / np.expm1(w / t)
    while True:
        ctx = ScatteringContext(float(rng.uniform(0.1, 6.0)), 0.1)
        theta = float(rng.uniform(0.0, math.pi))
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        mt = momentum_transfer(ctx.k, theta, phi, geom)
        damping = float(mt.Qx * coth[0] + mt.Qy * coth[1] + mt.Qz * coth[2])
        if damping <= MAX_DAMPING:
            return ctx, geom, spec, theta, phi


def check_quadrature(rng, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        ctx, geom, state, theta, phi = random_amplitude_case(rng)
        ref = quadrature_amplitude(ctx, geom, state, theta, phi)
        got = amplitude_3d(ctx, geom, state, theta, phi)
        worst = max(worst, relative_error(got, ref, 1e-12 / 1e-8))
    return CheckResult("closed-form amplitude vs quadrature", n, worst, 1e-8)


def check_fast_path(rng, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        ctx, geom, spec, theta, phi = random_thermal_case(rng)
        a = thermal_amplitude_fast(ctx, geom, spec, theta, phi)
        b = thermal_amplitude_direct(ctx, geom, spec, theta, phi)
        worst = max(worst, relative_error(a, b))
    return CheckResult("thermal fugacity series vs level sum", n, worst, 1e-9)


def check_literal_sum(rng, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        # redraw until the literal block needed to resolve the tail stays small
        while True:
            ctx, geom, spec, theta, phi = random_thermal_case(rng, t_range=(0.2, 3.0))
            reach = spec.t * (40.0 + 4.0 * abs(math.log(spec.N)))
            caps = (reach / geom.level_spacings).astype(int) + 20
            if caps.max() <= 120:
                break
        ref = direct_thermal_sum(ctx, geom, spec, theta, phi, caps=caps)
        got = thermal_amplitude_direct(ctx, geom, spec, theta, phi)
        worst = max(worst, relative_error(got, ref))
    return CheckResult("level sum vs literal triple sum", n, worst, 1e-10)


def check_normalization() -> CheckResult:
    x = np.linspace(-20.0, 20.0, 8001)
    worst = 0.0
    for k in range(MAX_QUANTUM_NUMBER + 1):
        norm = np.trapezoid(oscillator_eigenfunction(k, x) ** 2, x)
        worst = max(worst, abs(norm - 1.0))
    return CheckResult("eigenfunction normalization", MAX_QUANTUM_NUMBER + 1, worst, 1e-10)


def run_suite(seed: int = 0, n_amplitude: int = 50, n_thermal: int = 30, n_literal: int = 10):
    """Run every randomized check; returns a list of :class:`CheckResult`."""
    rng = np.random.default_rng(seed)
    return [
        check_normalization(),
        check_quadrature(rng, n_amplitude),
        check_fast_path(rng, n_thermal),
        check_literal_sum(rng, n_literal),
    ]
