"""Scattering by scatterers in definite oscillator eigenstates.

The amplitude of a scatterer in state ``(n_x, n_y, n_z)`` is the fixed
amplitude ``-a_k`` times the Fourier transform of its probability density,
``exp(-Q) * prod_a L_{n_a}(2 Q_a)`` with ``Q_a = (q_a l_a)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import DomainError, MomentumTransfer, ScatteringContext, TrapGeometry, momentum_transfer
from .specfun import laguerre

__all__ = [
    "OscillatorState",
    "form_factor",
    "amplitude_1d",
    "amplitude_2d",
    "amplitude_3d",
    "amplitude_fixed_configuration",
    "differential_cross_section",
    "laguerre_factor_1d",
    "count_sign_changes",
]


@dataclass(frozen=True)
class OscillatorState:
    """Quantum numbers of one scatterer; ``None`` marks an axis without motion."""

    nx: Optional[int] = 0
    ny: Optional[int] = None
    nz: Optional[int] = None

    def __post_init__(self):
        if self.nx is None:
            raise DomainError("the x axis is always present")
        if self.ny is None and self.nz is not None:
            raise DomainError("a z quantum number needs a y quantum number")
        for n in self.quantum_numbers:
            if int(n) != n or n < 0:
                raise DomainError(f"quantum numbers must be non-negative integers, got {n}")

    @classmethod
    def three_d(cls, nx: int, ny: int, nz: int) -> "OscillatorState":
        return cls(nx, ny, nz)

    @property
    def quantum_numbers(self) -> tuple[int, ...]:
        return tuple(n for n in (self.nx, self.ny, self.nz) if n is not None)

    @property
    def dimensionality(self) -> int:
        return len(self.quantum_numbers)

    def energy(self, geom: TrapGeometry) -> float:
        """Energy in units of the geometric-mean ``hbar omega``."""
        w = geom.level_spacings[: self.dimensionality]
        return float(np.sum((np.array(self.quantum_numbers) + 0.5) * w))


def form_factor(state: OscillatorState, mt: MomentumTransfer):
    """``exp(-sum Q_a) prod L_{n_a}(2 Q_a)`` over the axes the state occupies."""
    Qs = (mt.Qx, mt.Qy, mt.Qz)[: state.dimensionality]
    out = np.exp(-sum(Qs))
    for n, Qa in zip(state.quantum_numbers, Qs):
        out = out * laguerre(n, 2.0 * Qa)
    return out


def amplitude_3d(ctx: ScatteringContext, geom: TrapGeometry, state: OscillatorState, theta, phi):
    """Amplitude for a scatterer in an eigenstate of the trap.

    The state's dimensionality picks the 1-D, 2-D or 3-D form; only the 3-D
    form carries the longitudinal (obliquity) momentum transfer.
    """
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    return -ctx.a_k * form_factor(state, mt)


def amplitude_1d(ctx: ScatteringContext, geom: TrapGeometry, nx: int, theta, phi):
    return amplitude_3d(ctx, geom, OscillatorState(nx), theta, phi)


def amplitude_2d(ctx: ScatteringContext, geom: TrapGeometry, nx: int, ny: int, theta, phi):
    return amplitude_3d(ctx, geom, OscillatorState(nx, ny), theta, phi)


def amplitude_fixed_configuration(
    ctx: ScatteringContext,
    geom: TrapGeometry,
    states: Sequence[OscillatorState],
    theta,
    phi,
):
    """Coherent sum of single-scatterer amplitudes for a list of occupied states."""
    if len(states) == 0:
        raise DomainError("need at least one scatterer")
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    total = sum(form_factor(s, mt) for s in states)
    return -ctx.a_k * total


def differential_cross_section(amplitude):
    return np.abs(amplitude) ** 2


def laguerre_factor_1d(ctx: ScatteringContext, geom: TrapGeometry, nx: int, theta, phi=0.0):
    """Real Laguerre factor of the 1-D amplitude; its sign changes mark the zeros of D."""
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    return laguerre(nx, 2.0 * mt.Qx)


def count_sign_changes(values) -> int:
    """Number of strict sign changes along a 1-D sequence (exact zeros skipped)."""
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
