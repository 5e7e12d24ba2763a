"""Unit conventions, momentum-transfer kinematics and the fixed-scatterer amplitude.

Everything is dimensionless: lengths in units of the s-wave scattering
length ``a_s``, wavenumbers as ``k * a_s`` and cross-sections in ``a_s**2``.
Energies of trapped scatterers are measured in units of ``hbar * omega``
where ``omega`` is the geometric-mean trap frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import constants, optimize

__all__ = [
    "DomainError",
    "NumericalError",
    "ScatteringContext",
    "TrapGeometry",
    "MomentumTransfer",
    "AngularProfile",
    "momentum_transfer",
    "fixed_scatterer_amplitude",
    "optical_theorem_check",
    "oscillator_length",
    "oscillator_frequency",
    "dimensionless_temperature",
    "half_width",
]


class DomainError(ValueError):
    """Input outside the domain where an operation is defined."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


@dataclass(frozen=True)
class ScatteringContext:
    """Incident particle and contact-interaction parameters.

    Parameters
    ----------
    k_as : float
        Incident wavenumber times the scattering length, ``k * a_s``.
    mass_ratio : float
        ``m / M``, incident-particle mass over scatterer mass.
    """

    k_as: float
    mass_ratio: float = 0.1

    def __post_init__(self):
        if not np.isfinite(self.k_as) or self.k_as < 0:
            raise DomainError(f"k_as must be finite and >= 0, got {self.k_as}")
        if not np.isfinite(self.mass_ratio) or self.mass_ratio <= 0:
            raise DomainError(f"mass_ratio must be finite and > 0, got {self.mass_ratio}")

    @property
    def k(self) -> float:
        """Incident wavenumber in units of ``1/a_s``."""
        return self.k_as

    @property
    def m_over_mu(self) -> float:
        """``m / mu_bar = 1 + m/M`` with ``mu_bar`` the reduced mass."""
        return 1.0 + self.mass_ratio

    @property
    def a_k(self) -> complex:
        """Unitarized amplitude scale ``a_s (m/mu) / (1 + i k a_s m/mu)``."""
        b = self.m_over_mu
        return b / (1.0 + 1j * self.k_as * b)

    @property
    def wavelength(self) -> float:
        """de Broglie wavelength ``2 pi / k`` of the incident particle."""
        if self.k_as == 0:
            return np.inf
        return 2.0 * np.pi / self.k_as

    def as_dict(self) -> dict[str, float]:
        return {"k_as": self.k_as, "m_over_M": self.mass_ratio}


@dataclass(frozen=True)
class TrapGeometry:
    """Oscillator lengths of the trap along x, y, z (units of ``a_s``)."""

    lx: float = 1.0
    ly: float = 1.0
    lz: float = 1.0

    def __post_init__(self):
        for name in ("lx", "ly", "lz"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise DomainError(f"{name} must be finite and > 0, got {v}")

    @classmethod
    def isotropic(cls, l: float = 1.0) -> "TrapGeometry":
        return cls(l, l, l)

    @classmethod
    def from_frequencies(cls, omegas, mass_kg: float, a_s_m: float) -> "TrapGeometry":
        """Build the geometry from angular frequencies (rad/s) and the scatterer mass."""
        lengths = [oscillator_length(w, mass_kg) / a_s_m for w in omegas]
        return cls(*lengths)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([self.lx, self.ly, self.lz])

    @property
    def l_bar(self) -> float:
        """Geometric-mean oscillator length."""
        return float(np.cbrt(self.lx * self.ly * self.lz))

    @property
    def level_spacings(self) -> np.ndarray:
        """Per-axis quanta ``omega_a / omega`` in units of the geometric-mean frequency."""
        return (self.l_bar / self.lengths) ** 2

    @property
    def is_isotropic(self) -> bool:
        return self.lx == self.ly == self.lz

    def scaled(self, factor: float) -> "TrapGeometry":
        return TrapGeometry(self.lx * factor, self.ly * factor, self.lz * factor)

    def as_dict(self) -> dict[str, float]:
        return {"lx": self.lx, "ly": self.ly, "lz": self.lz}


@dataclass(frozen=True)
class MomentumTransfer:
    """Momentum-transfer components and their trap-scaled squares.

    ``Qx, Qy, Qz`` are ``(q_a l_a)**2`` and ``Q`` is their sum. All fields
    broadcast like the angle arrays they were built from.
    """

    qx: Any
    qy: Any
    qz_bar: Any
    Qx: Any
    Qy: Any
    Qz: Any

    @property
    def Q(self):
        return self.Qx + self.Qy + self.Qz

    @classmethod
    def from_components(cls, Qx, Qy, Qz) -> "MomentumTransfer":
        """Build directly from the scaled squares (signs of q are irrelevant downstream)."""
        Qx, Qy, Qz = (np.asarray(v, dtype=float) for v in (Qx, Qy, Qz))
        return cls(np.sqrt(Qx), np.sqrt(Qy), -np.sqrt(Qz), Qx, Qy, Qz)


def momentum_transfer(k: float, theta, phi, geom: TrapGeometry) -> MomentumTransfer:
    """Momentum transfer for scattering into direction ``(theta, phi)``.

    ``q_x = k sin(theta) cos(phi) / 2``, ``q_y = k sin(theta) sin(phi) / 2`` and
    the obliquity component ``qbar_z = -k sin^2(theta / 2)``.
    """
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any(theta < 0) or np.any(theta > np.pi):
        raise DomainError("theta must lie in [0, pi]")
    st = np.sin(theta)
    qx = 0.5 * k * st * np.cos(phi)
    qy = 0.5 * k * st * np.sin(phi)
    qz = -k * np.sin(0.5 * theta) ** 2
    qx, qy, qz = np.broadcast_arrays(qx, qy, qz)
    return MomentumTransfer(
        qx, qy, qz,
        (qx * geom.lx) ** 2,
        (qy * geom.ly) ** 2,
        (qz * geom.lz) ** 2,
    )


def fixed_scatterer_amplitude(ctx: ScatteringContext) -> complex:
    """Isotropic amplitude ``-a_k`` of a fixed contact scatterer (all Born orders)."""
    return -ctx.a_k


def optical_theorem_check(ctx: ScatteringContext) -> float:
    """Relative residual between ``4 pi |f|^2`` and ``(4 pi / k) Im f``."""
    if ctx.k_as <= 0:
        raise DomainError("optical theorem check needs k > 0")
    f = fixed_scatterer_amplitude(ctx)
    sigma = 4.0 * np.pi * abs(f) ** 2
    sigma_opt = 4.0 * np.pi / ctx.k_as * f.imag
    return abs(sigma - sigma_opt) / sigma


def half_width(D, theta_max: float = np.pi, samples: int = 4001) -> float:
    """First angle at which ``D(theta)`` falls to half its forward value.

    ``D`` is a vectorized callable of ``theta``. The crossing is located on a
    uniform scan and refined by bisection-safe root finding.
    """
    theta = np.linspace(0.0, theta_max, samples)
    vals = np.asarray(D(theta), dtype=float) - 0.5 * float(D(np.array([0.0]))[0])
    below = np.nonzero(vals <= 0)[0]
    if below.size == 0:
        raise NumericalError("profile never drops to half its forward value")
    i = int(below[0])
    if vals[i] == 0:
        return float(theta[i])
    half = 0.5 * float(D(np.array([0.0]))[0])
    return float(optimize.brentq(lambda x: float(D(np.array([x]))[0]) - half,
                                 theta[i - 1], theta[i], xtol=1e-14))


# SI bridge, used by the CLI only.

def oscillator_length(omega: float, mass_kg: float) -> float:
    """``sqrt(hbar / (M omega))`` in metres."""
    if omega <= 0 or mass_kg <= 0:
        raise DomainError("omega and mass must be positive")
    return float(np.sqrt(constants.hbar / (mass_kg * omega)))


def oscillator_frequency(length_m: float, mass_kg: float) -> float:
    """Inverse of :func:`oscillator_length`."""
    if length_m <= 0 or mass_kg <= 0:
        raise DomainError("length and mass must be positive")
    return float(constants.hbar / (mass_kg * length_m**2))


def dimensionless_temperature(T_kelvin: float, omega: float) -> float:
    """``t = k_B T / (hbar omega)``."""
    if T_kelvin < 0 or omega <= 0:
        raise DomainError("need T >= 0 and omega > 0")
    return float(constants.k * T_kelvin / (constants.hbar * omega))


@dataclass
class AngularProfile:
    """Differential cross-section sampled on a set of directions."""

    theta: np.ndarray
    phi: np.ndarray
    D: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.theta, self.phi, self.D = np.broadcast_arrays(
            np.asarray(self.theta, dtype=float),
            np.asarray(self.phi, dtype=float),
            np.asarray(self.D, dtype=float),
        )
        if np.any(self.D < 0):
            raise DomainError("differential cross-section must be non-negative")

    columns = ("theta", "phi", "D")

    def rows(self):
        return np.column_stack([self.theta.ravel(), self.phi.ravel(), self.D.ravel()])
