"""Condensate sector: BEC profiles and cross-sections, the small-``q``
thermal expansion, condensate fraction, interaction-broadened width, and
double-well / optical-lattice interference."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import DomainError, NumericalError, ScatteringContext, TrapGeometry, momentum_transfer
from .specfun import ZETA2, ZETA3, Kind, polylog
from .thermal import (
    EnsembleSpec,
    Statistics,
    excited_number,
    solve_fugacity,
    thermal_form_factor_fast,
)

__all__ = [
    "CondensateParams",
    "ArrayGeometry",
    "CrossSection",
    "condensation_temperature",
    "bec_ground_profile",
    "integrate_profile",
    "total_cross_section",
    "expansion_S",
    "condensate_fraction",
    "variational_scale",
    "variational_width",
    "resolve_condensate",
    "bec_below_tc_profile",
    "array_factor",
    "double_well_profile",
    "lattice_profile",
    "array_profile_finite_T",
]

INTERACTION_COEFF = 4.932


@dataclass(frozen=True)
class CondensateParams:
    """Resolved below-``t_c`` state of a trapped Bose gas."""

    N: float
    t: float
    t_c: float
    a_tilde: float
    n0: float
    width_scale: float

    def __post_init__(self):
        if not 0 <= self.n0 <= self.N * (1 + 1e-12):
            raise DomainError("condensate number must lie in [0, N]")
        if self.width_scale < 1:
            raise DomainError("repulsive interactions only broaden the condensate")


@dataclass(frozen=True)
class ArrayGeometry:
    """Row of ``wells`` identical condensates spaced ``d`` apart along x."""

    wells: int = 2
    d: float = 10.0

    def __post_init__(self):
        if self.wells < 1 or int(self.wells) != self.wells:
            raise DomainError("need a positive integer number of wells")
        if self.d < 0:
            raise DomainError("spacing must be non-negative")

    def check_tight_binding(self, geom: TrapGeometry) -> bool:
        ok = self.d >= 5.0 * geom.lx
        if not ok and self.wells > 1:
            warnings.warn(
                f"well spacing d={self.d} is below 5 l_x; tight-binding picture is doubtful",
                stacklevel=3,
            )
        return ok


@dataclass(frozen=True)
class CrossSection:
    sigma: float
    error: float
    sigma_k0: float


def condensation_temperature(N: float) -> float:
    """Thermodynamic-limit ``t_c = (N / zeta(3))^(1/3)``."""
    return (N / ZETA3) ** (1.0 / 3.0)


def bec_ground_profile(ctx: ScatteringContext, geom: TrapGeometry, N: float, theta, phi,
                       width_scale: float = 1.0):
    """``|N a_k|^2 exp(-2 Q)`` for ``N`` atoms in the (possibly broadened) ground state."""
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    return abs(N * ctx.a_k) ** 2 * np.exp(-2.0 * width_scale**2 * mt.Q)


def integrate_profile(D: Callable, rtol: float = 1e-10, max_theta: int = 4096,
                      max_phi: int = 1024) -> tuple[float, float]:
    """``int sin(theta) D(theta, phi) dtheta dphi`` with an error estimate.

    Gauss-Legendre in ``theta`` and the (spectrally accurate) periodic
    trapezoid rule in ``phi``; both are doubled until successive results
    agree to ``rtol``. The last difference is returned as the error.
    """
    n, m = 32, 16
    prev = None
    while True:
        x, wx = np.polynomial.legendre.leggauss(n)
        theta = 0.5 * np.pi * (x + 1.0)
        phi = 2.0 * np.pi * np.arange(m) / m
        vals = D(theta[:, None], phi[None, :])
        inner = np.sum(vals, axis=1) * (2.0 * np.pi / m)
        val = 0.5 * np.pi * float(np.sum(wx * np.sin(theta) * inner))
        if prev is not None:
            err = abs(val - prev)
            if err <= rtol * abs(val) or err == 0.0:
                return val, err
        if n >= max_theta and m >= max_phi:
            raise NumericalError(f"cross-section quadrature did not converge (last change {err:.3g})")
        prev = val
        n = min(2 * n, max_theta)
        m = min(2 * m, max_phi)


def total_cross_section(ctx: ScatteringContext, geom: TrapGeometry, N: float = 1.0,
                        profile: Optional[Callable] = None, rtol: float = 1e-10) -> CrossSection:
    """Total cross-section of a profile (default: the ``T = 0`` condensate).

    ``sigma_k0 = 4 pi |N a_s m / mu|^2`` is the ``k -> 0`` limit for the condensate.
    """
    if profile is None:
        def profile(th, ph):
            return bec_ground_profile(ctx, geom, N, th, ph)
    sigma, err = integrate_profile(profile, rtol=rtol)
    return CrossSection(sigma, err, 4.0 * math.pi * (N * ctx.m_over_mu) ** 2)


def expansion_S(t: float, z: float, Q: float, statistics=Statistics.BOSE,
                coefficients: str = "printed", geom: Optional[TrapGeometry] = None) -> float:
    """Small-``q`` expansion of the thermal Laguerre sum of an isotropic gas.

    ``Q`` is ``q^2 lbar^2`` with ``q^2 = q_x^2 + q_y^2 + qbar_z^2``.

    ``coefficients="printed"`` gives
    ``t^3 Li_3 - 6 Q t^4 Li_4 + Q^2 (12 t^5 Li_5 + 3 t^4 Li_4)``.
    ``coefficients="derived"`` gives the leading-order-in-``t`` expansion of the
    closed-form fugacity series, ``t^3 Li_3 - 2 Q t^4 Li_4 + 2 Q^2 t^5 Li_5``;
    this is the one that tracks the exact sum (see the test suite).
    Fermi statistics replace ``Li_j(z)`` by ``-Li_j(-z)``.
    """
    statistics = Statistics(statistics)
    if geom is not None and not geom.is_isotropic:
        raise DomainError("expansion assumes an isotropic trap")
    if statistics is Statistics.BOLTZMANN:
        raise DomainError("expansion is defined for Bose or Fermi gases")
    kind = Kind.BOSE if statistics is Statistics.BOSE else Kind.FERMI
    if Q > 0.1:
        warnings.warn("q^2 lbar^2 > 0.1: truncated expansion is unreliable", stacklevel=2)
    li3, li4, li5 = (polylog(j, z, kind) for j in (3, 4, 5))
    if coefficients == "printed":
        return t**3 * li3 - 6.0 * Q * t**4 * li4 + Q**2 * (12.0 * t**5 * li5 + 3.0 * t**4 * li4)
    if coefficients == "derived":
        return t**3 * li3 - 2.0 * Q * t**4 * li4 + 2.0 * Q**2 * t**5 * li5
    raise DomainError(f"unknown coefficient set {coefficients!r}")


def condensate_fraction(t: float, t_c: float, a_tilde: float = 0.0, l_bar: float = 1.0,
                        corrections: bool = False) -> float:
    """``N0 / N`` below ``t_c``, optionally with finite-size and interaction shifts."""
    if t < 0:
        raise DomainError("temperature must be non-negative")
    frac = 1.0 - (t / t_c) ** 3
    if corrections:
        frac -= 3.0 * t**2 * ZETA2 / (2.0 * t_c**3 * ZETA3)
        frac -= INTERACTION_COEFF * t**3.5 * a_tilde / (t_c**3 * ZETA3 * l_bar)
    return min(1.0, max(0.0, frac))


def _safeguarded_newton(f, df, lo: float, hi: float, tol: float = 1e-15, maxiter: int = 200):
    """Newton iteration that falls back to bisection when a step leaves ``[lo, hi]``."""
    flo = f(lo)
    if flo == 0:
        return lo
    if np.sign(flo) == np.sign(f(hi)):
        raise NumericalError("root is not bracketed")
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0:
            return x
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi = x
        d = df(x)
        step_ok = d != 0
        if step_ok:
            xn = x - fx / d
            step_ok = lo < xn < hi
        if not step_ok:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= tol * max(1.0, abs(x)):
            return xn
        x = xn
    raise NumericalError("safeguarded Newton did not converge")


def variational_scale(N0: float, a_tilde_over_l: float) -> float:
    """Gaussian variational broadening ``u >= 1``: root of ``u^5 - u = sqrt(2/pi) N0 a/l``."""
    if a_tilde_over_l < 0 or N0 < 0:
        raise DomainError("need N0 >= 0 and a_tilde >= 0")
    c = math.sqrt(2.0 / math.pi) * N0 * a_tilde_over_l
    if c == 0:
        return 1.0
    return _safeguarded_newton(
        lambda u: u**5 - u - c,
        lambda u: 5.0 * u**4 - 1.0,
        1.0,
        max(2.0, (c + 1.0) ** 0.2 + 1.0),
    )


def variational_width(N0: float, a_tilde: float, l_bar: float = 1.0) -> float:
    """Interaction-broadened condensate width ``ell_tilde = u * lbar``."""
    return variational_scale(N0, a_tilde / l_bar) * l_bar


def _excited_cloud(geom: TrapGeometry, N: float, t: float, mt):
    """Excited-state Laguerre sum at ``z = 1`` and its forward value."""
    spec = EnsembleSpec(Statistics.BOSE, N, t, 0.0, 0.0)
    return thermal_form_factor_fast(spec, geom, mt), excited_number(spec, geom)


def resolve_condensate(N: float, t: float, a_tilde: float, geom: TrapGeometry,
                       corrections: bool = True, fraction: str = "formula",
                       width_scale: Optional[float] = None) -> CondensateParams:
    """Condensate number and width below ``t_c``.

    ``fraction="formula"`` uses :func:`condensate_fraction` with the
    thermodynamic ``t_c``; ``fraction="exact"`` takes ``N0`` from the exact
    spectrum (the thermal module's condensed solution).
    """
    t_c = condensation_temperature(N)
    if fraction == "formula":
        if t >= t_c:
            raise DomainError(f"t={t} is not below t_c={t_c}")
        n0 = N * condensate_fraction(t, t_c, a_tilde, geom.l_bar, corrections)
    elif fraction == "exact":
        sol = solve_fugacity(N, t, Statistics.BOSE, geom)
        if not sol.condensed:
            raise DomainError(f"t={t} is above the finite-size transition")
        n0 = sol.n0
    else:
        raise DomainError(f"unknown fraction source {fraction!r}")
    if width_scale is None:
        width_scale = variational_scale(n0, a_tilde / geom.l_bar)
    return CondensateParams(N, t, t_c, a_tilde, n0, width_scale)


def _condensate_and_cloud(ctx, geom, params: CondensateParams, theta, phi):
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    cond = params.n0 * np.exp(-params.width_scale**2 * mt.Q)
    n_th = params.N - params.n0
    if params.t == 0 or n_th <= 0:
        return cond, np.zeros_like(cond)
    cloud, n_exc = _excited_cloud(geom, params.N, params.t, mt)
    # the cloud carries whatever the condensate does not
    return cond, cloud * (n_th / n_exc)


def bec_below_tc_profile(ctx: ScatteringContext, geom: TrapGeometry, N: float, t: float,
                         a_tilde: float, theta, phi, corrections: bool = True,
                         fraction: str = "formula", width_scale: Optional[float] = None):
    """Condensate plus thermal cloud, added coherently."""
    params = resolve_condensate(N, t, a_tilde, geom, corrections, fraction, width_scale)
    cond, cloud = _condensate_and_cloud(ctx, geom, params, theta, phi)
    return np.abs(ctx.a_k * (cond + cloud)) ** 2


def array_factor(ctx: ScatteringContext, d: float, wells: int, theta):
    """``[sin(N' x) / sin(x)]^2`` with ``x = pi d sin(theta) / lambda``.

    Evaluated as ``U_{N'-1}(cos x)^2`` through the Chebyshev recurrence, which
    has no removable singularity at the principal maxima.
    """
    x = 0.5 * ctx.k * d * np.sin(np.asarray(theta, dtype=float))
    c = np.cos(x)
    prev = np.zeros_like(c)
    cur = np.ones_like(c)
    for _ in range(int(wells) - 1):
        prev, cur = cur, 2.0 * c * cur - prev
    return cur**2


def double_well_profile(ctx: ScatteringContext, geom: TrapGeometry, N: float, d: float,
                        theta, phi, width_scale: float = 1.0):
    """Two coherent condensates ``d`` apart: ``[2 cos(pi d sin(theta)/lambda)]^2`` fringes."""
    ArrayGeometry(2, d).check_tight_binding(geom)
    x = 0.5 * ctx.k * d * np.sin(np.asarray(theta, dtype=float))
    return bec_ground_profile(ctx, geom, N, theta, phi, width_scale) * (2.0 * np.cos(x)) ** 2


def lattice_profile(ctx: ScatteringContext, geom: TrapGeometry, N: float, d: float, wells: int,
                    theta, phi, width_scale: float = 1.0):
    """``wells`` coherent condensates on a line: grating interference."""
    ArrayGeometry(wells, d).check_tight_binding(geom)
    return bec_ground_profile(ctx, geom, N, theta, phi, width_scale) * array_factor(ctx, d, wells, theta)


def array_profile_finite_T(ctx: ScatteringContext, geom: TrapGeometry, N: float, t: float,
                           a_tilde: float, d: float, wells: int, theta, phi,
                           corrections: bool = True, fraction: str = "formula",
                           width_scale: Optional[float] = None):
    """Finite-temperature array: condensates interfere, thermal clouds add incoherently.

    ``D = AF^2 |a_k N0 exp(-Q ell^2)|^2 + N' |a_k S_th|^2`` per well population ``N``.
    """
    ArrayGeometry(wells, d).check_tight_binding(geom)
    params = resolve_condensate(N, t, a_tilde, geom, corrections, fraction, width_scale)
    cond, cloud = _condensate_and_cloud(ctx, geom, params, theta, phi)
    af = array_factor(ctx, d, wells, theta)
    a2 = abs(ctx.a_k) ** 2
    return af * a2 * np.abs(cond) ** 2 + wells * a2 * np.abs(cloud) ** 2
