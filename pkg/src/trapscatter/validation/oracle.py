"""Brute-force validators for the closed forms.

``quadrature_amplitude`` integrates the scattering phase against the
scatterer's probability density numerically, one axis at a time.
``direct_thermal_sum`` evaluates the thermal level sum literally over a
rectangular block of quantum numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from ..core import DomainError, NumericalError, ScatteringContext, TrapGeometry, momentum_transfer
from ..single import OscillatorState
from ..specfun import laguerre_table, oscillator_eigenfunction
from ..thermal import CutoffError, EnsembleSpec, Statistics, fermi_shell_filling, occupation

__all__ = [
    "QuadratureSpec",
    "axis_fourier_transform",
    "quadrature_amplitude",
    "direct_thermal_sum",
    "MAX_QUANTUM_NUMBER",
    "MAX_ORACLE_STATES",
]

MAX_QUANTUM_NUMBER = 30
MAX_KL = 20.0
MAX_ORACLE_STATES = 2_000_000


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate one axis.

    rule : ``"adaptive"`` (QUADPACK oscillatory rule) or ``"gauss-hermite"``.
    points : Gauss-Hermite order; the error estimate compares with twice that order.
    cutoff_margin : integration range is ``(sqrt(2n+1) + margin) * l``.
    tol : largest acceptable absolute error estimate per axis.
    """

    rule: str = "adaptive"
    points: int = 120
    cutoff_margin: float = 8.0
    tol: float = 1e-12

    def __post_init__(self):
        if self.rule not in ("adaptive", "gauss-hermite"):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.points < 2 or self.tol <= 0 or self.cutoff_margin <= 0:
            raise DomainError("need points >= 2, tol > 0 and a positive cutoff margin")


def _hermite_polynomial_part(n: int, u: np.ndarray) -> np.ndarray:
    """``psi_n(u) * exp(u^2 / 2)`` for unit length: the normalized Hermite recurrence without the Gaussian."""
    prev = np.full_like(u, np.pi**-0.25)
    if n == 0:
        return prev
    cur = np.sqrt(2.0) * u * prev
    for k in range(1, n):
        prev, cur = cur, np.sqrt(2.0 / (k + 1)) * u * cur - np.sqrt(k / (k + 1)) * prev
    return cur


def _gauss_hermite(n: int, kappa_l: float, points: int) -> float:
    u, w = np.polynomial.hermite.hermgauss(points)
    p = _hermite_polynomial_part(n, u)
    return float(np.sum(w * p * p * np.cos(kappa_l * u)))


def axis_fourier_transform(n: int, kappa: float, l: float, spec: QuadratureSpec = QuadratureSpec()):
    """``int |psi_n(x)|^2 exp(i kappa x) dx`` with an error estimate.

    Returns ``(value, error)`` where ``value`` is complex.
    """
    if n > MAX_QUANTUM_NUMBER:
        raise DomainError(f"oracle supports n <= {MAX_QUANTUM_NUMBER}")
    if spec.rule == "gauss-hermite":
        lo = _gauss_hermite(n, kappa * l, spec.points)
        hi = _gauss_hermite(n, kappa * l, 2 * spec.points)
        # odd integrand: the sine part vanishes identically under a symmetric rule
        val, err = complex(hi, 0.0), abs(hi - lo)
    else:
        L = (math.sqrt(2 * n + 1) + spec.cutoff_margin) * l

        def dens(x):
            return oscillator_eigenfunction(n, x, l) ** 2

        # pieces of one oscillator length keep QUADPACK's error estimates tight
        edges = np.linspace(-L, L, 2 * int(math.ceil(L / l)) + 1)
        kw = dict(epsabs=1e-3 * spec.tol, epsrel=1e-14, limit=200, full_output=1)
        val, var = 0j, 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            parts = [(1.0, integrate.quad(dens, a, b, weight="cos", wvar=kappa, **kw))]
            if kappa != 0:
                parts.append((1j, integrate.quad(dens, a, b, weight="sin", wvar=kappa, **kw)))
            for unit, res in parts:
                val += unit * res[0]
                var += res[1] ** 2
        # Gaussian tail beyond the cutoff bounds the truncation error
        err = math.sqrt(var) + 2.0 * float(dens(L)) * l
    if err > spec.tol:
        raise NumericalError(f"axis quadrature error estimate {err:.3g} exceeds tolerance {spec.tol:.3g}")
    return val, err


def quadrature_amplitude(ctx: ScatteringContext, geom: TrapGeometry, state: OscillatorState,
                         theta: float, phi: float, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """``-a_k`` times the numerically integrated form factor of ``state``.

    The momentum transferred along each axis is ``kappa_a = 2 q_a``; only the
    3-D state picks up the longitudinal component ``2 qbar_z``.
    """
    if max(state.quantum_numbers) > MAX_QUANTUM_NUMBER:
        raise DomainError(f"oracle supports quantum numbers <= {MAX_QUANTUM_NUMBER}")
    if ctx.k * float(geom.lengths.max()) > MAX_KL:
        raise DomainError(f"oracle supports k * l <= {MAX_KL}")
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    kappas = (2.0 * float(mt.qx), 2.0 * float(mt.qy), 2.0 * float(mt.qz_bar))
    out = complex(1.0)
    for n, kappa, l in zip(state.quantum_numbers, kappas, geom.lengths):
        val, _ = axis_fourier_transform(n, kappa, float(l), spec)
        out *= val
    return -ctx.a_k * out


def direct_thermal_sum(ctx: ScatteringContext, geom: TrapGeometry, spec: EnsembleSpec,
                       theta, phi, caps: Sequence[int] | int = 40, tail_rtol: float = 1e-12):
    """Literal sum of ``nbar_n exp(-Q) prod L_{n_a}(2 Q_a)`` over ``n_a < caps[a]``.

    Raises
    ------
    CutoffError
        If the block exceeds :data:`MAX_ORACLE_STATES` or the occupation on
        any face of the block is above ``tail_rtol * N``.
    """
    caps = np.broadcast_to(np.asarray(caps, dtype=int), (3,))
    if np.any(caps < 1):
        raise DomainError("caps must be positive")
    if int(np.prod(caps)) > MAX_ORACLE_STATES:
        raise CutoffError(f"oracle block {tuple(caps)} exceeds {MAX_ORACLE_STATES} states")
    w = geom.level_spacings
    axes = [np.arange(c) * wa for c, wa in zip(caps, w)]
    E = axes[0][:, None, None] + axes[1][None, :, None] + axes[2][None, None, :]
    if spec.statistics is Statistics.FERMI and spec.t == 0:
        occ_fn, _ = fermi_shell_filling(int(spec.N), geom)
        occ = occ_fn(E)
    else:
        occ = occupation(E, spec, geom)
    occ = np.asarray(occ, dtype=float)
    face = max(occ[-1].max(), occ[:, -1].max(), occ[:, :, -1].max())
    if face > tail_rtol * spec.N:
        raise CutoffError(f"occupation {face:.3g} on the edge of the block; raise the caps")
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    Lx = laguerre_table(int(caps[0]) - 1, 2.0 * mt.Qx)
    Ly = laguerre_table(int(caps[1]) - 1, 2.0 * mt.Qy)
    Lz = laguerre_table(int(caps[2]) - 1, 2.0 * mt.Qz)
    total = np.einsum("abc,a...,b...,c...->...", occ, Lx, Ly, Lz)
    return -ctx.a_k * np.exp(-mt.Q) * total
