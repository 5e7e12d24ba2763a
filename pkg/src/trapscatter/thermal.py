"""Thermal-equilibrium scattering by ideal Bose, Fermi and Boltzmann gases.

The ensemble amplitude is ``-a_k exp(-Q) sum_n nbar_n prod_a L_{n_a}(2 Q_a)``.
Two evaluation routes are provided:

* ``direct``: the level sum itself, truncated with an explicit tail bound.
  For commensurate trap frequencies the triple sum is regrouped by energy
  into discrete convolutions of the per-axis Laguerre sequences.
* ``fast``: expanding ``nbar`` in powers of the fugacity and summing each
  axis with the Laguerre generating function gives
  ``sum_j (+-1)^(j+1) z^j prod_a exp(-Q_a coth(j w_a / 2t)) / (1 - exp(-j w_a / t))``.

Energies are measured from the ground state in units of ``hbar * omega``
(geometric-mean frequency), so the fugacity ``z = exp((mu - E_000) / k_B T)``
lies in ``(0, 1]`` for bosons. Internally ``log_z`` is carried instead of
``z`` to keep ``1 - z`` accurate deep in the condensed phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .core import (
    DomainError,
    MomentumTransfer,
    NumericalError,
    ScatteringContext,
    TrapGeometry,
    momentum_transfer,
)
from .single import OscillatorState, amplitude_3d
from .specfun import ZETA3, Kind, laguerre_table, polylog

__all__ = [
    "Statistics",
    "EnsembleSpec",
    "FugacitySolution",
    "CondensateError",
    "CutoffError",
    "SeriesNotConverged",
    "occupation",
    "partition_function",
    "solve_fugacity",
    "resolve_ensemble",
    "total_number",
    "excited_number",
    "bose_condensation_temperature",
    "thermal_form_factor_fast",
    "thermal_form_factor_direct",
    "thermal_amplitude_fast",
    "thermal_amplitude_direct",
    "thermal_amplitude",
    "thermal_profile",
    "fermi_shell_filling",
    "fermi_ground_profile",
    "classical_limit_profile",
    "temperature_sweep",
]

TAIL_RTOL = 1e-12
MAX_LEVELS_PER_AXIS = 10_000
MAX_GRID_STATES = 20_000_000
MAX_SERIES_TERMS = 5_000_000
FERMI_FAST_MAX_RATIO = 0.995


class Statistics(str, Enum):
    BOSE = "bose"
    FERMI = "fermi"
    BOLTZMANN = "boltzmann"


class CondensateError(DomainError):
    """Bose ground state at ``z >= 1`` must be carried as an explicit condensate."""


class CutoffError(NumericalError):
    """The direct level sum would exceed its size caps."""


class SeriesNotConverged(NumericalError):
    """The fugacity series of the fast path does not converge for these inputs."""


@dataclass(frozen=True)
class EnsembleSpec:
    """Resolved thermal ensemble.

    Attributes
    ----------
    statistics : Statistics
    N : float
        Total particle number (for Boltzmann, the number of independent copies).
    t : float
        ``k_B T / (hbar omega)``.
    log_z : float or None
        Log of the fugacity referenced to the ground state. Unused for Boltzmann.
    n0 : float or None
        Explicit ground-state occupation. When set (bosons only) the ground
        state is not given a Bose occupation; this is how a condensate, or a
        neglected ground state above the transition (``n0 = 0``), is carried.
    """

    statistics: Statistics
    N: float
    t: float
    log_z: Optional[float] = None
    n0: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        if self.N <= 0:
            raise DomainError("particle number must be positive")
        if self.t < 0:
            raise DomainError("temperature must be non-negative")
        if self.statistics is Statistics.BOSE:
            if self.log_z is not None and self.log_z > 0:
                raise DomainError("Bose fugacity cannot exceed 1")
            if self.n0 is None and self.t > 0 and self.log_z is None:
                raise DomainError("Bose ensemble needs log_z or n0")
        if self.n0 is not None and self.statistics is not Statistics.BOSE:
            raise DomainError("explicit ground-state occupation is for bosons only")
        if self.statistics is Statistics.FERMI and self.t > 0 and self.log_z is None:
            raise DomainError("Fermi ensemble needs log_z")

    @property
    def z(self) -> Optional[float]:
        return None if self.log_z is None else math.exp(self.log_z)

    @property
    def sign(self) -> int:
        return -1 if self.statistics is Statistics.FERMI else 1

    def as_dict(self) -> dict:
        return {
            "statistics": self.statistics.value,
            "N": self.N,
            "t": self.t,
            "log_z": self.log_z,
            "n0": self.n0,
        }


@dataclass(frozen=True)
class FugacitySolution:
    statistics: Statistics
    N: float
    t: float
    route: str
    log_z: Optional[float] = None
    n0: Optional[float] = None
    partition_function: Optional[float] = None

    @property
    def z(self) -> Optional[float]:
        return None if self.log_z is None else math.exp(self.log_z)

    @property
    def condensed(self) -> bool:
        return bool(self.n0)

    def ensemble(self) -> EnsembleSpec:
        return EnsembleSpec(self.statistics, self.N, self.t, self.log_z, self.n0)


# --- occupations -----------------------------------------------------------

def partition_function(t: float, geom: TrapGeometry) -> float:
    """Single-particle partition function with energies measured from the ground state."""
    if t == 0:
        return 1.0
    w = geom.level_spacings
    return float(np.prod(-1.0 / np.expm1(-w / t)))


def occupation(E_rel, spec: EnsembleSpec, geom: Optional[TrapGeometry] = None):
    """Mean occupation of a single-particle level ``E_rel`` above the ground state."""
    E = np.asarray(E_rel, dtype=float)
    if np.any(E < 0):
        raise DomainError("energies are measured from the ground state")
    t = spec.t
    ground = E == 0
    stats = spec.statistics
    if stats is Statistics.BOLTZMANN:
        if geom is None:
            raise DomainError("Boltzmann occupations need the trap geometry")
        if t == 0:
            out = np.where(ground, spec.N, 0.0)
        else:
            out = spec.N * np.exp(-E / t) / partition_function(t, geom)
    elif stats is Statistics.FERMI:
        if t == 0:
            raise DomainError("use fermi_shell_filling for the t = 0 Fermi gas")
        out = expit(spec.log_z - E / t)
    else:
        if np.any(ground) and spec.n0 is None and (spec.log_z is None or spec.log_z >= 0):
            raise CondensateError("condensate must be handled explicitly (z >= 1 at E = 0)")
        with np.errstate(divide="ignore"):
            if t == 0:
                out = np.zeros_like(E)
            else:
                lz = 0.0 if spec.log_z is None else spec.log_z
                safe = np.where(ground, 1.0, E)
                out = 1.0 / np.expm1(safe / t - lz)
                if spec.n0 is None and np.any(ground):
                    out = np.where(ground, 1.0 / np.expm1(-lz), out)
        if spec.n0 is not None:
            out = np.where(ground, spec.n0, out)
    return out if out.ndim else float(out)


# --- fast path ------------------------------------------------------------

def _series_length(spec: EnsembleSpec, w: np.ndarray, Qmax: float) -> int:
    t = spec.t
    wmin = float(w.min())
    lz = spec.log_z if spec.log_z is not None else 0.0
    log_ratio = lz - wmin / t
    if log_ratio >= 0:
        raise SeriesNotConverged("fugacity series diverges (z exp(-w/t) >= 1)")
    if spec.statistics is Statistics.FERMI and log_ratio > math.log(FERMI_FAST_MAX_RATIO):
        raise SeriesNotConverged("alternating fugacity series converges too slowly")
    onset = t / wmin * math.log1p(2.0 * Qmax)
    J = int(math.ceil(onset + 42.0 / -log_ratio)) + 8
    if J > MAX_SERIES_TERMS:
        raise SeriesNotConverged(f"fugacity series needs {J} terms")
    return J


def _log_abs_expm1_scaled(j: np.ndarray, w: np.ndarray, t: float, Qs):
    """Sign and ``log|expm1(E_j)|`` for the excited-state bracket.

    ``E_j = sum_a e^{-x_a} c_a`` with ``x_a = j w_a / t`` and
    ``c_a = -2 Q_a / (1 - e^{-x_a}) - log1p(-e^{-x_a}) / e^{-x_a}``.
    Factoring out ``e^{-x_min}`` keeps ``log|E|`` finite long after
    ``e^{-x}`` itself underflows, which matters when ``z > 1`` (fermions).
    """
    xs = [j * (wa / t) for wa in w]
    xmin = np.minimum(np.minimum(xs[0], xs[1]), xs[2])
    S = 0.0
    for x, Qa in zip(xs, Qs):
        y = np.exp(-x)
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = np.where(y > 1e-8, -np.log1p(-y) / np.where(y > 0, y, 1.0), 1.0 + 0.5 * y)
        c = -2.0 * Qa[None, :] / -np.expm1(-x) + phi
        S = S + np.exp(-(x - xmin)) * c
    with np.errstate(divide="ignore", under="ignore"):
        log_abs_E = np.log(np.abs(S)) - xmin
        E = np.sign(S) * np.exp(log_abs_E)
        small = np.abs(E) < 0.5
        ratio = np.where(E != 0, np.expm1(E) / np.where(E != 0, E, 1.0), 1.0)
        log_abs = np.where(small, log_abs_E + np.log(np.where(small, ratio, 1.0)),
                           np.log(np.abs(np.expm1(np.where(small, 1.0, E)))))
    return np.sign(S), log_abs


def _excited_series(spec: EnsembleSpec, w: np.ndarray, Qs, chunk_elems: int = 4_000_000):
    """``sum_j s_j z^j [prod_a exp(-Q_a coth(.))/(1-e^{-j w_a/t}) - exp(-Q)]`` / exp(-Q).

    The bracket equals ``exp(-Q) * expm1(E_j)`` with
    ``E_j = sum_a [-2 Q_a / expm1(j w_a / t) - log1p(-exp(-j w_a / t))]``,
    which stays accurate when the excited-state contribution is small. Each
    term is assembled in log form so ``z^j`` never overflows on its own.
    """
    Qs = [np.asarray(Q, dtype=float) for Q in Qs]
    shape = np.broadcast_shapes(*(Q.shape for Q in Qs))
    Qs = [np.broadcast_to(Q, shape).ravel() for Q in Qs]
    Qmax = float(max(Q.max(initial=0.0) for Q in Qs))
    J = _series_length(spec, w, Qmax)
    t = spec.t
    lz = spec.log_z if spec.log_z is not None else 0.0
    P = max(1, Qs[0].size)
    step = max(1, chunk_elems // P)
    total = np.zeros(Qs[0].size)
    # accumulate from the smallest terms upward
    starts = list(range(1, J + 1, step))
    for start in reversed(starts):
        j = np.arange(start, min(start + step, J + 1), dtype=float)[:, None]
        sign, log_abs = _log_abs_expm1_scaled(j, w, t, Qs)
        if spec.statistics is Statistics.FERMI:
            sign = sign * np.where(j % 2 == 1, 1.0, -1.0)
        with np.errstate(under="ignore"):
            terms = sign * np.exp(j * lz + log_abs)
        total += np.sum(terms[::-1], axis=0)
    return total.reshape(shape)


def _ground_occupation(spec: EnsembleSpec) -> float:
    if spec.n0 is not None:
        return spec.n0
    if spec.statistics is Statistics.FERMI:
        return float(expit(spec.log_z))
    if spec.log_z >= 0:
        raise CondensateError("condensate must be handled explicitly (z >= 1 at E = 0)")
    return float(1.0 / np.expm1(-spec.log_z))


def thermal_form_factor_fast(spec: EnsembleSpec, geom: TrapGeometry, mt: MomentumTransfer):
    """``exp(-Q) sum_n nbar_n prod L`` by the closed-form fugacity series."""
    w = geom.level_spacings
    Qs = (mt.Qx, mt.Qy, mt.Qz)
    Q = mt.Q
    t = spec.t
    if spec.statistics is Statistics.BOLTZMANN:
        if t == 0:
            return spec.N * np.exp(-Q)
        expo = sum(Qa * (1.0 + 2.0 / np.expm1(wa / t)) for wa, Qa in zip(w, Qs))
        return spec.N * np.exp(-expo)
    if t == 0:
        if spec.statistics is Statistics.FERMI:
            raise DomainError("use fermi_ground_profile for the t = 0 Fermi gas")
        return (spec.n0 if spec.n0 is not None else spec.N) * np.exp(-Q)
    excited = _excited_series(spec, w, Qs)
    return np.exp(-Q) * (_ground_occupation(spec) + excited)


def thermal_amplitude_fast(ctx: ScatteringContext, geom: TrapGeometry, spec: EnsembleSpec, theta, phi):
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    return -ctx.a_k * thermal_form_factor_fast(spec, geom, mt)


# --- direct level sums -------------------------------------------------------

def _commensurate_steps(w: np.ndarray, max_den: int = 16, tol: float = 1e-10):
    """Integer steps ``s_a`` and unit ``u`` with ``w_a = s_a u``, or ``None``."""
    base = float(w.min())
    fracs = []
    for r in w / base:
        f = Fraction(float(r)).limit_denominator(max_den)
        if abs(float(f) - r) > tol * r:
            return None
        fracs.append(f)
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    steps = np.array([int(f * den) for f in fracs])
    if steps.max() > 64:
        return None
    return steps, base / den


def _energy_cutoff(spec: EnsembleSpec, w: np.ndarray) -> float:
    """Energy above which the occupation-weighted tail is below ``TAIL_RTOL * N``."""
    t = spec.t
    if t == 0:
        return 0.0
    wmin = float(w.min())
    mu = max(0.0, t * spec.log_z) if spec.statistics is Statistics.FERMI else 0.0
    margin = 40.0
    for _ in range(8):
        Ec = mu + margin * t
        # over-count of states: isotropic spectrum with the smallest spacing
        m = np.arange(math.floor(Ec / wmin) + 1, math.floor((Ec + 80.0 * t) / wmin) + 2)
        g = (m + 1.0) * (m + 2.0) / 2.0
        tail = float(np.sum(g * _occ_nocheck(spec, m * wmin, w)))
        if tail < TAIL_RTOL * spec.N:
            return Ec
        margin *= 1.5
    raise CutoffError("could not bound the tail of the level sum")


def _occ_nocheck(spec: EnsembleSpec, E, w):
    E = np.asarray(E, dtype=float)
    t = spec.t
    if spec.statistics is Statistics.FERMI:
        return expit(spec.log_z - E / t)
    if spec.statistics is Statistics.BOLTZMANN:
        return spec.N * np.exp(-E / t) * np.prod(-np.expm1(-w / t))
    lz = spec.log_z if spec.log_z is not None else 0.0
    return 1.0 / np.expm1(E / t - lz)


def _level_occupations(spec: EnsembleSpec, E: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Occupations on an energy array whose ground entries are exactly 0."""
    ground = E == 0
    out = np.zeros_like(E)
    exc = ~ground
    if spec.t > 0:
        out[exc] = _occ_nocheck(spec, E[exc], w)
    if spec.statistics is Statistics.BOLTZMANN:
        out[ground] = spec.N * (np.prod(-np.expm1(-w / spec.t)) if spec.t > 0 else 1.0)
    elif spec.statistics is Statistics.FERMI:
        out[ground] = expit(spec.log_z)
    else:
        out[ground] = _ground_occupation(spec) if spec.t > 0 else (
            spec.n0 if spec.n0 is not None else spec.N)
    return out


def _per_axis_tables(nmax, Qs):
    """``exp(-Q_a) L_n(2 Q_a)`` for ``n <= nmax_a``, shape ``(nmax_a + 1, P)``."""
    return [laguerre_table(int(n), 2.0 * Qa) * np.exp(-Qa)[None, :] for n, Qa in zip(nmax, Qs)]


def _stretch(table: np.ndarray, step: int, M: int) -> np.ndarray:
    out = np.zeros((M + 1,) + table.shape[1:])
    n = min(table.shape[0], M // step + 1)
    out[: (n - 1) * step + 1 : step] = table[:n]
    return out


def _shell_sum(occ: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``sum_m occ[m] sum_{i+j+k=m} a[i] b[j] c[k]`` over the leading axis."""
    M = occ.shape[0] - 1
    ab = np.zeros_like(a)
    for i in np.nonzero(np.any(a != 0, axis=1))[0]:
        ab[i:] += a[i] * b[: M + 1 - i]
    d = np.zeros_like(c)
    for k in np.nonzero(np.any(c != 0, axis=1))[0]:
        d[: M + 1 - k] += c[k][None, :] * occ[k:, None]
    return np.sum(ab * d, axis=0)


def _commensurate_degeneracy(steps, M: int) -> np.ndarray:
    """Number of states on each level of the commensurate energy grid."""
    g = np.ones(1)
    for s in steps:
        axis = np.zeros(M + 1)
        axis[::s] = 1.0
        g = np.convolve(g, axis)[: M + 1]
    return np.rint(g)


def _grid_energies(nmax, w):
    nx, ny, nz = (np.arange(int(n) + 1) for n in nmax)
    return nx[:, None, None] * w[0] + ny[None, :, None] * w[1] + nz[None, None, :] * w[2]


def _direct_sum(occ_fn, Ecut: float, w: np.ndarray, Qs, shape):
    """``sum_n occ(E_n) exp(-Q) prod L`` over all states with ``E_n <= Ecut``."""
    Qs = [np.broadcast_to(np.asarray(Q, dtype=float), shape).ravel() for Q in Qs]
    nmax = np.floor(Ecut / w + 1e-9).astype(int)
    if np.any(nmax > MAX_LEVELS_PER_AXIS):
        raise CutoffError(
            f"direct sum needs {int(nmax.max())} levels per axis (cap {MAX_LEVELS_PER_AXIS}); "
            "use the fast path")
    comm = _commensurate_steps(w)
    if comm is not None:
        steps, unit = comm
        M = int(math.floor(Ecut / unit + 1e-9))
        E = np.arange(M + 1) * unit
        occ = occ_fn(E)
        tables = _per_axis_tables(M // steps, Qs)
        a, b, c = (_stretch(tab, s, M) for tab, s in zip(tables, steps))
        return _shell_sum(occ, a, b, c).reshape(shape)
    if np.prod(nmax + 1.0) > MAX_GRID_STATES:
        raise CutoffError("incommensurate direct sum exceeds the state cap; use the fast path")
    tx, ty, tz = _per_axis_tables(nmax, Qs)
    total = np.zeros(Qs[0].size)
    nx = np.arange(nmax[0] + 1)
    ny = np.arange(nmax[1] + 1)
    for iz in range(nmax[2] + 1):
        E = nx[:, None] * w[0] + ny[None, :] * w[1] + iz * w[2]
        occ = np.where(E <= Ecut + 1e-12, occ_fn(E.ravel()).reshape(E.shape), 0.0)
        total += np.einsum("ij,ip,jp->p", occ, tx, ty) * tz[iz]
    return total.reshape(shape)


def thermal_form_factor_direct(spec: EnsembleSpec, geom: TrapGeometry, mt: MomentumTransfer):
    """``exp(-Q) sum_n nbar_n prod L`` by the truncated level sum."""
    w = geom.level_spacings
    if spec.statistics is Statistics.FERMI and spec.t == 0:
        raise DomainError("use fermi_ground_profile for the t = 0 Fermi gas")
    Ecut = _energy_cutoff(spec, w)
    shape = np.broadcast_shapes(*(np.shape(Q) for Q in (mt.Qx, mt.Qy, mt.Qz)))
    return _direct_sum(lambda E: _level_occupations(spec, E, w), Ecut, w,
                       (mt.Qx, mt.Qy, mt.Qz), shape)


def thermal_amplitude_direct(ctx: ScatteringContext, geom: TrapGeometry, spec: EnsembleSpec, theta, phi):
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    return -ctx.a_k * thermal_form_factor_direct(spec, geom, mt)


def thermal_amplitude(ctx, geom, spec, theta, phi, method: str = "auto"):
    """Ensemble amplitude; ``auto`` uses the fast series and falls back to the level sum."""
    if method == "fast":
        return thermal_amplitude_fast(ctx, geom, spec, theta, phi)
    if method == "direct":
        return thermal_amplitude_direct(ctx, geom, spec, theta, phi)
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")
    try:
        return thermal_amplitude_fast(ctx, geom, spec, theta, phi)
    except SeriesNotConverged:
        return thermal_amplitude_direct(ctx, geom, spec, theta, phi)


def thermal_profile(ctx, geom, spec, theta, phi, method: str = "auto"):
    return np.abs(thermal_amplitude(ctx, geom, spec, theta, phi, method)) ** 2


# --- number equation -------------------------------------------------------

def _zero_mt():
    z = np.zeros(1)
    return MomentumTransfer.from_components(z, z, z)


def excited_number(spec: EnsembleSpec, geom: TrapGeometry) -> float:
    """``sum_{n != 0} nbar_n``."""
    w = geom.level_spacings
    try:
        return float(_excited_series(spec, w, (0.0, 0.0, 0.0)))
    except SeriesNotConverged:
        Ecut = _energy_cutoff(spec, w)

        def occ(E):
            out = _level_occupations(spec, E, w)
            return np.where(E == 0, 0.0, out)

        return float(_direct_sum(occ, Ecut, w, (np.zeros(1),) * 3, (1,))[0])


def total_number(spec: EnsembleSpec, geom: TrapGeometry) -> float:
    """``sum_n nbar_n`` including the ground state."""
    if spec.statistics is Statistics.BOLTZMANN:
        return spec.N
    return _ground_occupation(spec) + excited_number(spec, geom)


def _bracket_root(f, lo: float, hi: float, expand_lo: bool, expand_hi: bool):
    flo, fhi = f(lo), f(hi)
    for _ in range(200):
        if flo <= 0 <= fhi:
            return lo, hi
        if flo > 0 and expand_lo:
            lo, hi, fhi = lo - 2.0 * (hi - lo), lo, flo
            flo = f(lo)
        elif fhi < 0 and expand_hi:
            lo, hi, flo = hi, hi + 2.0 * (hi - lo), fhi
            fhi = f(hi)
        else:
            break
    raise NumericalError(f"could not bracket the number equation (f({lo})={flo}, f({hi})={fhi})")


def _solve(f, lo, hi, expand_lo, expand_hi):
    lo, hi = _bracket_root(f, lo, hi, expand_lo, expand_hi)
    root, res = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                       maxiter=500, full_output=True)
    if not res.converged:
        raise NumericalError(f"number equation did not converge: {res.flag}")
    return root


def solve_fugacity(N: float, t: float, statistics, geom: TrapGeometry,
                   route: str = "exact") -> FugacitySolution:
    """Fix the fugacity from the particle number.

    Routes
    ------
    exact
        Exact trap spectrum. For bosons the ground state is treated as a
        separate condensate: if the excited states saturate below ``N`` at
        ``z = 1`` the remainder ``N0`` sits in the ground state, otherwise
        ``z < 1`` solves ``sum_{n != 0} nbar_n = N`` and ``N0 = 0``. This gives a
        sharp transition at the finite-size ``t_c``.
    grand
        Exact spectrum with the ground state given its grand-canonical Bose
        occupation ``z / (1 - z)``; smooth, no transition.
    thermodynamic
        ``N = t^3 Li_3(z)`` (or the Fermi integral), for cross-checks.

    For Boltzmann statistics the partition function is returned instead.
    """
    statistics = Statistics(statistics)
    if N <= 0:
        raise DomainError("particle number must be positive")
    if t < 0:
        raise DomainError("temperature must be non-negative")
    if statistics is Statistics.BOLTZMANN:
        return FugacitySolution(statistics, N, t, route, partition_function=partition_function(t, geom))
    if t == 0:
        if statistics is Statistics.BOSE:
            return FugacitySolution(statistics, N, t, route, log_z=0.0, n0=float(N))
        raise DomainError("t = 0 Fermi gas is described by fermi_shell_filling")

    if route == "thermodynamic":
        kind = Kind.BOSE if statistics is Statistics.BOSE else Kind.FERMI
        if kind is Kind.BOSE and N >= t**3 * ZETA3:
            return FugacitySolution(statistics, N, t, route, log_z=0.0, n0=N - t**3 * ZETA3)

        def f_td(lz):
            return t**3 * polylog(3, math.exp(lz), kind) - N

        hi = 0.0 if kind is Kind.BOSE else max(1.0, (6.0 * N) ** (1 / 3) / t)
        lz = _solve(f_td, -40.0, hi, False, kind is Kind.FERMI)
        return FugacitySolution(statistics, N, t, route, log_z=lz, n0=0.0 if kind is Kind.BOSE else None)

    if statistics is Statistics.BOSE:
        if route == "exact":
            n_sat = excited_number(EnsembleSpec(statistics, N, t, 0.0, 0.0), geom)
            if n_sat <= N:
                return FugacitySolution(statistics, N, t, route, log_z=0.0, n0=N - n_sat)

            def f_exc(lz):
                return excited_number(EnsembleSpec(statistics, N, t, lz, 0.0), geom) - N

            lz = _solve(f_exc, -1.0, 0.0, True, False)
            return FugacitySolution(statistics, N, t, route, log_z=lz, n0=0.0)
        if route == "grand":
            def f_all(lz):
                return total_number(EnsembleSpec(statistics, N, t, lz), geom) - N

            # ground state alone holds N at log_z = -log1p(1/N)
            lz = _solve(f_all, -2.0, -math.log1p(1.0 / N) * 0.999999, True, False)
            return FugacitySolution(statistics, N, t, route, log_z=lz)
        raise DomainError(f"unknown route {route!r}")

    if route not in ("exact", "grand"):
        raise DomainError(f"unknown route {route!r}")

    def f_fermi(lz):
        return total_number(EnsembleSpec(statistics, N, t, lz), geom) - N

    # start from the thermodynamic-limit root; a tight bracket keeps the
    # evaluations inside the convergent region of the fugacity series when possible
    lz0 = solve_fugacity(N, t, statistics, geom, "thermodynamic").log_z
    lz = _solve(f_fermi, lz0 - 0.25, lz0 + 0.25, True, True)
    return FugacitySolution(statistics, N, t, route, log_z=lz)


def resolve_ensemble(statistics, N: float, t: float, geom: TrapGeometry, route: str = "exact") -> EnsembleSpec:
    return solve_fugacity(N, t, statistics, geom, route).ensemble()


def bose_condensation_temperature(N: float, geom: TrapGeometry, exact: bool = True) -> float:
    """Transition temperature ``t_c``.

    ``exact=False`` gives the thermodynamic-limit ``(N / zeta(3))^(1/3)``;
    ``exact=True`` the temperature where the excited states of the actual
    spectrum hold exactly ``N`` particles at ``z = 1``.
    """
    t_td = (N / ZETA3) ** (1.0 / 3.0)
    if not exact:
        return t_td

    def f(t):
        return excited_number(EnsembleSpec(Statistics.BOSE, N, t, 0.0, 0.0), geom) - N

    return float(brentq(f, 0.3 * t_td, 3.0 * t_td, xtol=1e-13, rtol=1e-14))


# --- degenerate Fermi gas and classical limit ---------------------------------

def fermi_shell_filling(N: int, geom: TrapGeometry):
    """Occupations of the lowest ``N`` single-particle states.

    A partially filled degenerate level is occupied uniformly. Returns
    ``(occ_fn, Ecut)`` where ``occ_fn`` maps level energies to occupations.
    """
    if N <= 0 or int(N) != N:
        raise DomainError("Fermi filling needs a positive integer N")
    w = geom.level_spacings
    comm = _commensurate_steps(w)
    if comm is not None:
        steps, unit = comm
        M = max(4, int(math.ceil((6.0 * N) ** (1 / 3) * w.max() / unit)) + 4)
        while True:
            g = _commensurate_degeneracy(steps, M)
            cum = np.cumsum(g)
            if cum[-1] >= N:
                break
            M *= 2
        top = int(np.searchsorted(cum, N))
        below = cum[top - 1] if top > 0 else 0.0
        frac = (N - below) / g[top]
        Etop = top * unit

        def occ_fn(E):
            E = np.asarray(E, dtype=float)
            out = np.where(E < Etop - 0.5 * unit, 1.0, 0.0)
            return np.where(np.abs(E - Etop) < 0.5 * unit, frac, out)

        return occ_fn, Etop
    # incommensurate: sort enumerated states by energy
    nmax = np.full(3, int(math.ceil((6.0 * N) ** (1 / 3) * w.max() / w.min())) + 2)
    E = np.sort(_grid_energies(nmax, w).ravel())
    Ef = E[N - 1]
    tol = 1e-9 * max(1.0, Ef)
    below = int(np.count_nonzero(E < Ef - tol))
    deg = int(np.count_nonzero(np.abs(E - Ef) <= tol))
    frac = (N - below) / deg

    def occ_fn(E):
        E = np.asarray(E, dtype=float)
        out = np.where(E < Ef - tol, 1.0, 0.0)
        return np.where(np.abs(E - Ef) <= tol, frac, out)

    return occ_fn, Ef + tol


def fermi_ground_profile(ctx: ScatteringContext, geom: TrapGeometry, N: int, theta, phi,
                         mode: str = "exact"):
    """Differential cross-section of a ``T = 0`` Fermi gas of ``N`` atoms."""
    if N <= 0:
        raise DomainError("N must be positive")
    mt = momentum_transfer(ctx.k, theta, phi, geom)
    if mode == "approx":
        if not geom.is_isotropic:
            raise DomainError("the large-N approximation is for isotropic traps")
        return abs(N * ctx.a_k) ** 2 * np.exp(-6.0 * mt.Q * N ** (1.0 / 3.0))
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    occ_fn, Ecut = fermi_shell_filling(N, geom)
    shape = np.shape(mt.Q)
    ff = _direct_sum(occ_fn, Ecut, geom.level_spacings, (mt.Qx, mt.Qy, mt.Qz), shape)
    return np.abs(ctx.a_k * ff) ** 2


def classical_limit_profile(ctx: ScatteringContext, geom: TrapGeometry, n: int, theta, phi):
    """``D`` of one scatterer in the highly excited state ``(n, n, n)``."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return np.abs(amplitude_3d(ctx, geom, OscillatorState(n, n, n), theta, phi)) ** 2


def temperature_sweep(ctx: ScatteringContext, geom: TrapGeometry, N: float, ts, theta, phi=0.0,
                      statistics=Statistics.BOSE, route: str = "exact"):
    """``D(t, theta)`` for a list of temperatures; one fugacity solve per temperature."""
    ts = np.asarray(ts, dtype=float)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.empty((ts.size, theta.size))
    for i, t in enumerate(ts):
        spec = resolve_ensemble(statistics, N, t, geom, route)
        out[i] = thermal_profile(ctx, geom, spec, theta, phi)
    return out
