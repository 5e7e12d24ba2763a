"""Special functions: Laguerre and Hermite polynomials, oscillator
eigenfunctions and the Bose-Einstein / Fermi-Dirac polylogarithms."""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from scipy import integrate
from scipy.special import expit, expn, gamma

from .core import DomainError, NumericalError

__all__ = [
    "ZETA2",
    "ZETA3",
    "Kind",
    "laguerre",
    "laguerre_table",
    "hermite",
    "oscillator_eigenfunction",
    "polylog",
    "laguerre_sum_geometric",
]

ZETA2 = math.pi**2 / 6.0
ZETA3 = 1.2020569031595943

_POLYLOG_MAX_TERMS = 10_000_000
_POLYLOG_CHUNK = 65_536


class Kind(str, Enum):
    BOSE = "bose"
    FERMI = "fermi"


def laguerre(n: int, x):
    """Laguerre polynomial ``L_n(x)`` by upward three-term recurrence.

    ``(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`` seeded with ``L_0 = 1`` and
    ``L_1 = 1 - x``. Works elementwise on arrays.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a non-negative integer, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, int(n)):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_table(nmax: int, x) -> np.ndarray:
    """All ``L_0(x) .. L_nmax(x)`` stacked along a new leading axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 - x
    for k in range(1, nmax):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def hermite(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)``.

    Raises
    ------
    OverflowError
        If the value leaves the double-precision range. Use
        :func:`oscillator_eigenfunction` for large degrees.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a non-negative integer, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    cur = 2.0 * x
    if n == 0:
        cur = prev
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, int(n)):
            prev, cur = cur, 2.0 * x * cur - 2.0 * k * prev
    if not np.all(np.isfinite(cur)):
        raise OverflowError(f"H_{n}(x) exceeds the floating-point range")
    return cur if cur.ndim else float(cur)


def oscillator_eigenfunction(n: int, x0, l: float = 1.0):
    """Normalized harmonic-oscillator eigenfunction ``psi_n(x0)``.

    Uses the recurrence on normalized Hermite functions,
    ``h_{k+1} = u sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}``, with
    ``u = x0 / l``, so no factorial or raw ``H_n`` ever appears.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a non-negative integer, got {n}")
    u = np.asarray(x0, dtype=float) / l
    prev = np.pi**-0.25 * np.exp(-0.5 * u * u)
    if n == 0:
        out = prev
    else:
        cur = np.sqrt(2.0) * u * prev
        for k in range(1, int(n)):
            prev, cur = cur, np.sqrt(2.0 / (k + 1)) * u * cur - np.sqrt(k / (k + 1)) * prev
        out = cur
    out = out / np.sqrt(l)
    return out if out.ndim else float(out)


def _bose_series(j: int, z: float) -> float:
    """``sum_p z^p / p^j`` for ``0 < z <= 1``.

    Summation stops once the increment drops below ``1e-16`` of the partial
    sum (or after ``1e7`` terms); the remaining tail is added through the
    Euler-Maclaurin formula, which matters for the power-law tail near z=1.
    """
    logz = math.log(z)
    total = 0.0
    start = 1
    while True:
        stop = min(start + _POLYLOG_CHUNK, _POLYLOG_MAX_TERMS + 1)
        p = np.arange(start, stop, dtype=float)
        terms = np.exp(p * logz - j * np.log(p))
        # reversed summation keeps the small terms from being swamped
        total += float(np.sum(terms[::-1]))
        if terms[-1] < 1e-16 * total or stop > _POLYLOG_MAX_TERMS:
            break
        start = stop
    P = stop - 1.0
    a = -logz
    fP = math.exp(-a * P) * P**-j
    dfP = fP * (-j / P - a)
    # int_P^inf x^-j e^{-a x} dx = P^(1-j) E_j(a P)
    integral = P ** (1 - j) * (expn(j, a * P) if a > 0 else 1.0 / (j - 1))
    return total + integral - 0.5 * fP - dfP / 12.0


def polylog(j: int, z: float, kind: Kind | str = Kind.BOSE) -> float:
    """Bose-Einstein integral ``Li_j(z)`` or Fermi integral ``-Li_j(-z)``.

    Parameters
    ----------
    j : int
        Order, ``j >= 2``.
    z : float
        Fugacity. ``[0, 1]`` for the Bose kind, ``>= 0`` for the Fermi kind.
    kind : {"bose", "fermi"}

    Notes
    -----
    The Fermi kind uses the duplication identity
    ``-Li_j(-z) = Li_j(z) - 2^(1-j) Li_j(z^2)`` for ``z <= 1`` (the alternating
    series summed in pairs) and the Fermi-Dirac integral by quadrature above.
    """
    kind = Kind(kind)
    if int(j) != j or j < 2:
        raise DomainError(f"order must be an integer >= 2, got {j}")
    j = int(j)
    if not np.isfinite(z) or z < 0:
        raise DomainError(f"z must be finite and >= 0, got {z}")
    if kind is Kind.BOSE:
        if z > 1:
            raise DomainError("Bose-Einstein integral has no real value for z > 1")
        if z == 0:
            return 0.0
        if z == 1:
            if j == 2:
                return ZETA2
            if j == 3:
                return ZETA3
        return _bose_series(j, z)
    if z == 0:
        return 0.0
    if z <= 1:
        return polylog(j, z) - 2.0 ** (1 - j) * polylog(j, z * z)
    mu = math.log(z)

    def integrand(x):
        return x ** (j - 1) * expit(mu - x)

    val, err = integrate.quad(
        integrand, 0.0, mu + 40.0, points=[mu], epsabs=0.0, epsrel=1e-13, limit=200
    )
    if err > 1e-9 * abs(val):
        raise NumericalError(f"Fermi integral quadrature error {err:.3g} too large")
    return val / gamma(j)


def laguerre_sum_geometric(s: float, x):
    """Generating function ``sum_n s^n L_n(x) = exp(-x s/(1-s)) / (1-s)``."""
    if s >= 1:
        raise DomainError("generating function diverges at s >= 1")
    if s < 0:
        raise DomainError("s must lie in [0, 1)")
    x = np.asarray(x, dtype=float)
    out = np.exp(-x * s / (1.0 - s)) / (1.0 - s)
    return out if out.ndim else float(out)
