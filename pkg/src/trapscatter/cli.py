"""Command-line front end.

Subcommands ``single``, ``thermal``, ``condensate``, ``xsection`` and
``validate`` each emit one table (CSV or JSON). Every parameter of the run,
including defaults, is echoed into the table metadata, so an output file is
enough to reconstruct the invocation. Exit codes: 0 success, 2 bad
arguments or inputs outside the physical domain, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import math
import operator
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .condensate import (
    array_profile_finite_T,
    bec_below_tc_profile,
    bec_ground_profile,
    condensation_temperature,
    lattice_profile,
    resolve_condensate,
    total_cross_section,
    variational_scale,
)
from .core import (
    DomainError,
    NumericalError,
    ScatteringContext,
    TrapGeometry,
    dimensionless_temperature,
    oscillator_length,
)
from .output import PROFILE_COLUMNS, SWEEP_COLUMNS, Table
from .single import OscillatorState, amplitude_3d
from .thermal import (
    Statistics,
    bose_condensation_temperature,
    resolve_ensemble,
    solve_fugacity,
    thermal_profile,
)
from .validation import run_suite

__all__ = ["main", "build_parser", "parse_expression", "parse_grid", "run"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def parse_expression(text: str) -> float:
    """Evaluate a small arithmetic expression in numbers and ``pi`` (``"pi/2"``, ``"3*pi/4"``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"bad expression {text!r}") from exc


def parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be lo:hi:count")
    try:
        lo, hi = parse_expression(parts[0]), parse_expression(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if count < 2:
        raise argparse.ArgumentTypeError("grid count must be >= 2")
    return lo, hi, count


def _expr(text: str) -> float:
    try:
        return parse_expression(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


# --- parser -------------------------------------------------------------------

def _common(k_as: float, theta_grid: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("physics")
    g.add_argument("--k-as", type=_expr, default=k_as, help="incident k times a_s")
    g.add_argument("--m-over-M", type=_expr, default=0.1, help="incident/scatterer mass ratio")
    g.add_argument("--l", type=_expr, default=None, help="isotropic oscillator length (a_s)")
    g.add_argument("--lx", type=_expr, default=None)
    g.add_argument("--ly", type=_expr, default=None)
    g.add_argument("--lz", type=_expr, default=None)
    g.add_argument("--omega", type=_expr, default=None, help="trap angular frequency (rad/s)")
    g.add_argument("--mass-kg", type=_expr, default=None, help="scatterer mass, sets l with --omega")
    g.add_argument("--a-s-m", type=_expr, default=None, help="scattering length in metres")
    o = p.add_argument_group("grid and output")
    o.add_argument("--theta-grid", type=parse_grid, default=parse_grid(theta_grid),
                   help="lo:hi:count in radians; 'pi' is accepted")
    o.add_argument("--phi", type=_expr, default=0.0, help="azimuth (rad)")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--out", default=None, help="output path (default stdout)")
    o.add_argument("--seed", type=int, default=0, help="seed for randomized runs")
    return p


def _temperature_flags(p: argparse.ArgumentParser, t_default: Optional[float]) -> None:
    p.add_argument("--N", type=_expr, default=None, help="number of scatterers")
    p.add_argument("--t", type=_expr, default=t_default, help="k_B T / hbar omega")
    p.add_argument("--T-kelvin", type=_expr, default=None, help="temperature; needs --omega")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trapscatter", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("single", parents=[_common(5.0, "0:pi:721")],
                       help="one scatterer in a trap eigenstate")
    p.add_argument("--dim", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--n", type=int, default=5, help="n_x")
    p.add_argument("--ny", type=int, default=0)
    p.add_argument("--nz", type=int, default=0)

    p = sub.add_parser("thermal", parents=[_common(2.0, "0:pi:361")],
                       help="ideal gas at temperature t, or a temperature sweep")
    _temperature_flags(p, 13.2)
    p.add_argument("--statistics", choices=[s.value for s in Statistics], default=None,
                   help="default: boltzmann for profiles, bose for sweeps")
    p.add_argument("--route", choices=("exact", "grand", "thermodynamic"), default="exact")
    p.add_argument("--method", choices=("auto", "fast", "direct"), default="auto")
    p.add_argument("--sweep", action="store_true", help="D(t) at theta in {0, pi/2, pi}")
    p.add_argument("--t-grid", type=parse_grid, default=parse_grid("0.5:40:80"))

    p = sub.add_parser("condensate", parents=[_common(2.0, "0:pi/2:721")],
                       help="condensate, double well or lattice",
                       description="Arrays lie along x; interference uses sin(theta), i.e. the "
                                   "scattering plane that contains the array axis. Thermal clouds "
                                   "add incoherently across wells.")
    p.add_argument("mode", choices=("bec", "double-well", "lattice"))
    p.add_argument("--N", type=_expr, default=1e4, help="atoms per condensate")
    p.add_argument("--a-tilde", type=_expr, default=0.0056, help="interaction length (units of lbar)")
    p.add_argument("--t-over-tc", type=_expr, default=0.1)
    p.add_argument("--corrections", type=_on_off, default=True, help="finite-size/interaction terms: on|off")
    p.add_argument("--width-scale", type=_expr, default=None, help="override the variational width factor")
    p.add_argument("--d", type=_expr, default=10.0, help="well spacing (a_s)")
    p.add_argument("--wells", type=int, default=10, help="number of wells for lattice mode")

    p = sub.add_parser("xsection", parents=[_common(1e-4, "0:pi:2")],
                       help="total cross-section of a condensate")
    p.add_argument("--N", type=_expr, default=1.0)
    p.add_argument("--a-tilde", type=_expr, default=0.0, help="interaction length (units of lbar)")
    p.add_argument("--rtol", type=_expr, default=1e-10)

    p = sub.add_parser("validate", parents=[_common(2.0, "0:pi:2")],
                       help="run the randomized oracle suite")
    p.add_argument("--cases", type=int, default=50)
    return parser


# --- resolution ----------------------------------------------------------------

def _geometry(args) -> TrapGeometry:
    if args.mass_kg is not None:
        if args.omega is None or args.a_s_m is None:
            raise DomainError("--mass-kg needs --omega and --a-s-m")
        return TrapGeometry.isotropic(oscillator_length(args.omega, args.mass_kg) / args.a_s_m)
    base = 1.0 if args.l is None else args.l
    return TrapGeometry(
        base if args.lx is None else args.lx,
        base if args.ly is None else args.ly,
        base if args.lz is None else args.lz,
    )


def _temperature(args) -> float:
    if args.T_kelvin is not None:
        if args.omega is None:
            raise DomainError("--T-kelvin needs --omega")
        return dimensionless_temperature(args.T_kelvin, args.omega)
    return args.t


def _theta(args) -> np.ndarray:
    lo, hi, count = args.theta_grid
    return np.linspace(lo, hi, count)


def _meta(args, **derived) -> dict:
    meta = {"program": "trapscatter", "version": __version__}
    for key, val in sorted(vars(args).items()):
        if key in ("out", "theta_grid", "t_grid"):
            continue
        meta[key] = val
    lo, hi, count = args.theta_grid
    meta.update(theta_lo=lo, theta_hi=hi, theta_count=count)
    meta.update(derived)
    return meta


def _profile(args, D, **derived) -> Table:
    theta = _theta(args)
    return Table.from_arrays(_meta(args, **derived), PROFILE_COLUMNS, theta, args.phi, D)


# --- subcommands --------------------------------------------------------------

def run_single(args) -> Table:
    ctx, geom = ScatteringContext(args.k_as, args.m_over_M), _geometry(args)
    ns = (args.n, args.ny, args.nz)[: args.dim]
    state = OscillatorState(*ns)
    D = np.abs(amplitude_3d(ctx, geom, state, _theta(args), args.phi)) ** 2
    return _profile(args, D, **geom.as_dict())


def run_thermal(args) -> Table:
    ctx, geom = ScatteringContext(args.k_as, args.m_over_M), _geometry(args)
    if args.sweep:
        stats = Statistics(args.statistics or "bose")
        N = 1e4 if args.N is None else args.N
        lo, hi, count = args.t_grid
        ts = np.linspace(lo, hi, count)
        if ts.min() <= 0:
            raise DomainError("sweep temperatures must be positive")
        t_c = condensation_temperature(N)
        theta = np.array([0.0, 0.5 * math.pi, math.pi])
        rows = []
        for t in ts:
            spec = resolve_ensemble(stats, N, float(t), geom, args.route)
            D = thermal_profile(ctx, geom, spec, theta, args.phi, args.method)
            rows.append((float(t), float(t) / t_c, *map(float, D)))
        meta = _meta(args, statistics_used=stats.value, N_used=N, t_c=t_c,
                     t_lo=lo, t_hi=hi, t_count=count, **geom.as_dict())
        if stats is Statistics.BOSE and args.route == "exact":
            meta["t_c_exact"] = bose_condensation_temperature(N, geom)
        return Table(meta, SWEEP_COLUMNS, rows)
    stats = Statistics(args.statistics or "boltzmann")
    N = 1.0 if args.N is None else args.N
    t = _temperature(args)
    sol = solve_fugacity(N, t, stats, geom, args.route) if t > 0 else None
    spec = resolve_ensemble(stats, N, t, geom, args.route)
    D = thermal_profile(ctx, geom, spec, _theta(args), args.phi, args.method)
    derived = dict(statistics_used=stats.value, N_used=N, t_used=t, **geom.as_dict())
    if sol is not None:
        derived.update(log_z=sol.log_z, n0=sol.n0)
    return _profile(args, D, **derived)


def run_condensate(args) -> Table:
    ctx, geom = ScatteringContext(args.k_as, args.m_over_M), _geometry(args)
    a_tilde = args.a_tilde * geom.l_bar
    wells = 2 if args.mode == "double-well" else (1 if args.mode == "bec" else args.wells)
    theta, N = _theta(args), args.N
    t_c = condensation_temperature(N)
    t = args.t_over_tc * t_c
    if t > 0:
        params = resolve_condensate(N, t, a_tilde, geom, args.corrections, "formula", args.width_scale)
        n0, u = params.n0, params.width_scale
        if args.mode == "bec":
            D = bec_below_tc_profile(ctx, geom, N, t, a_tilde, theta, args.phi,
                                     args.corrections, "formula", u)
        else:
            D = array_profile_finite_T(ctx, geom, N, t, a_tilde, args.d, wells, theta, args.phi,
                                       args.corrections, "formula", u)
    else:
        n0 = N
        u = variational_scale(N, args.a_tilde) if args.width_scale is None else args.width_scale
        if args.mode == "bec":
            D = bec_ground_profile(ctx, geom, N, theta, args.phi, u)
        else:
            D = lattice_profile(ctx, geom, N, args.d, wells, theta, args.phi, u)
    return _profile(args, D, wells_used=wells, t_c=t_c, t=t, n0=n0, width_scale_used=u,
                    wavelength=ctx.wavelength, **geom.as_dict())


def run_xsection(args) -> Table:
    ctx, geom = ScatteringContext(args.k_as, args.m_over_M), _geometry(args)
    u = variational_scale(args.N, args.a_tilde)

    def profile(th, ph):
        return bec_ground_profile(ctx, geom, args.N, th, ph, u)

    xs = total_cross_section(ctx, geom, args.N, profile, rtol=args.rtol)
    meta = _meta(args, width_scale_used=u, **geom.as_dict())
    return Table(meta, ("sigma", "error", "sigma_k0"), [(xs.sigma, xs.error, xs.sigma_k0)])


def run_validate(args) -> Table:
    results = run_suite(args.seed, n_amplitude=args.cases, n_thermal=args.cases,
                        n_literal=max(2, args.cases // 5))
    rows = [(r.name, r.cases, r.worst, r.tol, r.passed) for r in results]
    meta = _meta(args, all_passed=all(r.passed for r in results))
    return Table(meta, ("check", "cases", "worst", "tol", "passed"), rows)


_RUNNERS = {
    "single": run_single,
    "thermal": run_thermal,
    "condensate": run_condensate,
    "xsection": run_xsection,
    "validate": run_validate,
}


def run(argv: Optional[Sequence[str]] = None) -> Table:
    """Parse ``argv`` and return the result table without writing it."""
    args = build_parser().parse_args(argv)
    return _RUNNERS[args.command](args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        table = _RUNNERS[args.command](args)
    except DomainError as exc:
        print(f"trapscatter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"trapscatter: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = table.render(args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if args.command == "validate" and not table.meta["all_passed"]:
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
