"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records a verdict through the ``criterion`` fixture; the terminal
summary prints one PASS/FAIL line per criterion.
"""

import json
import math
import subprocess
import sys
import warnings

import numpy as np
import pytest
from scipy import optimize
from scipy.special import roots_laguerre

from trapscatter.condensate import (
    array_profile_finite_T,
    bec_below_tc_profile,
    bec_ground_profile,
    double_well_profile,
    lattice_profile,
    total_cross_section,
    variational_scale,
)
from trapscatter.core import ScatteringContext, TrapGeometry, half_width, momentum_transfer
from trapscatter.output import parse_csv, validate_table
from trapscatter.single import (
    OscillatorState,
    amplitude_1d,
    amplitude_2d,
    amplitude_3d,
    count_sign_changes,
    laguerre_factor_1d,
)
from trapscatter.thermal import (
    bose_condensation_temperature,
    fermi_ground_profile,
    fermi_shell_filling,
    resolve_ensemble,
    temperature_sweep,
    thermal_amplitude_direct,
    thermal_amplitude_fast,
    thermal_profile,
)
from trapscatter.validation import quadrature_amplitude, random_amplitude_case, random_thermal_case

pytestmark = pytest.mark.acceptance

N_BEC = 10_000
CTX2 = ScatteringContext(2.0, 0.1)
UNIT = TrapGeometry()


def _forward(N, ctx):
    return abs(N * ctx.a_k) ** 2


# 1: closed-form amplitudes against quadrature

def test_criterion_1_closed_form_matches_quadrature(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        ctx, geom, state, theta, phi = random_amplitude_case(rng, nmax=8)
        ref = quadrature_amplitude(ctx, geom, state, theta, phi)
        got = complex(amplitude_3d(ctx, geom, state, theta, phi))
        # 1e-8 relative with a 1e-12 absolute floor, expressed as one ratio
        worst = max(worst, abs(got - ref) / max(1e-8 * abs(ref), 1e-12))
    criterion("1", worst <= 1.0, f"200 cases, worst error / allowance = {worst:.2e}")


# 2: thermal fugacity series against the level sum

def test_criterion_2_fast_path_matches_level_sum(criterion):
    rng = np.random.default_rng(7)
    worst, kinds = 0.0, set()
    for _ in range(100):
        ctx, geom, spec, theta, phi = random_thermal_case(rng, t_range=(0.2, 50.0))
        kinds.add(spec.statistics.value)
        a = complex(thermal_amplitude_fast(ctx, geom, spec, theta, phi))
        b = complex(thermal_amplitude_direct(ctx, geom, spec, theta, phi))
        worst = max(worst, abs(a - b) / abs(b))
    criterion("2", worst <= 1e-9,
              f"100 cases over {sorted(kinds)}, worst relative {worst:.2e} (tol 1e-9)")


# 3: total cross-section in the k -> 0 limit

def test_criterion_3_total_cross_section(criterion):
    res = total_cross_section(ScatteringContext(1e-4, 0.1), UNIT, N=1.0)
    err = abs(res.sigma - 15.2053) / 15.2053
    criterion("3", err <= 1e-3, f"sigma = {res.sigma:.6f} vs 15.2053, relative {err:.2e} (tol 1e-3)")


# 4: forward value |N a_k|^2 everywhere

def _forward_cases():
    geoms = (UNIT, TrapGeometry(1.0, 1.0, math.sqrt(2.0)), TrapGeometry(0.7, 1.3, 1.1))
    for ctx in (CTX2, ScatteringContext(5.0, 0.1), ScatteringContext(0.5, 1.0)):
        base = _forward(1.0, ctx)
        for n in (0, 1, 5, 12):
            for geom in geoms:
                yield f"1d n={n}", abs(amplitude_1d(ctx, geom, n, 0.0, 0.3)) ** 2, base
                yield f"2d n={n}", abs(amplitude_2d(ctx, geom, n, 2, 0.0, 0.3)) ** 2, base
                yield f"3d n={n}", abs(amplitude_3d(ctx, geom, OscillatorState(n, 3, 1), 0.0, 0.3)) ** 2, base
        for geom in geoms[:2]:
            for stats, N in (("boltzmann", 1.0), ("bose", 500.0), ("fermi", 200.0)):
                for t in (0.3, 2.0, 13.2, 40.0):
                    routes = ("exact",) if stats == "boltzmann" else ("exact", "grand")
                    for route in routes:
                        spec = resolve_ensemble(stats, N, t, geom, route)
                        D = float(thermal_profile(ctx, geom, spec, 0.0, 0.4))
                        yield f"{stats} t={t} {route}", D, _forward(N, ctx)
        for N in (1, 20, 1000):
            yield f"fermi T=0 exact N={N}", fermi_ground_profile(ctx, UNIT, N, 0.0, 0.0), _forward(N, ctx)
            yield f"fermi T=0 approx N={N}", fermi_ground_profile(ctx, UNIT, N, 0.0, 0.0, "approx"), \
                _forward(N, ctx)
        sweep = temperature_sweep(ctx, UNIT, N_BEC, [5.0, 19.0, 25.0], 0.0)
        for row in sweep[:, 0]:
            yield "bose sweep", row, _forward(N_BEC, ctx)
        for u in (1.0, 2.1):
            yield f"bec u={u}", bec_ground_profile(ctx, UNIT, N_BEC, 0.0, 0.0, u), _forward(N_BEC, ctx)
        for t, corr, frac in ((2.0, True, "formula"), (15.0, False, "formula"), (10.0, True, "exact")):
            D = bec_below_tc_profile(ctx, UNIT, N_BEC, t, 0.0056, 0.0, 0.0, corr, frac)
            yield f"bec t={t} {frac}", D, _forward(N_BEC, ctx)
        for wells in (1, 2, 3, 10):
            expect = wells**2 * _forward(N_BEC, ctx)
            yield f"lattice {wells}", lattice_profile(ctx, UNIT, N_BEC, 10.0, wells, 0.0, 0.0), expect
            yield f"array t=0 {wells}", array_profile_finite_T(
                ctx, UNIT, N_BEC, 0.0, 0.0056, 10.0, wells, 0.0, 0.0), expect
        yield "double well", double_well_profile(ctx, UNIT, N_BEC, 10.0, 0.0, 0.0), 4 * _forward(N_BEC, ctx)


def test_criterion_4_forward_invariance(criterion):
    worst, where, count = 0.0, "", 0
    for label, D, expect in _forward_cases():
        err = abs(float(D) - expect) / expect
        count += 1
        if err > worst:
            worst, where = err, label
    criterion("4", worst <= 1e-10, f"{count} cases, worst relative {worst:.2e} ({where}) (tol 1e-10)")


# 5: zero counting of the 1-D profile

def test_criterion_5_zero_counting(criterion):
    theta = np.linspace(0.0, math.pi / 2, 20001)
    details, ok = [], True
    # large k: 2 (k l / 2)^2 = 32 exceeds the largest root of L_6 (about 16)
    big = ScatteringContext(8.0, 0.1)
    for n in range(1, 7):
        assert 2 * (big.k / 2) ** 2 > roots_laguerre(n)[0].max()
        zeros = count_sign_changes(laguerre_factor_1d(big, UNIT, n, theta))
        ok &= zeros == n
        details.append(f"{zeros}")
    # k = 5: only the roots below 2 (5/2)^2 = 12.5 are reached
    fig = ScatteringContext(5.0, 0.1)
    for n in range(1, 9):
        expect = int(np.count_nonzero(roots_laguerre(n)[0] < 12.5))
        zeros = count_sign_changes(laguerre_factor_1d(fig, UNIT, n, theta))
        ok &= zeros == expect
        details.append(f"{zeros}/{expect}")
    criterion("5", ok, "k=8 zeros n=1..6: " + ",".join(details[:6])
              + "; k=5 zeros/roots<12.5 n=1..8: " + ",".join(details[6:]))


# 6: kink of dD/dt at the finite-size transition

def _one_sided_slope(D, t0, side, h):
    f = [D(t0 + side * i * h) for i in range(3)]
    return side * (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h), f[0]


def _kink(theta, h=1e-3):
    tc = bose_condensation_temperature(N_BEC, UNIT)

    def D(t):
        return float(thermal_profile(CTX2, UNIT, resolve_ensemble("bose", N_BEC, t, UNIT), theta, 0.0))

    slopes, noise = {}, 0.0
    for side in (-1, 1):
        coarse, f0 = _one_sided_slope(D, tc, side, h)
        fine, _ = _one_sided_slope(D, tc, side, h / 2)
        slopes[side] = fine
        # truncation (Richardson difference) plus rounding of the stencil
        noise = max(noise, abs(coarse - fine) + 4.0 * np.finfo(float).eps * abs(f0) / h)
    return abs(slopes[1] - slopes[-1]), noise, slopes


def test_criterion_6_kink_at_transition(criterion):
    jump_pi, noise_pi, s_pi = _kink(math.pi)
    jump_0, noise_0, _ = _kink(0.0)
    ok = jump_pi >= 10.0 * noise_pi and jump_0 <= noise_0
    criterion("6", ok, f"theta=pi slopes {s_pi[-1]:.4g}/{s_pi[1]:.4g}, jump/noise {jump_pi / noise_pi:.3g} "
              f"(need >= 10); theta=0 jump/noise {jump_0 / noise_0:.3g} (need <= 1)")


# 7: statistics limits

def test_criterion_7a_bose_zero_temperature(criterion):
    theta = np.linspace(0.0, math.pi, 181)
    ref = bec_ground_profile(CTX2, UNIT, N_BEC, theta, 0.3)
    worst = 0.0
    for method in ("fast", "direct"):
        spec = resolve_ensemble("bose", N_BEC, 0.0, UNIT)
        D = thermal_profile(CTX2, UNIT, spec, theta, 0.3, method=method)
        worst = max(worst, float(np.max(np.abs(D - ref) / ref)))
    spec = resolve_ensemble("bose", N_BEC, 0.05, UNIT)
    cold = float(np.max(np.abs(thermal_profile(CTX2, UNIT, spec, theta, 0.3) - ref) / ref))
    criterion("7a", worst <= 1e-14 and cold <= 1e-10,
              f"t=0 vs ground-state profile {worst:.1e}; t=0.05 {cold:.1e}")


def test_criterion_7b_fermi_shell_filling(criterion):
    geoms = (UNIT, TrapGeometry(1.0, 1.0, math.sqrt(2.0)), TrapGeometry(0.7, 1.3, 1.1))
    worst = 0.0
    for geom in geoms:
        w = geom.level_spacings
        for N in (1, 2, 7, 20, 35, 100, 1000, 10_000):
            occ_fn, Ecut = fermi_shell_filling(N, geom)
            nmax = [int(Ecut / wa) + 3 for wa in w]
            E = (np.arange(nmax[0])[:, None, None] * w[0] + np.arange(nmax[1])[None, :, None] * w[1]
                 + np.arange(nmax[2])[None, None, :] * w[2])
            occ = occ_fn(E)
            assert occ.min() >= 0.0 and occ.max() <= 1.0
            worst = max(worst, abs(float(occ.sum()) - N))
    criterion("7b", worst <= 1e-9 * 10_000, f"worst |sum n - N| = {worst:.1e} over 3 traps, N up to 1e4")


def test_criterion_7c_fermi_envelope_exponent(criterion):
    N = N_BEC
    theta = np.linspace(0.0, 0.2, 401)
    mt = momentum_transfer(CTX2.k, theta, 0.0, UNIT)
    sel = (mt.Q > 0) & (mt.Q * N ** (1 / 3) <= 0.5)
    D0 = _forward(N, CTX2)
    exact = fermi_ground_profile(CTX2, UNIT, N, theta[sel], 0.0, "exact")
    approx = fermi_ground_profile(CTX2, UNIT, N, theta[sel], 0.0, "approx")
    s_exact = np.polyfit(mt.Q[sel], np.log(exact / D0), 1)[0]
    s_approx = np.polyfit(mt.Q[sel], np.log(approx / D0), 1)[0]
    ratio = s_approx / s_exact
    criterion("7c", abs(ratio - 1.0) <= 0.25,
              f"d ln D / dQ exact {s_exact:.4g}, approximation {s_approx:.4g}, ratio {ratio:.3f} (need 1 +- 0.25)")


# 8: interference identities

def test_criterion_8_interference(criterion):
    theta = np.linspace(0.0, math.pi / 2, 721)
    two = lattice_profile(CTX2, UNIT, N_BEC, 10.0, 2, theta, 0.0)
    dw = double_well_profile(CTX2, UNIT, N_BEC, 10.0, theta, 0.0)
    ident = float(np.max(np.abs(two - dw) / np.maximum(np.abs(dw), 1e-300)))

    # continuity: finite N'^2 peak at each principal maximum, approached smoothly
    wells, d = 10, 10.0
    peak, jump = 0.0, 0.0
    for m in range(1, int(d / CTX2.wavelength) + 1):
        tm = math.asin(m * CTX2.wavelength / d)
        at = float(lattice_profile(CTX2, UNIT, N_BEC, d, wells, tm, 0.0))
        env = wells**2 * float(bec_ground_profile(CTX2, UNIT, N_BEC, tm, 0.0))
        peak = max(peak, abs(at - env) / env)
        for eps in (1e-7, -1e-7):
            near = float(lattice_profile(CTX2, UNIT, N_BEC, d, wells, tm + eps, 0.0))
            jump = max(jump, abs(near - at) / at)

    # first zero of the double well, located numerically
    def amp(th):
        return math.cos(0.5 * CTX2.k * 10.0 * math.sin(th))

    zero = optimize.brentq(amp, 1e-3, 0.3, xtol=1e-14)
    D_zero = float(double_well_profile(CTX2, UNIT, N_BEC, 10.0, zero, 0.0))
    ok = ident <= 1e-12 and peak <= 1e-12 and jump <= 1e-6 and abs(zero - 0.1577) <= 5e-5 and D_zero <= 1e-25 * float(dw[0])
    criterion("8", ok, f"N'=2 vs double well {ident:.1e}; peak vs N'^2 envelope {peak:.1e}, change within 1e-7 {jump:.1e}; "
              f"first zero {zero:.5f} (expected 0.1577), D there {D_zero:.1e}")


# 9: interaction narrowing

def test_criterion_9_interaction_narrowing(criterion):
    u = variational_scale(N_BEC, 0.0056)
    c = math.sqrt(2.0 / math.pi) * N_BEC * 0.0056
    resid = abs(u**5 - u - c)
    w0 = half_width(lambda th: bec_ground_profile(CTX2, UNIT, N_BEC, th, 0.0))
    w1 = half_width(lambda th: bec_ground_profile(CTX2, UNIT, N_BEC, th, 0.0, u))
    dev = abs(u - 2.167) / 2.167
    criterion("9", dev <= 5e-3 and resid < 1e-10 and w1 < w0,
              f"u = {u:.6f} ({dev:.2%} from 2.167), residual {resid:.1e}, "
              f"half-width {w0:.4f} -> {w1:.4f}")


# 10: CLI determinism and figure configurations

FIGURE_COMMANDS = {
    "single-state profile": ["single"],
    "thermal profile": ["thermal"],
    "temperature sweep": ["thermal", "--sweep"],
    "condensate": ["condensate", "bec"],
    "double well": ["condensate", "double-well"],
    "lattice": ["condensate", "lattice"],
}


def _run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "trapscatter", *args],
                          capture_output=True, text=True, timeout=300)
    return proc.returncode, proc.stdout


def test_criterion_10_cli_figure_defaults(criterion):
    problems = []
    for name, args in FIGURE_COMMANDS.items():
        for fmt in ("csv", "json"):
            rc1, out1 = _run_cli([*args, "--format", fmt])
            rc2, out2 = _run_cli([*args, "--format", fmt])
            if rc1 != 0 or rc2 != 0:
                problems.append(f"{name}/{fmt}: exit {rc1},{rc2}")
                continue
            if out1 != out2:
                problems.append(f"{name}/{fmt}: output differs between runs")
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("error")
                    table = parse_csv(out1) if fmt == "csv" else json.loads(out1)
                validate_table(table)
            except Exception as exc:  # noqa: BLE001 - any schema failure is a verdict
                problems.append(f"{name}/{fmt}: {exc}")
    criterion("10", not problems,
              f"{len(FIGURE_COMMANDS)} commands x 2 formats, reproducible and schema-valid"
              if not problems else "; ".join(problems))
