import json
import math

import numpy as np
import pytest

from trapscatter import ScatteringContext
from trapscatter.cli import main, parse_expression, parse_grid, run
from trapscatter.output import parse_csv, validate_table


@pytest.mark.parametrize("text, value", [("pi", math.pi), ("pi/2", math.pi / 2), ("3*pi/4", 0.75 * math.pi), ("-1e-3", -1e-3), ("2**3", 8.0)])
def test_expressions(text, value):
    assert parse_expression(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["__import__('os')", "pi(1)", "1/0", "x"])
def test_expressions_reject_everything_else(text):
    with pytest.raises(ValueError):
        parse_expression(text)


def test_grid_parsing():
    assert parse_grid("0:pi:721") == (0.0, math.pi, 721)


def _run_csv(capsys, argv):
    assert main(argv) == 0
    return parse_csv(capsys.readouterr().out)


def test_single_default_grid(capsys):
    t = _run_csv(capsys, ["single", "--dim", "1", "--n", "5", "--k-as", "5", "--lx", "1",
                          "--m-over-M", "0.1", "--theta-grid", "0:pi:721", "--phi", "0"])
    assert len(t.rows) == 721
    assert t.meta["n"] == 5 and t.meta["k_as"] == 5


def test_two_point_grid_forward_row(capsys):
    t = _run_csv(capsys, ["single", "--theta-grid", "0:pi:2"])
    assert t.rows[0][2] == pytest.approx(abs(ScatteringContext(5.0, 0.1).a_k) ** 2, rel=1e-15)


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["thermal", "--out", str(a)]) == 0
    assert main(["thermal", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_metadata_reconstructs_the_run():
    t = run(["condensate", "lattice", "--wells", "4", "--d", "12", "--k-as", "1.5"])
    for key in ("k_as", "m_over_M", "N", "a_tilde", "t_over_tc", "corrections", "d", "wells", "phi", "theta_count", "mode"):
        assert key in t.meta
    assert t.meta["wells"] == 4 and t.meta["d"] == 12.0


def test_sweep_forward_column_is_flat():
    t = run(["thermal", "--sweep", "--t-grid", "2:35:12"])
    assert t.columns == ("t", "t_over_tc", "D_theta0", "D_theta90", "D_theta180")
    fwd = t.column("D_theta0")
    np.testing.assert_allclose(fwd, fwd[0], rtol=1e-10)
    assert fwd[0] == pytest.approx(1e8 * abs(ScatteringContext(2.0, 0.1).a_k) ** 2)


def test_sweep_statistics_flag():
    bose = run(["thermal", "--sweep", "--t-grid", "3:6:2", "--N", "50"])
    fermi = run(["thermal", "--sweep", "--t-grid", "3:6:2", "--N", "50", "--statistics", "fermi"])
    assert bose.meta["statistics_used"] == "bose" and fermi.meta["statistics_used"] == "fermi"
    assert np.all(bose.column("D_theta90") > fermi.column("D_theta90"))


def test_temperature_from_si_units():
    t = run(["thermal", "--T-kelvin", "1e-7", "--omega", "1000", "--theta-grid", "0:pi:3"])
    assert t.meta["t_used"] == pytest.approx(13.09, abs=5e-3)


def test_geometry_from_si_units():
    t = run(["single", "--omega", "1000", "--mass-kg", "1.44e-25", "--a-s-m", "5e-9", "--theta-grid", "0:pi:3"])
    assert t.meta["lx"] == pytest.approx(t.meta["lz"])
    assert t.meta["lx"] > 1


def test_double_well_at_zero_spacing_is_four_condensates():
    with pytest.warns(UserWarning):
        dw = run(["condensate", "double-well", "--d", "0", "--t-over-tc", "0"])
    bec = run(["condensate", "bec", "--t-over-tc", "0"])
    np.testing.assert_allclose(dw.column("D"), 4 * bec.column("D"), rtol=1e-13)


def test_lattice_principal_maxima_on_grid():
    t = run(["condensate", "lattice", "--wells", "10", "--d", "10", "--t-over-tc", "0", "--a-tilde", "0",
             "--theta-grid", "0:pi/2:2001"])
    theta, D = t.column("theta"), t.column("D")
    env = 100 * run(["condensate", "bec", "--t-over-tc", "0", "--a-tilde", "0",
                     "--theta-grid", "0:pi/2:2001"]).column("D")
    lam = 2 * math.pi / 2.0
    for m in (1, 2, 3):
        i = int(np.argmin(np.abs(theta - math.asin(m * lam / 10))))
        window = slice(i - 3, i + 4)
        assert D[window].max() == pytest.approx(env[window][np.argmax(D[window])], rel=1e-2)


def test_condensate_forward_value_with_corrections():
    t = run(["condensate", "bec", "--a-tilde", "0.0056", "--t-over-tc", "0.1", "--corrections", "on"])
    assert t.rows[0][2] == pytest.approx(1e8 * abs(ScatteringContext(2.0, 0.1).a_k) ** 2, rel=1e-12)


def test_xsection_reports():
    one = run(["xsection"])
    assert one.rows[0][0] == pytest.approx(15.205, abs=0.015)
    three = run(["xsection", "--N", "3"])
    assert three.rows[0][0] == pytest.approx(9 * one.rows[0][0], rel=1e-12)
    hot = run(["xsection", "--k-as", "2"])
    assert hot.rows[0][0] < one.rows[0][2]


def test_json_output(capsys):
    assert main(["single", "--theta-grid", "0:pi:5", "--format", "json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    validate_table(obj)
    assert len(obj["rows"]) == 5


def test_validate_command(capsys):
    assert main(["validate", "--cases", "4", "--seed", "2"]) == 0
    t = parse_csv(capsys.readouterr().out)
    assert t.meta["all_passed"] == "true"


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["single", "--theta-grid", "0:pi:1"],
    ["single", "--dim", "4"],
    ["condensate", "bec", "--corrections", "maybe"],
])
def test_argument_errors_exit_2(argv, capsys):
    assert main(argv) == 2


@pytest.mark.parametrize("argv", [
    ["condensate", "bec", "--t-over-tc", "1.2"],
    ["single", "--n", "-1"],
    ["single", "--theta-grid", "0:4:3"],
    ["thermal", "--T-kelvin", "1e-7"],
])
def test_domain_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_numerical_failure_exits_3(monkeypatch, capsys):
    import trapscatter.cli as cli
    from trapscatter.core import NumericalError

    def boom(args):
        raise NumericalError("did not converge")

    monkeypatch.setitem(cli._RUNNERS, "xsection", boom)
    assert main(["xsection"]) == 3
