import csv
import io
import json
import math

import pytest

from helstrom_nosig import reports
from helstrom_nosig.cli import main, parse_range
from helstrom_nosig.errors import IoFailure
from helstrom_nosig.reports import (
    BoundReport,
    NoSignalReport,
    OracleReport,
    SimulationReport,
    SteerReport,
    SweepReport,
    load_json,
    write_report,
)

THETA = "0.5235988"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_text(capsys):
    code, out, _ = run(capsys, "bound", "--theta", THETA)
    assert code == 0
    assert "P_E^m = 0.25" in out
    assert "p = 0.666667" in out


def test_bound_json_schema(capsys):
    code, out, _ = run(capsys, "bound", "--overlap", "0.75", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert list(data) == ["theta", "overlap", "pe_min", "p", "optimal_axis"]
    assert data["pe_min"] == pytest.approx(0.25, abs=1e-12)
    assert data["theta"] == pytest.approx(math.pi / 6, abs=1e-12)


@pytest.mark.parametrize(
    "argv",
    [
        ["bound", "--overlap", "2"],
        ["bound", "--theta", "0"],
        ["bound", "--theta", "0.5", "--overlap", "0.5"],
        ["bound"],
        ["frobnicate"],
        [],
        ["nosig", "--theta", THETA, "--rounds", "50"],
        ["nosig", "--theta", THETA, "--detector", "super:0.9"],
        ["nosig", "--theta", THETA, "--detector", "projective:1,1,0"],
        ["simulate", "--theta", THETA, "--detector", "wat"],
        ["sweep", "--theta-range", "0.5:0.2:0.1"],
        ["sweep", "--theta-range", "0.2:0.5:0"],
        ["oracle", "--theta", THETA, "--grid", "10"],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err


def test_domain_message(capsys):
    _, _, err = run(capsys, "bound", "--overlap", "2")
    assert "overlap" in err


def test_nosig_super_signal(capsys):
    code, out, _ = run(
        capsys, "nosig", "--theta", THETA, "--detector", "super:0.05,0.5", "--rounds", "100000", "--seed", "42", "--format", "json"
    )
    assert code == 0
    rep = load_json(NoSignalReport, out)
    assert rep.verdict == "signal"
    assert abs(rep.z_statistic) > 20


def test_nosig_optimal_verdict_is_not_exit_code(capsys):
    code, out, _ = run(capsys, "nosig", "--theta", THETA, "--rounds", "1000", "--format", "json")
    assert code == 0
    assert json.loads(out)["verdict"] == "no_signal"


def test_sweep_csv(capsys):
    code, out, _ = run(
        capsys, "sweep", "--theta-range", "0.2:0.6:0.2", "--eps-range", "0.05:0.1:0.05",
        "--rounds", "2000", "--format", "csv",
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["theta", "overlap", "pe_min", "p", "detector", "epsilon", "gap", "z", "verdict"]
    assert len(rows) == 1 + 3 * 3
    assert out.endswith("\n")
    by_detector = {r[4].split(":")[0] for r in rows[1:]}
    assert by_detector == {"optimal", "super"}


def test_sweep_skips_epsilon_above_bound(capsys):
    # pe_min(1.5) ~ 0.0013, so only the optimal row survives
    code, out, _ = run(capsys, "sweep", "--theta-range", "1.5:1.5:0.1", "--eps-range", "0.05:0.05:0.01", "--rounds", "200", "--format", "csv")
    assert code == 0
    assert len(out.strip().splitlines()) == 2


def test_parse_range_inclusive():
    assert parse_range("0.05:1.55:0.05", "r")[-1] == pytest.approx(1.55)
    assert len(parse_range("0.05:1.55:0.05", "r")) == 31


def test_identical_argv_byte_identical(capsys):
    argv = ["simulate", "--theta", THETA, "--detector", "super:0.05", "--rounds", "300", "--sessions", "20", "--seed", "7", "--format", "json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_seed_from_environment(capsys, monkeypatch):
    argv = ["nosig", "--theta", THETA, "--rounds", "500", "--format", "json"]
    monkeypatch.setenv("HNL_SEED", "7")
    _, env_out, _ = run(capsys, *argv)
    _, flag_out, _ = run(capsys, *argv, "--seed", "7")
    _, other, _ = run(capsys, *argv, "--seed", "8")
    assert env_out == flag_out != other
    monkeypatch.setenv("HNL_SEED", "x")
    assert run(capsys, *argv)[0] == 1


def test_output_file(tmp_path, capsys):
    target = tmp_path / "bound.json"
    code, out, _ = run(capsys, "bound", "--theta", THETA, "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert load_json(BoundReport, target.read_text(encoding="utf-8")).pe_min == pytest.approx(0.25, abs=1e-7)


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(capsys, "bound", "--theta", THETA, "--output", str(tmp_path / "missing" / "x.txt"))
    assert code == 1 and "cannot write" in err
    with pytest.raises(IoFailure):
        write_report(BoundReport(0.1, 0.9, 0.1, 0.9, (1.0, 0.0, 0.0)), "json", tmp_path / "missing" / "x")


@pytest.mark.parametrize(
    "argv,cls",
    [
        (["bound", "--theta", THETA], BoundReport),
        (["steer", "--theta", THETA], SteerReport),
        (["oracle", "--theta", THETA, "--grid", "2000", "--povms", "100"], OracleReport),
        (["simulate", "--theta", THETA, "--detector", "povm:0.9,0.2,1,0,0", "--rounds", "100", "--sessions", "4"], SimulationReport),
        (["simulate", "--theta", THETA, "--detector", "projective:0,0,1", "--rounds", "100", "--sessions", "4"], SimulationReport),
        (["nosig", "--theta", THETA, "--rounds", "200"], NoSignalReport),
        (["sweep", "--theta-range", "0.3:0.5:0.1", "--eps-range", "0.01:0.03:0.01", "--rounds", "200"], SweepReport),
    ],
)
def test_json_round_trip(capsys, argv, cls):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    rebuilt = load_json(cls, out)
    assert isinstance(rebuilt, cls)
    assert reports.dumps_json(rebuilt) == out
    # every float survives exactly (17 significant digits)
    assert json.loads(reports.dumps_json(rebuilt)) == json.loads(out)
    for fmt in ("text", "csv"):
        code, text, _ = run(capsys, *argv, "--format", fmt)
        assert code == 0 and text.endswith("\n")


def test_float_precision():
    rep = BoundReport(0.1, 1 / 3, 2 / 3, math.pi, (1.0, -0.0, 1e-300))
    text = reports.dumps_json(rep)
    assert "0.33333333333333331" in text
    assert load_json(BoundReport, text) == rep


def test_non_finite_z_round_trips():
    rep = NoSignalReport(1.0, 0.0, 1.0, math.inf, "signal", 100, 5.0)
    assert load_json(NoSignalReport, reports.dumps_json(rep)) == rep


def test_steer_report_content(capsys):
    _, out, _ = run(capsys, "steer", "--theta", THETA, "--format", "json")
    rep = load_json(SteerReport, out)
    assert rep.eq2_residual < 1e-10
    assert rep.residual_alpha_delta < 1e-12 and rep.residual_beta_minus_delta < 1e-12
    assert rep.psi[0] == pytest.approx(0.78868, abs=1e-5)
