import csv
import json

import pytest

from concave_field.cli import run_cli


def _csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_sample_hardmin_csv(tmp_path):
    out = tmp_path / "h.csv"
    argv = ["sample-hardmin", "--n", "2", "--model", "uniform:scale=1", "--K", "10000", "--replicas", "20",
            "--at", "0.5,0.5", "--seed", "7", "--out", "csv", "--output-path", str(out)]
    assert run_cli(argv) == 0
    rows = _csv(out)
    assert list(rows[0]) == ["replica", "value"] and len(rows) == 20
    manifest = json.loads((tmp_path / "h.csv.manifest.json").read_text())
    assert manifest["seed"] == 7 and manifest["command"] == "sample-hardmin"
    first = out.read_bytes()
    assert run_cli(argv) == 0
    assert out.read_bytes() == first


def test_limit_softmin(tmp_path):
    out = tmp_path / "l.csv"
    assert run_cli(["limit-softmin", "--model", "exponential:rate=1", "--lambda", "10", "--K", "100000",
                    "--grid", "33", "--seed", "7", "--output-path", str(out)]) == 0
    rows = _csv(out)
    assert len(rows) == 33
    assert list(rows[0]) == ["p1", "p2", "psi_K", "psi_inf", "abs_err"]
    assert max(float(r["abs_err"]) for r in rows) < 0.01


@pytest.mark.parametrize("argv", [
    ["sample-softmin", "--K", "50", "--replicas", "3", "--grid", "3"],
    ["sample-poisson", "--model", "constant-h:gamma=1", "--replicas", "3", "--at", "0.3,0.7"],
    ["sample-diagonal", "--regime", "linear:2", "--K", "100", "--replicas", "3", "--at", "0.5,0.5"],
    ["tail", "--model", "constant-h:gamma=1", "--points", "0.5,0.5;0.2,0.8", "--levels", "0.5,0.4"],
    ["tail", "--model", "constant-h:gamma=1", "--psi", "parabola", "--mc-points", "20000"],
    ["envelope", "--points", "0.5,0.5", "--levels", "1", "--at", "0.25,0.75"],
    ["volume-stokes", "--psi", "harmonic", "--n", "3"],
    ["portfolio", "--psi", "geomean", "--n", "3", "--grid", "5"],
    ["weight-dist", "--model", "gamma:shapes=[2,1]", "--at", "0.3,0.7", "--replicas", "3"],
    ["transport", "--psi", "geomean", "--at", "0.2,0.8", "--out", "json"],
])
def test_subcommands(argv, capsys):
    assert run_cli(argv) == 0
    out = capsys.readouterr().out
    assert out.strip()


def test_envelope_value(capsys):
    run_cli(["envelope", "--points", "0.5,0.5", "--levels", "1", "--at", "0.25,0.75"])
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert float(rows[0]["value"]) == pytest.approx(0.5)


def test_usage_errors(capsys):
    assert run_cli(["nonsense"]) == 1
    assert run_cli(["sample-hardmin", "--bogus", "1"]) == 1
    assert run_cli(["sample-hardmin", "--at", "0.5,0.6"]) == 1
    assert run_cli(["verify", "--suite", "no-such-check"]) == 1
    assert run_cli(["tail"]) == 1


def test_verify_subset(tmp_path):
    out = tmp_path / "v.json"
    assert run_cli(["verify", "--suite", "envelope-lp,portfolio-identities", "--output-path", str(out)]) == 0
    reports = json.loads(out.read_text())
    assert [r["name"] for r in reports] == ["06-envelope-lp", "09-portfolio-identities"]
    assert all(r["passed"] for r in reports)
