"""CLI behavior: output format, artifacts, determinism, exit codes."""

import json
import subprocess
import sys

import pytest

from fireline.cli import main


def test_scales_line(capsys):
    assert main(["scales", "--lambda", "0.01"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "a=4.605170 n=21 m=4 eps=0.010239"


def test_scales_with_pi_prints_regime(capsys):
    assert main(["scales", "--lambda", "0.01", "--pi", "2.0"]) == 0
    out = capsys.readouterr().out
    assert "regime=intermediate(p=2.280046)" in out
    assert "in_asymptotic_range=true" in out


def test_missing_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["scales"])
    assert exc.value.code == 2


def test_parameter_error_exits_2(capsys):
    rc = main(
        ["barrier", "--lambda", "0.0025", "--pi", "25", "--t0", "0.5",
         "--t1", "0.7", "--runs", "1"]
    )
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_simulate_discrete_artifacts(tmp_path, capsys):
    csv_path = tmp_path / "obs.csv"
    snap_path = tmp_path / "state.txt"
    rc = main(
        ["simulate-discrete", "--lambda", "0.02", "--pi", "5", "-A", "2",
         "-T", "1.0", "--seed", "3", "--grid", "8",
         "--csv", str(csv_path), "--snapshot", str(snap_path)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("t=1.000000 raw=")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,Z,K,W,size,D_lo,D_hi"
    assert len(lines) == 9  # header plus eight grid points
    snap = json.loads(snap_path.read_text())
    assert snap["schema"] == "ffp-snapshot/1"
    assert snap["seed"] == 3


def test_simulate_limit_modes(tmp_path, capsys):
    rc = main(["simulate-limit", "--p", "0.5", "-A", "2", "-T", "2", "--seed", "4"])
    assert rc == 0
    assert "Z(0,T)=" in capsys.readouterr().out

    events = tmp_path / "events.csv"
    rc = main(
        ["simulate-limit", "--z0", "0.5", "-A", "2", "-T", "2", "--seed", "4",
         "--events", str(events)]
    )
    assert rc == 0
    assert "length=" in capsys.readouterr().out
    assert events.read_text().splitlines()[0] == "t,kind,x,cause"

    with pytest.raises(SystemExit) as exc:
        main(["simulate-limit", "--p", "0.5", "--z0", "0.5", "-A", "2", "-T", "2"])
    assert exc.value.code == 2


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FIRELINE_OUTPUT_DIR", str(tmp_path))
    rc = main(
        ["gamma-test", "--z0", "0.5", "-T", "2", "--samples", "100",
         "--seed", "3", "--json", "gamma.json"]
    )
    assert rc == 0
    capsys.readouterr()
    doc = json.loads((tmp_path / "gamma.json").read_text())
    assert doc["artifact"] == "fireline"
    assert doc["command"] == "gamma-test"
    assert doc["params"]["seed"] == 3
    assert "ks" in doc["results"]


def test_byte_identical_reruns(tmp_path, capsys):
    args = ["couple", "--lambda", "0.018", "--pi", "3.4", "-A", "1", "-T", "1",
            "--runs", "2", "--seed", "5", "--grid", "16"]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert main(args + ["--csv", str(first)]) == 0
    assert main(args + ["--csv", str(second)]) == 0
    capsys.readouterr()
    assert first.read_bytes() == second.read_bytes()

    j1 = tmp_path / "a.json"
    j2 = tmp_path / "b.json"
    gargs = ["gamma-test", "--z0", "0.5", "-T", "2", "--samples", "50", "--seed", "9"]
    assert main(gargs + ["--json", str(j1)]) == 0
    assert main(gargs + ["--json", str(j2)]) == 0
    capsys.readouterr()
    assert j1.read_bytes() == j2.read_bytes()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "fireline 0.1.0" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fireline", "scales", "--lambda", "0.01"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "a=4.605170 n=21 m=4 eps=0.010239"
