import filecmp
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from superkdv.cli import main
from superkdv.snapshots import load_json, read_csv, read_snapshot


def run(argv):
    return main([str(a) for a in argv])


def simulate_soliton(outdir, extra=()):
    return run(["simulate", "--system", "extended", "--algebra", "scalar",
                "--ic", "soliton(kappa=1)", "--L", 40, "--grid", 256,
                "--dt", 5e-4, "--t-end", 0.05, "--out", outdir, *extra])


def test_simulate_writes_artifacts(tmp_path):
    out = tmp_path / "run"
    assert simulate_soliton(out) == 0
    manifest = load_json(out / "manifest.json")
    assert manifest["system"] == "extended"
    assert manifest["N"] == 256
    assert manifest["ic"]["name"] == "soliton"
    assert "code_version" in manifest
    header, rows = read_csv(out / "conserved.csv")
    assert header[0] == "time"
    assert "H2[unit]" in header
    assert len(rows) >= 2
    snaps = sorted(out.glob("snapshot_*.json"))
    assert len(snaps) >= 2
    first = read_snapshot(snaps[0])
    assert first.time == 0.0
    assert first.even.data.min() == pytest.approx(-2.0, rel=1e-6)


def test_zero_ic_gives_all_zero_csv(tmp_path):
    out = tmp_path / "zero"
    assert run(["simulate", "--system", "extended", "--ic", "zero",
                "--t-end", 0.02, "--out", out]) == 0
    _, rows = read_csv(out / "conserved.csv")
    values = np.asarray(rows, dtype=float)[:, 1:]
    assert np.all(values == 0.0)


def test_same_seed_byte_identical(tmp_path):
    args = ["simulate", "--system", "extended", "--algebra", "grassmann:3",
            "--lambda", 1, "--ic", "random_bandlimited(max_mode=5,amplitude=0.5)",
            "--seed", 11, "--grid", 128, "--t-end", 0.02, "--out"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(args + [a]) == 0
    assert run(args + [b]) == 0
    assert filecmp.cmp(a / "conserved.csv", b / "conserved.csv", shallow=False)
    assert filecmp.cmp(a / "manifest.json", b / "manifest.json", shallow=False)
    for snap_a in sorted(a.glob("snapshot_*.json")):
        assert filecmp.cmp(snap_a, b / snap_a.name, shallow=False)


def test_seed_flag_feeds_random_ic(tmp_path):
    args = ["simulate", "--ic", "random_bandlimited(max_mode=4,amplitude=0.4)",
            "--grid", 128, "--t-end", 0.01, "--out"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(args + [a, "--seed", 1]) == 0
    assert run(args + [b, "--seed", 2]) == 0
    assert load_json(a / "manifest.json")["ic"]["params"]["seed"] == 1
    assert not filecmp.cmp(a / "conserved.csv", b / "conserved.csv", shallow=False)


def test_invalid_combinations_exit_2(tmp_path):
    assert run(["simulate", "--system", "skdv", "--algebra", "scalar",
                "--out", tmp_path / "x"]) == 2
    assert run(["simulate", "--system", "extended", "--gardner-eps", 0.1,
                "--out", tmp_path / "y"]) == 2
    assert run(["simulate", "--system", "extended", "--dt", -1,
                "--out", tmp_path / "z"]) == 2
    assert run(["simulate", "--algebra", "grassmann:99",
                "--out", tmp_path / "w"]) == 2


def test_stability_guard_refusal_exit_2(tmp_path, capsys):
    code = run(["simulate", "--ic", "soliton(kappa=1)", "--dt", 0.05,
                "--scheme", "rk4", "--t-end", 1, "--out", tmp_path / "g"])
    assert code == 2
    assert "dt" in capsys.readouterr().err


def test_blowup_exit_3_saves_last_state(tmp_path):
    out = tmp_path / "blow"
    code = run(["simulate", "--ic", "soliton(kappa=1)", "--dt", 0.05,
                "--scheme", "rk4", "--t-end", 5, "--force", "--out", out])
    assert code == 3
    last = read_snapshot(out / "snapshot_last.json")
    assert np.all(np.isfinite(last.even.data))
    assert (out / "manifest.json").exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "system": "gardner", "algebra": "symplectic:1", "lambda": 1.0,
        "gardner-eps": 0.1, "grid": 128, "dt": 1e-3, "t_end": 0.02,
        "ic": "random_bandlimited(max_mode=4,amplitude=0.4,seed=3)"}))
    out = tmp_path / "run"
    assert run(["simulate", "--config", cfg, "--gardner-eps", 0.2,
                "--out", out]) == 0
    manifest = load_json(out / "manifest.json")
    assert manifest["system"] == "gardner"
    assert manifest["gardner_eps"] == 0.2


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sytsem": "extended"}))
    assert run(["simulate", "--config", cfg, "--out", tmp_path / "x"]) == 2


def test_modified_system_tracks_hamiltonian(tmp_path):
    out = tmp_path / "mod"
    assert run(["simulate", "--system", "modified", "--algebra", "grassmann:2",
                "--lambda", 1, "--ic", "random_bandlimited(max_mode=3,amplitude=0.3)",
                "--grid", 128, "--t-end", 0.02, "--out", out]) == 0
    header, _ = read_csv(out / "conserved.csv")
    assert header[0] == "time"
    assert all(h.startswith("H[") for h in header[1:])


def test_check_algebra_pass_and_fail(tmp_path, capsys):
    assert run(["check", "algebra"]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["pass"] is True
    assert len(verdict["results"]) == 9

    out = tmp_path / "verdict.json"
    assert run(["check", "algebra", "--algebra", "grassmann:1", "--out", out]) == 1
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["pass"] is False
    assert load_json(out) == verdict
    failed = [c for c in verdict["results"][0]["checks"] if not c["passed"]]
    assert any("nondegenerate" in c["name"] for c in failed)


def test_check_densities_passes(capsys):
    assert run(["check", "densities"]) == 0
    captured = capsys.readouterr()
    verdict = json.loads(captured.out)
    assert verdict["pass"] is True
    constants = {e["n"]: e["c"] for e in verdict["results"]["entries"]}
    assert constants == {0: "1", 2: "-1", 4: "1", 6: "-1"}
    assert "order" in captured.err


def test_check_verdict_shape(capsys):
    run(["check", "algebra"])
    verdict = json.loads(capsys.readouterr().out)
    assert set(verdict) >= {"check", "pass", "tolerances"}


def test_plot_csv_columns(tmp_path):
    out = tmp_path / "run"
    simulate_soliton(out)
    svg = tmp_path / "drift.svg"
    assert run(["plot", "--csv", out / "conserved.csv",
                "--columns", "H2[unit],H4[unit]", "--out", svg]) == 0
    text = svg.read_text()
    assert text.count("<polyline") == 2
    assert "H2[unit]" in text


def test_plot_missing_column_exit_2(tmp_path, capsys):
    out = tmp_path / "run"
    simulate_soliton(out)
    assert run(["plot", "--csv", out / "conserved.csv",
                "--columns", "H9[unit]", "--out", tmp_path / "x.svg"]) == 2
    assert "missing columns" in capsys.readouterr().err


def test_plot_empty_csv_exit_2(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("time,H0[unit]\n")
    assert run(["plot", "--csv", empty, "--out", tmp_path / "x.svg"]) == 2


def test_plot_soliton_snapshot_minimum(tmp_path):
    out = tmp_path / "run"
    simulate_soliton(out)
    snap = sorted(out.glob("snapshot_*.json"))[0]
    svg = tmp_path / "sol.svg"
    assert run(["plot", "--snapshot", snap, "--out", svg]) == 0
    text = svg.read_text()
    points = re.search(r'points="([^"]+)"', text).group(1)
    pixels = [tuple(map(float, p.split(","))) for p in points.split()]
    deepest = max(i for i, (_, y) in enumerate(pixels)
                  if y == max(py for _, py in pixels))
    field = read_snapshot(snap).even.data[0]
    assert deepest == int(np.argmin(field))
    assert field[deepest] == pytest.approx(-2.0, rel=1e-6)


def test_plot_requires_exactly_one_input(tmp_path):
    assert run(["plot", "--out", tmp_path / "x.svg"]) == 2


def test_no_command_exits_2(capsys):
    assert run([]) == 2
    capsys.readouterr()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "superkdv.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "superkdv" in proc.stdout
