import filecmp

import numpy as np
import pytest

from superkdv.algebra import AlgebraDescriptor
from superkdv.dynamics import SystemState
from superkdv.errors import SuperKdVError
from superkdv.fields import PeriodicGrid, build_initial_condition
from superkdv.snapshots import (
    dump_json,
    jsonable,
    load_json,
    read_csv,
    read_snapshot,
    write_csv,
    write_line_plot,
    write_manifest,
    write_snapshot,
)


def sample_state(kind="extended", backend="grassmann:3", eps=0.0):
    grid = PeriodicGrid(20.0, 64)
    desc = AlgebraDescriptor.from_string(backend)
    u, xi = build_initial_condition(
        "random_bandlimited(max_mode=4,amplitude=0.4,seed=5)", grid, desc)
    return SystemState(kind, u, xi, time=0.25, lam=1.5, epsilon=eps)


def test_snapshot_roundtrip(tmp_path):
    state = sample_state()
    path = tmp_path / "snap.json"
    write_snapshot(state, path)
    back = read_snapshot(path)
    assert back.kind == state.kind
    assert back.time == state.time
    assert back.lam == state.lam
    assert back.grid == state.grid
    assert back.descriptor == state.descriptor
    assert np.array_equal(back.even.data, state.even.data)
    assert np.array_equal(back.odd.data, state.odd.data)


def test_snapshot_rewrite_is_byte_identical(tmp_path):
    state = sample_state("gardner", "symplectic:1", eps=0.1)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_snapshot(state, a)
    write_snapshot(read_snapshot(a), b)
    assert filecmp.cmp(a, b, shallow=False)
    assert load_json(a)["epsilon"] == 0.1


def test_snapshot_missing_channel_rejected(tmp_path):
    state = sample_state()
    path = tmp_path / "snap.json"
    write_snapshot(state, path)
    doc = load_json(path)
    del doc["even"]["unit"]
    dump_json(doc, path)
    with pytest.raises(SuperKdVError):
        read_snapshot(path)


def test_csv_roundtrip_and_determinism(tmp_path):
    header = ["time", "H2[unit]", "H2[nil]"]
    rows = [[0.0, 1.2345678901234567, -3e-17], [0.1, -0.5, 2.0]]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(header, rows, a)
    h, r = read_csv(a)
    assert h == header
    assert r[0][1] == 1.2345678901234567
    write_csv(h, r, b)
    assert filecmp.cmp(a, b, shallow=False)


def test_csv_row_width_checked(tmp_path):
    with pytest.raises(SuperKdVError):
        write_csv(["a", "b"], [[1.0]], tmp_path / "bad.csv")


def test_line_plot_polylines_and_determinism(tmp_path):
    t = np.linspace(0.0, 1.0, 40)
    series = {"H2[unit]": np.cos(t), "H2[nil]": np.sin(t), "H4[unit]": t ** 2}
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    write_line_plot(a, t, series, title="drift", xlabel="time")
    write_line_plot(b, t, series, title="drift", xlabel="time")
    text = a.read_text()
    assert text.count("<polyline") == len(series)
    assert text.startswith("<svg xmlns=")
    assert "drift" in text
    assert filecmp.cmp(a, b, shallow=False)


def test_line_plot_flat_series_still_renders(tmp_path):
    t = np.linspace(0.0, 1.0, 10)
    path = tmp_path / "flat.svg"
    write_line_plot(path, t, {"H0[unit]": np.zeros(10)})
    assert "<polyline" in path.read_text()


def test_line_plot_input_validation(tmp_path):
    with pytest.raises(SuperKdVError):
        write_line_plot(tmp_path / "x.svg", [], {})
    with pytest.raises(SuperKdVError):
        write_line_plot(tmp_path / "x.svg", [0.0, 1.0], {"a": [1.0]})


def test_manifest_records_code_version(tmp_path):
    import superkdv

    path = tmp_path / "manifest.json"
    write_manifest({"system": "extended", "seed": 7}, path)
    doc = load_json(path)
    assert doc["code_version"] == superkdv.__version__
    assert doc["seed"] == 7


def test_jsonable_handles_numpy_types():
    doc = jsonable({"a": np.float64(1.5), "b": np.int64(2),
                    "c": np.bool_(True), "d": np.arange(3.0),
                    "e": [np.float32(0.5)]})
    assert doc == {"a": 1.5, "b": 2, "c": True, "d": [0.0, 1.0, 2.0], "e": [0.5]}
    assert isinstance(doc["c"], bool)
