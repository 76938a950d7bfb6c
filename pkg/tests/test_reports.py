import json
import math

import numpy as np
import pytest

from hardycomp.reports import comparable, dumps, jsonable, read_csv, write_csv, write_json


def test_jsonable_conversions():
    data = {"a": np.float64(1.5), "b": np.arange(3), "c": 1 + 2j, "d": float("nan"),
            "e": (np.bool_(True), np.int64(4)), 3: [np.inf]}
    out = jsonable(data)
    assert out == {"a": 1.5, "b": [0, 1, 2], "c": [1.0, 2.0], "d": None, "e": [True, 4],
                   "3": [None]}
    json.dumps(out, allow_nan=False)


def test_dumps_sorted_and_stable():
    assert dumps({"b": 1, "a": 2}) == dumps({"a": 2, "b": 1})


def test_comparable_drops_timestamp():
    assert comparable({"x": 1, "timestamp": {"t": 2}}) == {"x": 1}


def test_csv_roundtrip(tmp_path):
    path = write_csv(tmp_path / "sub" / "t.csv", ["x", "y"], [(0.1, 2), (math.pi, 3)])
    assert path.read_bytes().count(b"\r\n") == 3
    header, rows = read_csv(path)
    assert header == ["x", "y"]
    assert float(rows[1][0]) == math.pi


def test_write_json(tmp_path):
    p = write_json(tmp_path / "a" / "b.json", {"v": np.float32(0.5)})
    assert json.loads(p.read_text())["v"] == pytest.approx(0.5)


def test_plot_csv(tmp_path):
    pytest.importorskip("matplotlib")
    from hardycomp.plotting import plot_csv
    path = write_csv(tmp_path / "d.csv", ["x", "y", "g"], [(1, 2, 0), (2, 3, 0), (1, 1, 1)])
    assert plot_csv(path, "x", "y", group="g").exists()
    assert plot_csv(path, "x", "y", reduce="max", logy=True).suffix == ".png"
    assert plot_csv(path, "x", "y", kind="bar", title="t").exists()
