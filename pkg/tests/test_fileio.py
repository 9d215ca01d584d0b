import json

import numpy as np
import pytest

from pfacorr.errors import DomainError
from pfacorr.fileio import (RunManifest, fmt, format_table, read_csv, read_curve_csv, sha256_file,
                            write_csv, write_curve_csv)
from pfacorr.pade import EnergyCurve


def test_fmt_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(1 / 3, 6) == "0.333333"
    assert fmt(None) == "" and fmt(float("nan")) == ""
    assert fmt(7) == "7" and fmt(True) == "true"


def test_curve_round_trip(tmp_path):
    x = np.linspace(0.1, 1.0, 7)
    curve = EnergyCurve(x, 1 + x / 3, provenance="oracle", error=1e-6 * x)
    path = write_curve_csv(tmp_path / "c.csv", curve)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# provenance") and lines[1] == "d_over_R,E_over_EPFA,error"
    back = read_curve_csv(path)
    assert np.allclose(back.ratio, curve.ratio, rtol=1e-12)
    assert np.allclose(back.error, curve.error, rtol=1e-12)


def test_curve_csv_requires_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0.1,1\n")
    with pytest.raises(DomainError):
        read_curve_csv(path)


def test_csv_gaps_and_strings(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["bc", "v"], [("D", 1.5), ("N", None)])
    header, cols = read_csv(path)
    assert header == ["bc", "v"] and cols["bc"] == ["D", "N"]
    assert cols["v"][0] == 1.5 and np.isnan(cols["v"][1])


def test_table_gap_marker():
    text = format_table(["a", "b"], [("x", None), ("y", 2.0)])
    assert "--" in text.splitlines()[2]


def test_manifest_digests(tmp_path):
    out = tmp_path / "o.txt"
    out.write_text("hello\n")
    m = RunManifest(command="demo", parameters={"n": np.int64(3), "x": np.array([1.0])})
    m.add_output(out)
    m.add_fixture("input", out)
    data = json.loads(m.write(tmp_path).read_text())
    assert data["outputs"]["o.txt"] == sha256_file(out)
    assert data["parameters"] == {"n": 3, "x": [1.0]}
