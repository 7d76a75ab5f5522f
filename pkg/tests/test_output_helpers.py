import xml.etree.ElementTree as ET

import numpy as np
import pytest

from nhbdi.csvio import HEADERS, fmt, write_columns
from nhbdi.svg import heatmap, line_plot
from nhbdi.validation import _median_consistent, format_table, run_checks


def test_float_format_round_trips():
    for v in (0.1, 1 / 3, 2.0**-1074, 1e300, -7.25):
        assert float(fmt(v)) == v
    assert fmt(3) == "3" and fmt(np.int64(4)) == "4" and fmt(True) == "true"


def test_write_columns(tmp_path):
    p = write_columns(tmp_path / "x.csv", "pmf", [[0, 1], [0.25, 0.75]], seed=11, trailer=("tail", 0.0))
    assert p.read_text() == "# seed=11\nk,p\n0,0.25\n1,0.75\ntail,0\n"
    with pytest.raises(ValueError):
        write_columns(tmp_path / "y.csv", "pmf", [[0, 1]])
    assert HEADERS["table"] == ["t", "s", "sigma", "n", "l", "m"]


def test_svg_outputs_are_well_formed(tmp_path):
    x = np.linspace(0, 10, 5000)
    line_plot(tmp_path / "a.svg", [(x, np.sin(x), "sin"), (x, np.cos(x), "cos & more")], "t < 1")
    line_plot(tmp_path / "b.svg", [(x, np.exp(-x), "decay")], logy=True)
    line_plot(tmp_path / "c.svg", [(x, np.zeros_like(x), "flat")])
    z = np.outer(np.geomspace(1, 1e-20, 30), np.ones(12))
    heatmap(tmp_path / "d.svg", np.arange(12.0), np.arange(30.0), z)
    for name in "abcd":
        root = ET.parse(tmp_path / f"{name}.svg").getroot()
        assert root.tag.endswith("svg")
    # decimated to a bounded number of vertices
    poly = ET.parse(tmp_path / "a.svg").getroot().find("{http://www.w3.org/2000/svg}polyline")
    assert len(poly.get("points").split()) <= 2000


def test_median_band():
    cdf = np.array([0.1, 0.3, 0.49, 0.51, 0.8, 1.0])
    n = 10**6  # band 0.0015
    assert _median_consistent(cdf, 3, n)
    assert not _median_consistent(cdf, 2, n)
    assert not _median_consistent(cdf, 4, n)
    assert _median_consistent(cdf, 2, 1000)  # band 0.047 covers 0.49


def test_run_checks_selection():
    lines = []
    res = run_checks([4, 8], echo=lines.append)
    assert [r.number for r in res] == [4, 8] and len(lines) == 2
    assert format_table(res).endswith("2/2 checks passed")
