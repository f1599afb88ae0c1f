import math

import numpy as np
import pytest

from homog1d.errors import ConfigError
from homog1d.output import (
    format_value,
    svg_lines,
    svg_loglog,
    write_csv,
)


def test_format_floats_round_trip():
    for x in (math.pi, 1e-300, 0.1, -2.5e17, 1 / 3):
        assert float(format_value(x)) == x


def test_format_other_types():
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(42) == "42"
    assert format_value("raw") == "raw"


def test_write_csv_deterministic(tmp_path):
    rows = [(0.1, 1 / 3, "raw"), (0.2, math.pi, "averaged")]
    p1 = write_csv(tmp_path / "a.csv", ("x", "v", "kind"), rows)
    p2 = write_csv(tmp_path / "b.csv", ("x", "v", "kind"), rows)
    b1, b2 = p1.read_bytes(), p2.read_bytes()
    assert b1 == b2
    assert b1.endswith(b"\n")
    assert b1.decode("ascii").splitlines()[0] == "x,v,kind"


def test_write_csv_creates_parents(tmp_path):
    p = write_csv(tmp_path / "deep" / "dir" / "c.csv", ("a",), [(1,)])
    assert p.exists()


def test_svg_loglog_basic():
    pts = [(1 / 8, 1e-2), (1 / 16, 5e-3), (1 / 32, 2.5e-3)]
    text = svg_loglog([("raw", pts, (1.0, np.log(8e-2)))])
    assert text.startswith("<svg")
    assert "raw" in text
    assert "</svg>" in text


def test_svg_loglog_rejects_empty():
    with pytest.raises(ConfigError):
        svg_loglog([])
    with pytest.raises(ConfigError):
        svg_loglog([("raw", [(1 / 8, 0.0)], None)])


def test_svg_lines_basic():
    xs = np.linspace(0, 1, 11)
    text = svg_lines([("u", xs, np.sin(np.pi * xs))])
    assert text.startswith("<svg")
    assert "polyline" in text


def test_svg_lines_rejects_empty():
    with pytest.raises(ConfigError):
        svg_lines([])
