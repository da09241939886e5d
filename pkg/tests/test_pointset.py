import struct

import numpy as np
import pytest

from circjl.errors import PointSetParseError
from circjl.pointset import detect_format, read_points, write_points


def test_binary_layout_exact(tmp_path):
    data = np.array([[1.0, -2.5], [3.25, 0.0], [1e-300, 7.0]])
    p = tmp_path / "pts.cjl"
    write_points(p, data, "binary")
    raw = p.read_bytes()
    assert raw[:4] == b"CJL1"
    assert struct.unpack("<II", raw[4:12]) == (2, 3)
    assert raw[12:] == struct.pack("<6d", *data.ravel())


def test_binary_round_trip_bit_identical(tmp_path):
    data = np.random.default_rng(0).standard_normal((7, 5))
    p = tmp_path / "pts.bin"
    write_points(p, data, "binary")
    back = read_points(p)
    assert back.tobytes() == data.tobytes()


def test_csv_and_binary_agree(tmp_path):
    data = np.random.default_rng(1).standard_normal((4, 3))
    write_points(tmp_path / "a.csv", data, "csv")
    write_points(tmp_path / "a.bin", data, "binary")
    assert detect_format(tmp_path / "a.csv") == "csv"
    assert detect_format(tmp_path / "a.bin") == "binary"
    assert np.array_equal(read_points(tmp_path / "a.csv"), read_points(tmp_path / "a.bin"))


def test_csv_errors_report_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2,3\n4,5\n")
    with pytest.raises(PointSetParseError) as err:
        read_points(p, "csv")
    assert err.value.location == "line 2"
    p.write_text("1,2\nx,3\n")
    with pytest.raises(PointSetParseError, match="line 2"):
        read_points(p, "csv")


def test_binary_errors_report_offset(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"CJL1" + struct.pack("<II", 2, 2) + b"\x00" * 20)
    with pytest.raises(PointSetParseError) as err:
        read_points(p, "binary")
    assert err.value.location.startswith("byte")
    p.write_bytes(b"XXXX" + struct.pack("<II", 1, 1) + b"\x00" * 8)
    with pytest.raises(PointSetParseError, match="magic"):
        read_points(p, "binary")
    p.write_bytes(b"CJL")
    with pytest.raises(PointSetParseError, match="truncated"):
        read_points(p, "binary")
