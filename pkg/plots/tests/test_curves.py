"""Curve-file reading: the preamble, the header, rows, and named errors."""

import numpy as np
import pytest

from tdcplot.curves import HEADER, read_curve
from tdcplot.errors import MalformedCsv


def test_reads_config_label_runs_and_columns(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"constant alpha=0.1 beta=0.02","runs":25,'
        '"steps":100}',
        HEADER,
        "0,4.0,0.5,6.0,0.75",
        "10,2.0,0.25,3.0,0.375",
        "100,1.0,0.125,1.5,0.1875",
    ]) + "\n")
    curve = read_curve(path)
    assert curve.label == "constant alpha=0.1 beta=0.02"
    assert curve.runs == 25
    assert curve.t.tolist() == [0, 10, 100]
    assert curve.mean_theta_sq_err.tolist() == [4.0, 2.0, 1.0]
    assert curve.se_theta_sq_err.tolist() == [0.5, 0.25, 0.125]
    assert curve.mean_z_sq_err.tolist() == [6.0, 3.0, 1.5]
    assert curve.se_z_sq_err.tolist() == [0.75, 0.375, 0.1875]
    assert curve.blocks is None


def test_reads_block_boundaries(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"blockwise","runs":2}',
        "# blocks: 99,389,1131",
        HEADER,
        "0,1.0,0.1,1.0,0.1",
        "99,0.5,0.05,0.5,0.05",
    ]) + "\n")
    curve = read_curve(path)
    assert curve.blocks.tolist() == [99, 389, 1131]


def test_full_precision_floats_round_trip(tmp_path):
    value = 0.1238719873471934
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":1}',
        HEADER,
        f"0,{value!r},0.0,{2 * value!r},0.0",
        f"10,{value / 3!r},0.0,{value / 7!r},0.0",
    ]) + "\n")
    curve = read_curve(path)
    assert curve.mean_theta_sq_err[0] == value
    assert curve.mean_theta_sq_err[1] == value / 3
    assert curve.mean_z_sq_err[1] == value / 7


def test_unknown_comment_lines_are_skipped(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":1}',
        "# produced for a smoke check",
        HEADER,
        "0,1.0,0.0,1.0,0.0",
    ]) + "\n")
    assert read_curve(path).t.tolist() == [0]


def test_missing_config_preamble_is_named(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text(HEADER + "\n0,1.0,0.0,1.0,0.0\n")
    with pytest.raises(MalformedCsv, match=r"curve\.csv:1.*config"):
        read_curve(path)


def test_config_must_be_json(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("# config: {not json}\n" + HEADER + "\n0,1,0,1,0\n")
    with pytest.raises(MalformedCsv, match=r"curve\.csv:1"):
        read_curve(path)


def test_wrong_header_is_named(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":1}',
        "t,mean,se",
        "0,1.0,0.0",
    ]) + "\n")
    with pytest.raises(MalformedCsv, match=r"curve\.csv:2.*header"):
        read_curve(path)


def test_wrong_field_count_is_named(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":1}',
        HEADER,
        "0,1.0,0.0,1.0,0.0",
        "10,1.0,0.0",
    ]) + "\n")
    with pytest.raises(MalformedCsv, match=r"curve\.csv:4.*5 fields"):
        read_curve(path)


def test_unparseable_number_is_named(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":1}',
        HEADER,
        "0,oops,0.0,1.0,0.0",
    ]) + "\n")
    with pytest.raises(MalformedCsv, match=r"curve\.csv:3"):
        read_curve(path)


def test_nonincreasing_time_is_named(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":1}',
        HEADER,
        "0,1.0,0.0,1.0,0.0",
        "10,0.5,0.0,0.5,0.0",
        "10,0.4,0.0,0.4,0.0",
    ]) + "\n")
    with pytest.raises(MalformedCsv, match=r"curve\.csv:5.*increase"):
        read_curve(path)


def test_file_without_rows_is_rejected(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text('# config: {"label":"x","runs":1}\n' + HEADER + "\n")
    with pytest.raises(MalformedCsv, match="no checkpoint rows"):
        read_curve(path)


def test_runs_field_must_be_a_positive_integer(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":0}',
        HEADER,
        "0,1.0,0.0,1.0,0.0",
    ]) + "\n")
    with pytest.raises(MalformedCsv, match="runs"):
        read_curve(path)


def test_arrays_are_read_only_views(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("\n".join([
        '# config: {"label":"x","runs":1}',
        HEADER,
        "0,1.0,0.0,1.0,0.0",
    ]) + "\n")
    curve = read_curve(path)
    with pytest.raises(ValueError):
        curve.t[0] = 5
    assert isinstance(curve.mean_theta_sq_err, np.ndarray)
