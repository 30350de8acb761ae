"""CSV writer and console summary tests"""
import io
import math

import numpy as np
import pandas as pd
import pytest

from features.models import EdgeRef
from output import (
    NETWORK_COLUMNS, emit, print_summary, read_errors, read_positions,
    write_errors, write_positions, write_sweep,
)
from type_defs import NetworkRecord, Point2, SweepRow
from utils.errors import FormatError, InstanceIOError


def _row(value, objective="qp", mean_pe=0.0123456789012):
    return SweepRow(
        sweep_value=value, variant="", objective=objective, mean_pe=mean_pe, std_pe=0.001,
        mean_solve_time=0.0, mean_iterations=21.5, mean_relative_entropy=math.nan,
        mean_tail_fraction=math.nan, networks_succeeded=2, num_networks=2,
    )


def _record(index, status="Optimal"):
    return NetworkRecord(0.01, "qp", index, 0.02, 0.0, 20, status, seed=7 + index, v=31)


class TestWriteSweep:
    """Summary and network logs"""

    def test_file_names_and_columns(self, tmp_path):
        paths = write_sweep(tmp_path / "out", "noise", [_row(0.01)], [_record(0), _record(1)])
        assert paths["summary"].name == "noise_summary.csv"
        assert paths["networks"].name == "noise_networks.csv"
        summary = pd.read_csv(paths["summary"])
        assert list(summary.columns) == list(SweepRow.__dataclass_fields__)
        networks = pd.read_csv(paths["networks"])
        assert list(networks.columns) == NETWORK_COLUMNS
        assert networks["network_index"].tolist() == [0, 1]

    def test_ten_significant_digits(self, tmp_path):
        paths = write_sweep(tmp_path, "gamma", [_row(1.0)], [])
        line = paths["summary"].read_text(encoding="utf-8").splitlines()[1]
        assert "0.0123456789" in line
        assert "0.01234567890" not in line

    def test_identical_inputs_give_identical_bytes(self, tmp_path):
        rows = [_row(0.0), _row(0.01, objective="ls")]
        records = [_record(0), _record(1, status="Error")]
        a = write_sweep(tmp_path / "a", "noise", rows, records)
        b = write_sweep(tmp_path / "b", "noise", rows, records)
        for key in ("summary", "networks"):
            assert a[key].read_bytes() == b[key].read_bytes()

    def test_empty_sweep_still_has_header(self, tmp_path):
        paths = write_sweep(tmp_path, "range", [], [])
        assert paths["networks"].read_text(encoding="utf-8").strip() == ",".join(NETWORK_COLUMNS)


class TestPositionsAndErrors:
    """Single-instance CSV files"""

    def test_positions(self, tmp_path):
        path = write_positions(tmp_path / "pos.csv", [Point2(0.25, -0.125), Point2(0.0, 0.5)])
        assert path.read_text(encoding="utf-8").splitlines()[0] == "index,x,y"
        np.testing.assert_allclose(read_positions(path), [[0.25, -0.125], [0.0, 0.5]])

    def test_positions_bad_index(self, tmp_path):
        path = tmp_path / "pos.csv"
        path.write_text("index,x,y\n0,0.1,0.2\n2,0.3,0.4\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_positions(path)

    def test_positions_missing_column(self, tmp_path):
        path = tmp_path / "pos.csv"
        path.write_text("index,x\n0,0.1\n", encoding="utf-8")
        with pytest.raises(FormatError) as exc:
            read_positions(path)
        assert exc.value.field == "y"

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceIOError):
            read_errors(tmp_path / "nope.csv")

    def test_errors(self, tmp_path):
        order = [EdgeRef("sensor", 0, 1, 0.3), EdgeRef("anchor", 1, 2, 0.4)]
        path = write_errors(tmp_path / "err.csv", order, [0.001, -0.002])
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "edge_kind,i,j_or_k,error"
        assert lines[1] == "sensor,0,1,0.001"
        assert lines[2] == "anchor,1,2,-0.002"
        np.testing.assert_allclose(read_errors(path), [0.001, -0.002])


class TestConsole:
    """stdout summaries"""

    def test_print_summary(self):
        out = io.StringIO()
        print_summary([_row(0.01)], notes=["note: done"], stream=out)
        text = out.getvalue()
        assert "mean_pe" in text
        assert "0.0123457" in text
        assert text.rstrip().endswith("note: done")

    def test_print_empty_summary(self):
        out = io.StringIO()
        print_summary([], stream=out)
        assert out.getvalue().strip() == "(no results)"

    def test_emit(self):
        out = io.StringIO()
        emit({"status": "Optimal", "iterations": 12, "pe": 1.234567891e-5, "gap": math.nan}, stream=out)
        assert out.getvalue().splitlines() == [
            "status: Optimal", "iterations: 12", "pe: 1.23457e-05", "gap: nan",
        ]
