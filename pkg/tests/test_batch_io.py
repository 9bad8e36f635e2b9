"""Batch reading/writing and compliance-report tests."""

import json
import math
import random

import pytest

from conftest import HEMOGLOBIN_TEXT, TRAFFIC_TEXT
from shield import (
    EmptyFileError,
    InternalGuaranteeError,
    NonNumericCellError,
    WidthMismatchError,
    build_report,
    check_batch,
    count_violations,
    parse_requirements,
    read_batch,
    write_batch,
    write_report,
)
from shield.batch import PredictionBatch


class TestReadWrite:
    def test_minimal_file_with_header(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("y_0,y_1\n0.1,0.9\n")
        batch = read_batch(path)
        assert batch.names == ["y_0", "y_1"]
        assert batch.rows == [[0.1, 0.9]]
        assert batch.width == 2

    def test_headerless(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("0.25,0.75\n1,2\n")
        batch = read_batch(path)
        assert batch.names is None
        assert len(batch) == 2

    def test_traffic_column_names(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("TrafficLight,Red,Yellow,Green\n0.9,0.4,0.3,0.2\n")
        batch = read_batch(path)
        assert batch.names == ["TrafficLight", "Red", "Yellow", "Green"]
        assert batch.width == 4

    def test_width_mismatch_row_number(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("0.1,0.9\n0.2\n")
        with pytest.raises(WidthMismatchError) as exc:
            read_batch(path)
        assert exc.value.row == 2

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("0.1,0.9\n0.2,oops\n")
        with pytest.raises(NonNumericCellError) as exc:
            read_batch(path)
        assert (exc.value.row, exc.value.column) == (2, 2)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("0.1,0.9\ninf,0.2\n")
        with pytest.raises(NonNumericCellError):
            read_batch(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("")
        with pytest.raises(EmptyFileError):
            read_batch(path)

    def test_expected_width_enforced(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("0.1,0.9\n")
        with pytest.raises(WidthMismatchError):
            read_batch(path, expected_width=3)

    def test_round_trip_bit_exact(self, tmp_path):
        rng = random.Random(17)
        rows = [
            [rng.uniform(-1e6, 1e6) for _ in range(5)],
            [0.1 + 0.2, 1e-300, -math.pi, 2**52 + 0.5, -0.0],
        ]
        batch = PredictionBatch(rows, names=[f"y_{k}" for k in range(5)])
        path = tmp_path / "b.csv"
        write_batch(batch, path)
        again = read_batch(path)
        assert again.names == batch.names
        assert again.rows == rows

    def test_header_only_round_trip(self, tmp_path):
        batch = PredictionBatch([], names=["a", "b"])
        path = tmp_path / "b.csv"
        write_batch(batch, path)
        again = read_batch(path)
        assert again.names == ["a", "b"]
        assert again.rows == []


class TestViolationCounting:
    def test_traffic_row_violates_only_first_clause(self):
        rs = parse_requirements(TRAFFIC_TEXT, 4)
        counts = count_violations(rs, PredictionBatch([[0.9, 0.4, 0.3, 0.2]]))
        assert counts == [1, 0, 0, 0]

    def test_compliant_batch_all_zero(self):
        rs = parse_requirements(TRAFFIC_TEXT, 4)
        counts = count_violations(rs, PredictionBatch([[0.9, 0.8, 0.1, 0.2], [0.1, 0.1, 0.1, 0.1]]))
        assert counts == [0, 0, 0, 0]

    def test_linear_example_counts(self):
        rs = parse_requirements(HEMOGLOBIN_TEXT, 4)
        counts = count_violations(rs, PredictionBatch([[10.0, 12.0, 38.0, 37.0]]))
        assert counts == [1, 0]

    def test_equality_counts_both_sides(self):
        rs = parse_requirements("y_0 = 1\n", 1)
        counts = count_violations(rs, PredictionBatch([[2.0], [1.0], [0.5]]))
        assert counts == [2]

    def test_tolerance(self):
        rs = parse_requirements("y_0 >= 1\n", 1)
        batch = PredictionBatch([[1.0 - 1e-12]])
        assert count_violations(rs, batch) == [0]
        assert count_violations(rs, batch, tolerance=0.0) == [1]


class TestReports:
    def test_check_report_after_equals_before(self):
        rs = parse_requirements(TRAFFIC_TEXT, 4)
        report = check_batch(rs, PredictionBatch([[0.9, 0.4, 0.3, 0.2]]))
        assert report.mode == "check"
        stat = report.requirements[0]
        assert (stat.violations_before, stat.violations_after) == (1, 1)
        assert report.total_rows == 1
        assert report.rows_already_compliant == 0

    def test_apply_report_counts_and_distances(self):
        rs = parse_requirements(HEMOGLOBIN_TEXT, 4)
        before = PredictionBatch([[10.0, 12.0, 38.0, 37.0], [12.0, 10.0, 38.0, 37.0]])
        after = PredictionBatch([[10.0, 10.0, 38.0, 37.0], [12.0, 10.0, 38.0, 37.0]])
        report = build_report(rs, {"engine": "linear"}, before, after)
        assert report.requirements[0].violations_before == 1
        assert report.requirements[0].violations_after == 0
        assert report.rows_corrected == 1
        assert report.rows_already_compliant == 1
        row0 = report.rows[0]
        assert (row0.l1, row0.linf, row0.changed) == (2.0, 2.0, 1)

    def test_report_asserts_zero_after(self):
        rs = parse_requirements(HEMOGLOBIN_TEXT, 4)
        bad = PredictionBatch([[10.0, 12.0, 38.0, 37.0]])
        with pytest.raises(InternalGuaranteeError):
            build_report(rs, {}, bad, bad)

    def test_json_schema(self, tmp_path):
        rs = parse_requirements(HEMOGLOBIN_TEXT, 4)
        before = PredictionBatch([[10.0, 12.0, 38.0, 37.0]])
        after = PredictionBatch([[10.0, 10.0, 38.0, 37.0]])
        report = build_report(rs, {"engine": "linear"}, before, after)
        path = tmp_path / "report.json"
        write_report(report, path)
        data = json.loads(path.read_text())
        assert data["schema_version"] == 1
        assert data["mode"] == "apply"
        assert data["plan"] == {"engine": "linear"}
        assert data["totals"]["rows"] == 1
        assert data["totals"]["rows_corrected"] == 1
        assert data["totals"]["violations_after"] == 0
        assert data["requirements"][0]["source_line"] == 1
        assert data["requirements"][0]["text"] == "y_0 - y_1 >= 0.0"
        assert data["rows"][0]["l1"] == 2.0
