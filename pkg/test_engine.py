"""Tests for the reference comparison engine and JSONPath helpers."""

import copy
import json
from pathlib import Path

import pytest
from jsonpath_ng.jsonpath import Child, Fields, Index, Root

from freudsobolev.comparators import check_bound, check_decay_exponent, compare_cell, compare_numbers
from freudsobolev.engine import ReferenceComparisonEngine, compare, select_rows
from freudsobolev.exceptions import ReferenceParseError
from freudsobolev.jsonpath_utils import JSONPathMatcher
from freudsobolev.models import CellStatus, ErrorResponse, TableReport
from freudsobolev.runner import load_reference
from freudsobolev.tables import build_table

REFERENCE_DIR = Path(__file__).parent / "reference"


def _reference():
    return {
        "table_id": 1,
        "key": "M1",
        "tolerances": [{"path": "$.rows[*].eta_5_3", "tolerance": 1e-9}],
        "suspect": [],
        "rows": [
            {"M1": 0.0, "eta_5_2": -0.655248, "eta_5_3": 0.0, "rupture": False},
            {"M1": 0.4, "eta_5_2": -0.371898, "eta_5_3": 0.0, "rupture": True},
        ],
    }


class TestCellComparison:
    """Test cell-by-cell comparison."""

    def setup_method(self):
        self.engine = ReferenceComparisonEngine()
        self.reference = _reference()
        self.computed = copy.deepcopy(self.reference)

    def test_identical(self):
        """Test that an identical document matches."""
        report = self.engine.compare(self.computed, self.reference)
        assert isinstance(report, TableReport)
        assert report.is_match is True
        assert len(report.cells) == 8
        assert all(c.status == CellStatus.MATCH for c in report.cells)

    def test_within_default_tolerance(self):
        """Test that differences below 1e-5 match."""
        self.computed["rows"][0]["eta_5_2"] += 4e-6
        assert self.engine.compare(self.computed, self.reference).is_match

    def test_mismatch(self):
        """Test that a difference above tolerance is reported."""
        self.computed["rows"][1]["eta_5_2"] += 1e-3
        report = self.engine.compare(self.computed, self.reference)
        assert report.is_match is False
        assert [c.path for c in report.mismatches] == ["$.rows[1].eta_5_2"]
        assert "exceeds tolerance" in report.mismatches[0].message

    def test_tolerance_rule(self):
        """Test that a JSONPath rule tightens the tolerance of a column."""
        self.computed["rows"][0]["eta_5_3"] = 1e-7
        report = self.engine.compare(self.computed, self.reference)
        assert [c.path for c in report.mismatches] == ["$.rows[0].eta_5_3"]
        assert report.mismatches[0].tolerance == 1e-9

    def test_tolerance_override(self):
        """Test that an override replaces rules and the default."""
        self.computed["rows"][0]["eta_5_3"] = 1e-7
        self.computed["rows"][1]["eta_5_2"] += 1e-3
        report = ReferenceComparisonEngine(tolerance_override=1e-2).compare(self.computed, self.reference)
        assert report.is_match

    def test_flag_mismatch(self):
        """Test that rupture flags compare exactly."""
        self.computed["rows"][0]["rupture"] = True
        report = self.engine.compare(self.computed, self.reference)
        assert report.mismatches[0].path == "$.rows[0].rupture"
        assert report.mismatches[0].tolerance is None

    def test_missing_cell(self):
        """Test that a cell absent from the computed table is reported."""
        del self.computed["rows"][1]["eta_5_2"]
        report = self.engine.compare(self.computed, self.reference)
        assert report.is_match is False
        assert report.mismatches[0].status == CellStatus.MISSING

    def test_suspect_cell(self):
        """Test that a differing suspect cell does not fail the table."""
        self.reference["suspect"] = [{"path": "$.rows[1].eta_5_2", "reason": "typo in print"}]
        self.computed["rows"][1]["eta_5_2"] += 1e-3
        report = self.engine.compare(self.computed, self.reference)
        assert report.is_match is True
        assert len(report.suspects) == 1
        assert "typo in print" in report.suspects[0].message
        assert report.to_dict()["summary"]["suspect"] == 1

    def test_convenience_function(self):
        """Test the module-level compare()."""
        assert compare(self.computed, self.reference).is_match


class TestErrors:
    """Test malformed inputs."""

    def setup_method(self):
        self.engine = ReferenceComparisonEngine()

    def test_reference_without_rows(self):
        """Test that a reference lacking rows is a parse error."""
        result = self.engine.compare({"rows": []}, {"table_id": 1})
        assert isinstance(result, ErrorResponse)
        assert result.exit_code == 2
        assert result.error["code"] == "REFERENCE_PARSE_ERROR"

    def test_table_id_mismatch(self):
        """Test that comparing table 2 against table 1 is refused."""
        computed = dict(_reference(), table_id=2)
        result = self.engine.compare(computed, _reference())
        assert result.error["code"] == "CONFIGURATION_ERROR"
        assert result.to_dict()["success"] is False

    def test_invalid_rule_path(self):
        """Test that an unparsable rule path is a configuration error."""
        reference = _reference()
        reference["tolerances"] = [{"path": "$.rows[", "tolerance": 1e-3}]
        result = self.engine.compare(copy.deepcopy(reference), reference)
        assert result.exit_code == 2

    def test_rule_without_path(self):
        """Test that rules must name a path."""
        reference = _reference()
        reference["suspect"] = [{"reason": "no path"}]
        assert self.engine.compare(copy.deepcopy(reference), reference).exit_code == 2


class TestSelectRows:
    """Test reference subsetting for single-M1 runs."""

    def test_reindexes_rules(self):
        """Test that concrete rule indices follow the kept rows."""
        reference = load_reference(str(REFERENCE_DIR / "table3.json"))
        subset = select_rows(reference, "M", [10.0])
        assert len(subset["rows"]) == 10
        assert all(row["M"] == 10.0 for row in subset["rows"])
        assert [s["path"] for s in subset["suspect"]] == [
            "$.rows[6].re_root", "$.rows[7].re_root", "$.rows[8].re_root", "$.rows[9].re_root",
        ]
        assert len(reference["rows"]) == 30

    def test_drops_rules_of_removed_rows(self):
        """Test that rules pointing at removed rows disappear and wildcards stay."""
        reference = _reference()
        reference["suspect"] = [{"path": "$.rows[1].eta_5_2", "reason": "x"}]
        subset = select_rows(reference, "M1", [0.0])
        assert subset["suspect"] == []
        assert subset["tolerances"] == reference["tolerances"]

    def test_keeps_everything(self):
        """Test that selecting all rows leaves the reference unchanged."""
        reference = _reference()
        assert select_rows(reference, "M1", [0.0, 0.4]) == reference


class TestJSONPathMatcher:
    """Test JSONPath helpers."""

    def test_canonical_paths(self):
        """Test the '$.rows[i].column' rendering."""
        paths = [p for p, _ in JSONPathMatcher.find_all(_reference(), "$.rows[*].eta_5_2")]
        assert paths == ["$.rows[0].eta_5_2", "$.rows[1].eta_5_2"]

    def test_canonical_from_nodes(self):
        """Test rendering from path nodes rather than their string form."""
        path = Child(Child(Fields("rows"), Index(3)), Fields("eta_5_2"))
        assert JSONPathMatcher.canonical(path) == "$.rows[3].eta_5_2"
        assert JSONPathMatcher.canonical(Child(Root(), Fields("table_id"))) == "$.table_id"

    def test_paths_feed_engine_lookups(self):
        """Test that mismatch paths use the form the CLI diff columns look up."""
        reference = _reference()
        computed = copy.deepcopy(reference)
        computed["rows"][1]["M1"] = 0.5
        report = ReferenceComparisonEngine().compare(computed, reference)
        cells = {c.path: c for c in report.cells}
        assert "$.rows[1].M1" in cells
        assert cells["$.rows[1].M1"].status == CellStatus.MISMATCH

    def test_value_at(self):
        """Test following a path taken from another document."""
        match = JSONPathMatcher.find_matches(_reference(), "$.rows[1].M1")[0]
        assert JSONPathMatcher.value_at({"rows": [{}, {"M1": 7.0}]}, match.full_path) == (True, 7.0)
        assert JSONPathMatcher.value_at({"rows": []}, match.full_path) == (False, None)


class TestComparators:
    """Test scalar comparison helpers."""

    def test_numbers(self):
        """Test tolerance, NaN and exact comparison."""
        assert compare_numbers(1.0, 1.0 + 1e-7, 1e-6)[0]
        assert not compare_numbers(1.0, float("nan"), 1.0)[0]
        assert not compare_numbers(1.0, 1.0 + 1e-12)[0]
        assert not compare_numbers(1.0, "abc", 1.0)[0]

    def test_cells(self):
        """Test dispatch on reference types."""
        assert not compare_cell(None, 1.0, 1e-5)[0]
        assert not compare_cell(1.0, None, 1e-5)[0]
        assert compare_cell(True, True, None)[0]
        assert compare_cell("x", "x", None)[0]

    def test_bounds(self):
        """Test residual bounds and one-sided decay checks."""
        assert check_bound(1e-10, 1e-9)[0]
        assert not check_bound(float("nan"), 1.0)[0]
        assert check_decay_exponent(-2.7, -2.0, 0.5)[0]
        assert not check_decay_exponent(-1.2, -2.0, 0.5)[0]


class TestReferenceFiles:
    """Test the computed tables against the checked-in references."""

    @pytest.mark.parametrize("table_id", [1, 2, 3])
    def test_reference_tables(self, small_ft, table_id):
        """Test that every non-suspect published cell is reproduced."""
        reference = load_reference(str(REFERENCE_DIR / f"table{table_id}.json"))
        report = ReferenceComparisonEngine().compare(build_table(small_ft, table_id), reference)
        assert report.is_match, [c.to_dict() for c in report.mismatches]
        declared = {s["path"] for s in reference["suspect"]}
        assert {c.path for c in report.suspects} <= declared

    def test_missing_reference(self, tmp_path):
        """Test that a missing file raises ReferenceParseError."""
        with pytest.raises(ReferenceParseError):
            load_reference(str(tmp_path / "table9.json"))

    def test_malformed_reference(self, tmp_path):
        """Test that invalid JSON reports its position."""
        target = tmp_path / "table1.json"
        target.write_text('{"table_id": 1,')
        with pytest.raises(ReferenceParseError) as exc:
            load_reference(str(target))
        assert "line 1" in exc.value.reason

    def test_source_recorded(self, tmp_path):
        """Test that the file path is kept under 'source'."""
        target = tmp_path / "table1.json"
        target.write_text(json.dumps(_reference()))
        assert load_reference(str(target))["source"] == str(target)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
