"""Comparison engine for computed tables against checked-in reference tables."""

from __future__ import annotations

import copy
import logging
import time
from datetime import datetime, timezone
from typing import Any, Iterable, Optional

from .comparators import compare_cell
from .exceptions import ConfigurationError, ReferenceParseError
from .jsonpath_utils import JSONPathMatcher
from .models import CellDiff, CellStatus, ErrorResponse, ExecutionInfo, TableReport

logger = logging.getLogger(__name__)

CELL_PATH = "$.rows[*].*"


class ReferenceComparisonEngine:
    """
    Compares a computed table document with its reference in three stages:

    1. Reference validation: required keys and row layout
    2. Rule resolution: per-cell tolerances and suspect cells from JSONPath rules
    3. Cell comparison: every reference cell looked up in the computed document
    """

    VERSION = "1.0.0"

    def __init__(self, default_tolerance: float = 1e-5, tolerance_override: Optional[float] = None):
        """
        Initialize the engine.

        Args:
            default_tolerance: Absolute tolerance for cells without a rule
            tolerance_override: When set, replaces every tolerance, rules included
        """
        self.default_tolerance = default_tolerance
        self.tolerance_override = tolerance_override

    def compare(self, computed: dict, reference: dict) -> TableReport | ErrorResponse:
        """
        Compare a computed table with its reference.

        Returns:
            TableReport on success, ErrorResponse on malformed input
        """
        start_time = time.time()

        try:
            self._validate(computed, reference)
            tolerances = self._resolve_rules(reference, "tolerances", "tolerance")
            suspects = self._resolve_rules(reference, "suspect", "reason")

            cells = []
            for match in JSONPathMatcher.find_matches(reference, CELL_PATH):
                path = JSONPathMatcher.canonical(match.full_path)
                tolerance = self._tolerance_for(path, tolerances, match.value)
                found, value = JSONPathMatcher.value_at(computed, match.full_path)
                cells.append(self._compare_cell(path, match.value, found, value, tolerance, suspects.get(path)))

            report = TableReport(
                table_id=int(reference["table_id"]),
                is_match=not any(c.status in (CellStatus.MISMATCH, CellStatus.MISSING) for c in cells),
                execution=ExecutionInfo(
                    duration_ms=int((time.time() - start_time) * 1000),
                    timestamp=datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
                    engine_version=self.VERSION,
                ),
                cells=cells,
            )
            for cell in report.suspects:
                logger.warning("Suspect reference cell %s: %s", cell.path, cell.message)
            return report

        except ReferenceParseError as e:
            return self._create_error_response(
                "REFERENCE_PARSE_ERROR",
                str(e),
                {"path": e.path, "reason": e.reason},
                exit_code=2,
            )
        except (ConfigurationError, ValueError) as e:
            return self._create_error_response(
                "CONFIGURATION_ERROR",
                str(e),
                getattr(e, "details", {}),
                exit_code=2,
            )
        except Exception as e:
            return self._create_error_response(
                "PROCESSING_ERROR",
                str(e),
                {"type": type(e).__name__},
                exit_code=3,
            )

    def _validate(self, computed: Any, reference: Any) -> None:
        source = reference.get("source", "<reference>") if isinstance(reference, dict) else "<reference>"
        if not isinstance(reference, dict):
            raise ReferenceParseError(source, "reference must be an object")
        for key in ("table_id", "rows"):
            if key not in reference:
                raise ReferenceParseError(source, f"missing key '{key}'")
        if not isinstance(reference["rows"], list) or not all(isinstance(r, dict) for r in reference["rows"]):
            raise ReferenceParseError(source, "'rows' must be a list of objects")
        if not isinstance(computed, dict) or "rows" not in computed:
            raise ConfigurationError("Computed table must be an object with 'rows'")
        if int(computed.get("table_id", reference["table_id"])) != int(reference["table_id"]):
            raise ConfigurationError(
                "Computed and reference tables differ in table_id",
                {"computed": computed.get("table_id"), "reference": reference["table_id"]},
            )

    def _resolve_rules(self, reference: dict, section: str, field: str) -> dict[str, Any]:
        """Expand JSONPath rules of a section into {concrete cell path: field value}."""
        resolved: dict[str, Any] = {}
        for rule in reference.get(section, []):
            if "path" not in rule:
                raise ReferenceParseError(reference.get("source", "<reference>"), f"{section} rule without 'path'")
            for path, _ in JSONPathMatcher.find_all(reference, rule["path"]):
                resolved[path] = rule.get(field)
        return resolved

    def _tolerance_for(self, path: str, tolerances: dict[str, Any], expected: Any) -> Optional[float]:
        if isinstance(expected, bool):
            return None
        if self.tolerance_override is not None:
            return self.tolerance_override
        rule = tolerances.get(path)
        return float(rule) if rule is not None else self.default_tolerance

    def _compare_cell(
        self,
        path: str,
        expected: Any,
        found: bool,
        computed: Any,
        tolerance: Optional[float],
        suspect_reason: Optional[str],
    ) -> CellDiff:
        if not found:
            return CellDiff(path, CellStatus.MISSING, expected, None, tolerance, "No computed value at path")
        is_match, message = compare_cell(expected, computed, tolerance)
        if is_match:
            return CellDiff(path, CellStatus.MATCH, expected, computed, tolerance)
        if suspect_reason is not None:
            return CellDiff(path, CellStatus.SUSPECT, expected, computed, tolerance,
                            f"{message}; {suspect_reason}")
        return CellDiff(path, CellStatus.MISMATCH, expected, computed, tolerance, message)

    def _create_error_response(self, code: str, message: str, details: dict, exit_code: int) -> ErrorResponse:
        """Create an error response."""
        return ErrorResponse(
            success=False,
            error={
                "code": code,
                "message": message,
                "details": details,
            },
            exit_code=exit_code,
        )


def select_rows(reference: dict, key: str, values: Iterable[Any]) -> dict:
    """Copy of the reference keeping only rows whose `key` is in `values`; rules are re-indexed away."""
    wanted = list(values)
    subset = copy.deepcopy(reference)
    kept = [row for row in reference["rows"] if row.get(key) in wanted]
    if len(kept) != len(reference["rows"]):
        index_map = {}
        for new_index, row in enumerate(kept):
            index_map[reference["rows"].index(row)] = new_index
        subset["suspect"] = _reindex(reference.get("suspect", []), index_map)
        subset["tolerances"] = _reindex(reference.get("tolerances", []), index_map)
    subset["rows"] = copy.deepcopy(kept)
    return subset


def _reindex(rules: list[dict], index_map: dict[int, int]) -> list[dict]:
    out = []
    for rule in rules:
        path = rule.get("path", "")
        if "[*]" in path or "[" not in path:
            out.append(dict(rule))
            continue
        head, _, tail = path.partition("[")
        index, _, rest = tail.partition("]")
        if index.isdigit() and int(index) in index_map:
            out.append(dict(rule, path=f"{head}[{index_map[int(index)]}]{rest}"))
    return out


def compare(
    computed: dict,
    reference: dict,
    default_tolerance: float = 1e-5,
    tolerance_override: Optional[float] = None,
) -> TableReport | ErrorResponse:
    """
    Convenience function to compare a computed table with its reference.

    Args:
        computed: Table document built by freudsobolev.tables
        reference: Parsed reference file
        default_tolerance: Absolute tolerance for cells without a rule
        tolerance_override: Replaces every tolerance when set

    Returns:
        TableReport on success, ErrorResponse on errors
    """
    engine = ReferenceComparisonEngine(default_tolerance, tolerance_override)
    return engine.compare(computed, reference)
