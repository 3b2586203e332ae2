"""
Command-line interface.

Subcommands:
    build        solve the string equation and write the coefficient cache
    table        print Table 1, 2 or 3, with diff columns against reference/
    verify       run property suites, exit 1 on any failure
    export-plot  write columnar data for the zero, polynomial and potential plots

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, TextIO

from .coeffs import build_freud_table
from .engine import ReferenceComparisonEngine, select_rows
from .exceptions import ConfigurationError, FreudSobolevError, ReferenceParseError
from .models import ErrorResponse, LogLevel, OutputFormat, RunConfig
from .runner import TableProvider, load_config, load_reference, reference_path, write_table_cache
from .tables import (
    ZERO_TABLES,
    build_table,
    polynomial_samples,
    potential_samples,
    u_root_rows,
    zero_trajectories,
)
from .utils import format_number, parse_grid, parse_int_range, parse_key_value
from .verify import SUITES, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

PLOT_KINDS = ("zero_trajectories", "polynomials", "u_roots", "potential")

_LOG_LEVELS = {
    LogLevel.DEBUG: logging.DEBUG,
    LogLevel.INFO: logging.INFO,
    LogLevel.WARN: logging.WARNING,
    LogLevel.ERROR: logging.ERROR,
}


def configure_logging(level: LogLevel) -> None:
    """Log to stderr; stdout is reserved for tables and reports."""
    logging.basicConfig(
        level=_LOG_LEVELS[level],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger("freudsobolev").setLevel(_LOG_LEVELS[level])


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to YAML settings file")
    common.add_argument("--n-max", type=int, dest="n_max", help="Largest degree of the coefficient table")
    common.add_argument("--precision", type=int, dest="precision_digits", help="Working precision in digits")
    common.add_argument("--M0", type=float, help="Mass on function values at the origin")
    common.add_argument("--M1", type=float, help="Mass on first derivatives at the origin")
    common.add_argument("--M1-grid", dest="M1_grid", help="Comma separated M1 values, e.g. 0,0.2,2")
    common.add_argument("--n", type=int, help="Degree for single-degree commands")
    common.add_argument("--out", dest="out_path", help="Output file (default: stdout)")
    common.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat])
    common.add_argument("--cache", dest="cache_path", help="Coefficient cache file")
    common.add_argument("--reference-dir", dest="reference_dir", help="Directory holding tableN.json")
    common.add_argument("--tol-override", action="append", default=[], metavar="KEY=VAL",
                        help="Override a tolerance (repeatable)")
    common.add_argument("--full-precision", action="store_true", default=None, dest="full_precision",
                        help="Print full precision instead of 6 decimals")
    common.add_argument("--log-level", dest="log_level", choices=[l.value for l in LogLevel])
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="freudsobolev",
        description="Freud and Freud-Sobolev orthogonal polynomials",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python run_freudsobolev.py build --n-max 250 --cache cache/freud.txt
  python run_freudsobolev.py table --id 1
  python run_freudsobolev.py table --id 3 --emit-json
  python run_freudsobolev.py verify --suite holonomic --n 7 --M1 1
  python run_freudsobolev.py export-plot --kind zero_trajectories --n 5 --M0 1 --M1-grid 0,0.2,2
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common], help="Build and cache the coefficient table")

    table = sub.add_parser("table", parents=[common], help="Reproduce a zero table")
    table.add_argument("--id", type=int, dest="table_id", required=True, choices=(1, 2, 3))
    table.add_argument("--emit-json", action="store_true", help="Emit the table document as JSON")

    verify = sub.add_parser("verify", parents=[common], help="Run property suites")
    verify.add_argument("--suite", action="append", choices=list(SUITES) + ["all"],
                        help="Suite to run (repeatable, default all)")

    plot = sub.add_parser("export-plot", parents=[common], help="Export plot data")
    plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plot.add_argument("--n-odd", dest="n_odd", help="Odd degrees, '1..19' or '1,3,5'")
    plot.add_argument("--points", type=int, default=201, help="Samples for polynomials and potential")
    return parser


def config_from_args(args: argparse.Namespace) -> tuple[RunConfig, Optional[float]]:
    """
    Merge settings file and flags into a RunConfig.

    A 'table' tolerance override is returned separately: it replaces every
    reference-file tolerance rule, not just the default.
    """
    overrides: dict[str, Any] = {
        key: getattr(args, key, None)
        for key in ("n_max", "precision_digits", "M0", "M1", "n", "out_path", "output_format",
                    "cache_path", "reference_dir", "full_precision", "log_level")
    }
    if args.M1_grid:
        overrides["M1_grid"] = parse_grid(args.M1_grid)
    if getattr(args, "n_odd", None):
        overrides["n_odd_range"] = parse_int_range(args.n_odd)

    tolerances = dict(parse_key_value(item) for item in args.tol_override)
    table_override = tolerances.get("table")
    if tolerances:
        overrides["tolerances"] = tolerances
    return load_config(args.config, overrides), table_override


def write_rows(
    header: list[str],
    rows: list[list],
    config: RunConfig,
    stream: Optional[TextIO] = None,
) -> str:
    """Render rows as CSV/TSV with a header row, or JSON records."""
    if config.output_format == OutputFormat.JSON:
        records = [dict(zip(header, row)) for row in rows]
        text = json.dumps(records, indent=2) + "\n"
    else:
        buffer = io.StringIO()
        delimiter = "\t" if config.output_format == OutputFormat.TSV else ","
        writer = csv.writer(buffer, delimiter=delimiter, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else format_number(v, config.full_precision) for v in row])
        text = buffer.getvalue()
    _emit(text, config, stream)
    return text


def _emit(text: str, config: RunConfig, stream: Optional[TextIO]) -> None:
    if config.out_path:
        target = Path(config.out_path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
        logger.info("Wrote %s", target)
    else:
        (stream or sys.stdout).write(text)


def _reference_for(config: RunConfig, table_id: int, M1: Optional[float]) -> Optional[dict]:
    path = reference_path(config, table_id)
    if not path.exists():
        logger.info("No reference file %s, diff columns omitted", path)
        return None
    reference = load_reference(str(path))
    if M1 is not None:
        key = "M1" if table_id in ZERO_TABLES else "M"
        reference = select_rows(reference, key, [M1])
    return reference


def cmd_build(args: argparse.Namespace, config: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Solve for the coefficient table and write the cache."""
    target = config.cache_path or config.out_path
    if not target:
        raise ConfigurationError("build needs --cache or --out")
    table = build_freud_table(
        config.n_max,
        config.precision_digits,
        config.newton_tolerance,
        config.newton_max_iterations,
        config.newton_buffer,
    )
    write_table_cache(table, target)
    (stream or sys.stdout).write(
        f"Built a_n^2 for n <= {table.n_max} at {table.precision_digits} digits -> {target}\n"
    )
    return EXIT_OK


def cmd_table(
    args: argparse.Namespace,
    config: RunConfig,
    table_override: Optional[float] = None,
    stream: Optional[TextIO] = None,
) -> int:
    """Build Table 1, 2 or 3 and compare it with its reference file when present."""
    ft = TableProvider.for_config(config)
    doc = build_table(ft, args.table_id, args.M1, config.full_precision)
    reference = _reference_for(config, args.table_id, args.M1)

    report = None
    if reference is not None:
        engine = ReferenceComparisonEngine(config.tol("table"), table_override)
        report = engine.compare(doc, reference)
        if isinstance(report, ErrorResponse):
            sys.stderr.write(json.dumps(report.to_dict(), indent=2) + "\n")
            return report.exit_code

    if args.emit_json or config.output_format == OutputFormat.JSON:
        payload = dict(doc)
        if report is not None:
            payload["comparison"] = report.to_dict()
        _emit(json.dumps(payload, indent=2) + "\n", config, stream)
    else:
        header, rows = _table_rows(doc, report)
        write_rows(header, rows, config, stream)

    if report is not None and not report.is_match:
        for cell in report.mismatches:
            logger.error("Mismatch %s: %s", cell.path, cell.message)
        return EXIT_FAILED
    return EXIT_OK


def _table_rows(doc: dict, report) -> tuple[list[str], list[list]]:
    columns = list(doc["columns"])
    numeric = [c for c in columns if c not in (doc["key"], "M", "M1", "rupture")]
    diffs = {}
    if report is not None:
        diffs = {cell.path: cell for cell in report.cells}

    header = list(columns)
    if "rupture" in columns:
        header.append("marker")
    if report is not None:
        header.extend(f"{c}_diff" for c in numeric)

    rows = []
    for index, row in enumerate(doc["rows"]):
        line = [row[c] for c in columns]
        if "rupture" in columns:
            line.append("*" if row["rupture"] else "")
        if report is not None:
            for c in numeric:
                cell = diffs.get(f"$.rows[{index}].{c}")
                if cell is None or cell.computed is None:
                    line.append("")
                else:
                    line.append(abs(float(cell.computed) - float(cell.expected)))
        rows.append(line)
    return header, rows


def cmd_verify(args: argparse.Namespace, config: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Run the requested suites; the JSON report goes to --out when given."""
    ft = TableProvider.for_config(config)
    suites = args.suite or ["all"]
    report = run_verification(ft, config, suites, print_report=config.output_format != OutputFormat.JSON)
    if config.output_format == OutputFormat.JSON or config.out_path:
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", config, stream)
    return EXIT_OK if report.failed == 0 else EXIT_FAILED


def cmd_export_plot(args: argparse.Namespace, config: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Write plot data for one of PLOT_KINDS."""
    ft = TableProvider.for_config(config)
    if args.kind == "zero_trajectories":
        header, rows = zero_trajectories(ft, config.n, config.M0, config.M1_grid)
    elif args.kind == "polynomials":
        header, rows = polynomial_samples(ft, config.n, config.params, points=args.points)
    elif args.kind == "u_roots":
        header, rows = u_root_rows(ft, config.M1, config.n_odd_range)
    else:
        if config.n % 2 == 0:
            raise ConfigurationError("potential needs an odd --n", {"n": config.n})
        header, rows = potential_samples(ft, config.n, config.params, points=args.points)
    write_rows(header, rows, config, stream)
    return EXIT_OK


def main(argv: Optional[list[str]] = None, stream: Optional[TextIO] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config, table_override = config_from_args(args)
    except FreudSobolevError as e:
        sys.stderr.write(f"Error: {e}\n")
        return EXIT_USAGE
    configure_logging(config.log_level)

    try:
        if args.command == "build":
            return cmd_build(args, config, stream)
        if args.command == "table":
            return cmd_table(args, config, table_override, stream)
        if args.command == "verify":
            return cmd_verify(args, config, stream)
        return cmd_export_plot(args, config, stream)
    except (ConfigurationError, ReferenceParseError) as e:
        sys.stderr.write(f"Error: {e}\n")
        return EXIT_USAGE
    except FreudSobolevError as e:
        logger.error("Numeric failure: %s", e)
        sys.stderr.write(f"Error: {e}\n")
        return EXIT_NUMERIC
