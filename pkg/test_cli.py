"""Tests for the command-line interface, settings and the coefficient cache."""

import io
import json
from pathlib import Path

import numpy as np
import pytest

from freudsobolev.cli import build_parser, main
from freudsobolev.exceptions import ConfigurationError
from freudsobolev.models import OutputFormat
from freudsobolev.runner import TableProvider, load_config, read_table_cache, write_table_cache
from freudsobolev.utils import (
    format_number,
    loglog_slope,
    parse_grid,
    parse_int_range,
    parse_key_value,
    round_half,
    semilog_slope,
)

ROOT = Path(__file__).parent
SMALL = ["--n-max", "30", "--precision", "30", "--reference-dir", str(ROOT / "reference")]


def _run(*argv):
    stream = io.StringIO()
    code = main(list(argv) + SMALL, stream=stream)
    return code, stream.getvalue()


class TestTableCommand:
    """Test the table subcommand."""

    def test_single_row_csv(self):
        """Test Table 1 at M1 = 0 with diff columns."""
        code, out = _run("table", "--id", "1", "--M1", "0")
        assert code == 0
        header, row = [line.split(",") for line in out.strip().splitlines()]
        assert header[:8] == ["M1", "eta_5_2", "eta_4_2", "eta_5_3", "eta_4_3", "eta_5_4", "rupture", "marker"]
        assert "eta_5_2_diff" in header
        assert float(row[header.index("eta_5_2_diff")]) <= 1e-5
        assert row[1] == "-0.655248"
        assert row[6] == "false" and row[7] == ""

    def test_rupture_marker(self):
        """Test that rows without interlacing are starred."""
        code, out = _run("table", "--id", "2", "--M1", "0.9")
        assert code == 0
        row = out.strip().splitlines()[1].split(",")
        assert row[6] == "true" and row[7] == "*"

    def test_emit_json(self):
        """Test the JSON document with the comparison attached."""
        code, out = _run("table", "--id", "1", "--M1", "0.2", "--emit-json")
        payload = json.loads(out)
        assert code == 0
        assert payload["rows"][0]["eta_5_2"] == pytest.approx(-0.458455, abs=1e-6)
        assert payload["comparison"]["is_match"] is True

    def test_mismatch_exit_code(self, tmp_path):
        """Test exit 1 on a reference mismatch and the table override."""
        reference = json.loads((ROOT / "reference" / "table1.json").read_text())
        reference["rows"][0]["eta_5_2"] = -0.6
        (tmp_path / "table1.json").write_text(json.dumps(reference))
        args = ["table", "--id", "1", "--M1", "0", "--n-max", "30", "--precision", "30",
                "--reference-dir", str(tmp_path)]
        assert main(args, stream=io.StringIO()) == 1
        assert main(args + ["--tol-override", "table=0.1"], stream=io.StringIO()) == 0

    def test_without_reference(self, tmp_path):
        """Test that a missing reference drops the diff columns."""
        args = ["table", "--id", "3", "--M1", "1", "--n-max", "30", "--precision", "30",
                "--reference-dir", str(tmp_path)]
        stream = io.StringIO()
        assert main(args, stream=stream) == 0
        lines = stream.getvalue().strip().splitlines()
        assert lines[0] == "degree,M,re_root,im_root"
        assert len(lines) == 11


class TestUsageErrors:
    """Test exit code 2 paths."""

    def test_bad_tolerance_override(self):
        """Test that KEY=VAL is required."""
        assert _run("table", "--id", "1", "--tol-override", "table")[0] == 2

    def test_unknown_tolerance_key(self):
        """Test that tolerance keys are validated."""
        assert _run("table", "--id", "1", "--tol-override", "nonsense=1")[0] == 2

    def test_unknown_setting(self, tmp_path):
        """Test that a settings file with an unknown key is refused."""
        settings = tmp_path / "settings.yaml"
        settings.write_text("n_max: 30\nsurprise: 1\n")
        assert _run("table", "--id", "1", "--config", str(settings))[0] == 2

    def test_potential_needs_odd_degree(self):
        """Test that the potential export rejects even n."""
        assert _run("export-plot", "--kind", "potential", "--n", "4")[0] == 2

    def test_build_needs_target(self):
        """Test that build without --cache or --out is a usage error."""
        assert _run("build")[0] == 2

    def test_argparse_errors(self):
        """Test that a missing --id exits through argparse."""
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["table"])
        assert exc.value.code == 2


class TestExportPlot:
    """Test the plot data exports."""

    def test_polynomials_odd_symmetry(self):
        """Test F_5 and Q_5 are odd on the symmetric grid."""
        code, out = _run("export-plot", "--kind", "polynomials", "--n", "5", "--points", "11", "--format", "json")
        records = json.loads(out)
        assert code == 0
        assert len(records) == 11
        f = np.array([r["F_n"] for r in records])
        q = np.array([r["Q_n"] for r in records])
        np.testing.assert_allclose(f, -f[::-1], atol=1e-12)
        np.testing.assert_allclose(q, -q[::-1], atol=1e-12)

    def test_zero_trajectories(self):
        """Test one row per zero and grid value."""
        code, out = _run("export-plot", "--kind", "zero_trajectories", "--n", "5", "--M1-grid", "0,0.2,2",
                         "--format", "tsv")
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0] == "M1\tk\teta"
        assert len(lines) == 1 + 3 * 5

    def test_u_roots(self):
        """Test the biquartic root rows for a degree range."""
        code, out = _run("export-plot", "--kind", "u_roots", "--M1", "1", "--n-odd", "1..9")
        lines = out.strip().splitlines()
        assert code == 0
        assert [line.split(",")[1] for line in lines[1:]] == ["1", "3", "5", "7", "9"]

    def test_potential(self, tmp_path):
        """Test the potential export written to a file."""
        target = tmp_path / "potential.csv"
        code, out = _run("export-plot", "--kind", "potential", "--n", "5", "--points", "50", "--out", str(target))
        assert code == 0 and out == ""
        lines = target.read_text().strip().splitlines()
        assert lines[0] == "x,V_ext"
        assert 40 <= len(lines) - 1 <= 50


class TestVerifyCommand:
    """Test the verify subcommand."""

    def test_freud_suite(self, tmp_path):
        """Test a passing suite with a JSON report."""
        target = tmp_path / "report.json"
        args = ["verify", "--suite", "freud", "--n-max", "60", "--precision", "30", "--out", str(target)]
        assert main(args, stream=io.StringIO()) == 0
        report = json.loads(target.read_text())
        assert report["summary"]["failed"] == 0
        assert report["summary"]["total_checks"] > 0
        assert {r["suite"] for r in report["results"]} == {"freud"}


class TestConfig:
    """Test settings loading."""

    def test_settings_file(self):
        """Test the checked-in settings.yaml."""
        config = load_config(str(ROOT / "settings.yaml"))
        assert config.n_max == 250
        assert config.output_format == OutputFormat.CSV
        assert config.tol("ode") == 1e-7
        assert config.tol("five_term") == 1e-9

    def test_overrides_win(self):
        """Test that explicit overrides replace file values."""
        config = load_config(str(ROOT / "settings.yaml"), {"n_max": 40, "M1": None})
        assert config.n_max == 40
        assert config.M1 == 1.0

    def test_missing_file(self, tmp_path):
        """Test that a missing settings file is reported."""
        with pytest.raises(ConfigurationError):
            load_config(str(tmp_path / "absent.yaml"))

    def test_invalid_values(self):
        """Test validation of masses and enums."""
        with pytest.raises(ConfigurationError):
            load_config(overrides={"M1": -1.0})
        with pytest.raises(ConfigurationError):
            load_config(overrides={"output_format": "xml"})


class TestCache:
    """Test the coefficient cache."""

    def test_round_trip(self, small_ft, tmp_path):
        """Test that the cache restores the table."""
        target = tmp_path / "cache" / "a_sq.txt"
        write_table_cache(small_ft, str(target))
        restored = read_table_cache(str(target))
        assert restored.n_max == small_ft.n_max
        assert restored.method_tag == small_ft.method_tag
        np.testing.assert_allclose(restored.a_sq, small_ft.a_sq, rtol=1e-15)
        np.testing.assert_allclose(restored.norm_sq, small_ft.norm_sq, rtol=1e-14)
        np.testing.assert_allclose(restored.gamma, small_ft.gamma, rtol=1e-14)

    def test_columns_rewrite_exactly(self, small_ft, tmp_path):
        """Test that every stored decimal survives a read and a second write unchanged."""
        first, second = tmp_path / "first.txt", tmp_path / "second.txt"
        write_table_cache(small_ft, str(first))
        write_table_cache(read_table_cache(str(first)), str(second))
        assert first.read_text() == second.read_text()
        lines = first.read_text().splitlines()
        assert "columns n a_sq norm_sq gamma" in lines
        rows = [line.split() for line in lines if line.split()[0].isdigit()]
        assert len(rows) == small_ft.n_max + 1
        assert all(len(row) == 4 for row in rows)
        assert float(rows[5][2]) == pytest.approx(small_ft.norm_sq[5], rel=1e-15)
        assert float(rows[5][3]) == pytest.approx(small_ft.gamma[5], rel=1e-15)

    def test_inconsistent_columns(self, small_ft, tmp_path):
        """Test that a norm_sq column not matching a_sq is refused."""
        target = tmp_path / "a_sq.txt"
        write_table_cache(small_ft, str(target))
        lines = target.read_text().splitlines()
        index = next(i for i, line in enumerate(lines) if line.startswith("3 "))
        n, a_sq, norm_sq, gamma = lines[index].split()
        lines[index] = " ".join([n, a_sq, repr(2.0 * float(norm_sq)), gamma])
        target.write_text("\n".join(lines) + "\n")
        with pytest.raises(ConfigurationError):
            read_table_cache(str(target))

    def test_not_a_cache(self, tmp_path):
        """Test that foreign files are refused."""
        target = tmp_path / "other.txt"
        target.write_text("hello\n")
        with pytest.raises(ConfigurationError):
            read_table_cache(str(target))

    def test_build_and_reuse(self, tmp_path):
        """Test that build writes a cache the provider then reads."""
        target = tmp_path / "a_sq.txt"
        assert _run("build", "--cache", str(target))[0] == 0
        config = load_config(overrides={"n_max": 20, "precision_digits": 20, "cache_path": str(target)})
        table = TableProvider(config).table
        assert table.n_max == 30


class TestUtils:
    """Test argument parsing helpers."""

    def test_parse_grid(self):
        assert parse_grid("0, 0.2,2") == [0.0, 0.2, 2.0]
        with pytest.raises(ConfigurationError):
            parse_grid("0,a")

    def test_parse_int_range(self):
        assert parse_int_range("1..9") == [1, 3, 5, 7, 9]
        assert parse_int_range("4,6") == [4, 6]
        with pytest.raises(ConfigurationError):
            parse_int_range("9..1")

    def test_parse_key_value(self):
        assert parse_key_value("ode=1e-6") == ("ode", 1e-6)
        with pytest.raises(ConfigurationError):
            parse_key_value("ode=x")

    def test_slopes(self):
        x = np.arange(1.0, 9.0)
        assert loglog_slope(x, 3.0 * x ** -2.5) == pytest.approx(-2.5)
        assert 10 ** semilog_slope(x, 1e-16 * 3.7 ** x) == pytest.approx(3.7)
        assert np.isnan(semilog_slope([1.0, 2.0], [0.0, 0.0]))

    def test_formatting(self):
        assert format_number(-0.4581234567) == "-0.458123"
        assert format_number(True) == "true"
        assert format_number(7) == "7"
        assert round_half(-1e-9) == 0.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
