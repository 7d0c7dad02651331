#!/usr/bin/env python3
"""
Tests for profile reporting.

Run with: python3 -m pytest scripts/reporting/test_reporting.py -v
Or: python3 scripts/reporting/test_reporting.py
"""

import csv
import io
import json
import shutil
import tempfile
import unittest
import sys
from pathlib import Path

# Add parent directory to path for imports when run directly
if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent.parent))

from classifier.homology import classify, profile_document
from conditions.profile import ConditionProfile
from reporting.aggregator import ProfileAggregator
from reporting.formatters import (
    PROFILE_COLUMNS,
    ASCIIChart,
    CSVFormatter,
    JSONFormatter,
    MarkdownFormatter,
    profile_row,
)
from reporting.generator import ReportGenerator


def _document(name, U, N, B, M):
    cp = ConditionProfile.from_bools(U, N, B, M, name)
    return profile_document(classify(cp), cp, name, {"depth": 200, "level_budget": 3})


class TestASCIIChart(unittest.TestCase):
    """Test ASCII chart generation."""

    def test_bar_chart(self):
        """Test horizontal bar chart generation."""
        chart = ASCIIChart.bar_chart({"dg = 1": 3, "dg = 2": 2, "dg = inf": 1}, max_width=20)

        self.assertIn("dg = 1", chart)
        self.assertIn("dg = inf", chart)
        self.assertTrue(chart.splitlines()[0].startswith("dg = 1"))

    def test_bar_chart_ties_are_stable(self):
        chart = ASCIIChart.bar_chart({"b": 1, "a": 1})
        self.assertTrue(chart.startswith("a"))

    def test_bar_chart_empty(self):
        """Test bar chart with empty data."""
        self.assertEqual(ASCIIChart.bar_chart({}), "No data")

    def test_sparkline(self):
        """Test sparkline generation."""
        values = [1, 2, 3, 4, 5, 4, 3, 2, 1]
        sparkline = ASCIIChart.sparkline(values)

        self.assertEqual(len(sparkline), len(values))
        self.assertEqual(sparkline[0], "▁")
        self.assertEqual(sparkline[4], "█")

    def test_sparkline_width(self):
        """Long series are squeezed into bucket maxima."""
        sparkline = ASCIIChart.sparkline(list(range(100)), width=10)
        self.assertEqual(len(sparkline), 10)
        self.assertEqual(sparkline[-1], "█")

    def test_sparkline_empty(self):
        """Test sparkline with empty data."""
        self.assertEqual(ASCIIChart.sparkline([]), "")


class TestProfileRow(unittest.TestCase):
    """Test the table row extracted from a profile document."""

    def test_matrix_like_profile(self):
        row = profile_row(_document("matrix_example", False, True, True, False))
        self.assertEqual(row["name"], "matrix_example")
        self.assertEqual((row["dg"], row["db"], row["wdg"], row["wdb"]), ("2", "2", "1", "1"))
        self.assertEqual((row["U"], row["N"], row["B"], row["M"]),
                         ("fails", "holds", "holds", "fails"))
        self.assertEqual(row["flags"], "approximately_contractible,biflat,biprojective")

    def test_unknown_flags_are_not_listed(self):
        row = profile_row(_document("x", False, None, True, True))
        self.assertEqual(row["dg"], "unknown")
        self.assertNotIn("approximately_contractible", row["flags"])


class TestFormatters(unittest.TestCase):
    """Test JSON, CSV and Markdown output."""

    def test_json_is_byte_stable(self):
        first = JSONFormatter.format(_document("s", False, True, True, True))
        second = JSONFormatter.format(_document("s", False, True, True, True))
        self.assertEqual(first, second)
        self.assertTrue(first.endswith("\n"))
        self.assertNotIn("generated_at", first)

    def test_json_non_finite_values(self):
        text = JSONFormatter.format({"b": float("inf"), "a": float("-inf"), "c": (1, 2)})
        self.assertEqual(json.loads(text), {"a": "-inf", "b": "inf", "c": [1, 2]})
        self.assertLess(text.index('"a"'), text.index('"b"'))

    def test_csv_from_dicts_and_lists(self):
        text = CSVFormatter.format(("n", "value"), [{"n": 1, "value": 0.5}, [2, 0.25]])
        rows = list(csv.reader(io.StringIO(text)))
        self.assertEqual(rows, [["n", "value"], ["1", "0.5"], ["2", "0.25"]])

    def test_markdown_profile_cites_case(self):
        text = MarkdownFormatter.format_profile(_document("matrix_example", False, True, True, False))
        self.assertIn("# Homological profile: matrix_example", text)
        self.assertIn("(B) and (N) hold, (M) fails", text)
        self.assertIn("λ(P̄)", text)
        self.assertIn("✗ (M) fails", text)

    def test_markdown_profile_lists_violations(self):
        document = _document("s", False, True, True, True)
        document["consistency"]["violations"] = ["wdg ≤ dg"]
        self.assertIn("violated: wdg ≤ dg", MarkdownFormatter.format_profile(document))

    def test_markdown_convergence(self):
        report = {"epsilon": 1e-6, "first_below": 3, "non_monotone": [],
                  "unit_norm_violations": [], "branch_violations": [],
                  "rows": [{"value": 1.0}, {"value": 1e-3}, {"value": 0.0}]}
        text = MarkdownFormatter.format_convergence(report)
        self.assertIn("first below epsilon: 3", text)
        self.assertIn("log10 value: █", text)


class TestProfileAggregator(unittest.TestCase):
    """Test aggregation of a profile directory."""

    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp())
        documents = {
            "l1": _document("l1", False, False, True, True),
            "s": _document("s", False, True, True, True),
            "hadamard_disk(1)": _document("hadamard_disk(1)", True, None, None, None),
            "open": _document("open", False, None, True, True),
        }
        for name, document in documents.items():
            path = self.temp_dir / f"{name}.profile.json"
            path.write_text(JSONFormatter.format(document), encoding="utf-8")
        (self.temp_dir / "broken.profile.json").write_text("{not json", encoding="utf-8")
        (self.temp_dir / "analysis_log.jsonl").write_text("{}\n", encoding="utf-8")

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_loads_in_name_order(self):
        names = [d["space"] for d in ProfileAggregator(self.temp_dir).load_profiles()]
        self.assertEqual(names, ["hadamard_disk(1)", "l1", "open", "s"])

    def test_report_data(self):
        data = ProfileAggregator(self.temp_dir).generate_report_data()
        self.assertEqual(data["profiles"], 4)
        self.assertEqual(data["dimension_counts"]["dg"], {"0": 1, "1": 1, "2": 1, "unknown": 1})
        self.assertEqual(len(data["issues"]), 1)
        self.assertEqual(data["issues"][0]["space"], "open")
        self.assertIn("(N)", data["issues"][0]["message"])

    def test_violations_are_errors(self):
        path = self.temp_dir / "s.profile.json"
        document = json.loads(path.read_text(encoding="utf-8"))
        document["consistency"]["violations"] = ["db ≤ 2"]
        path.write_text(JSONFormatter.format(document), encoding="utf-8")
        issues = ProfileAggregator(self.temp_dir).generate_report_data()["issues"]
        self.assertIn("error", [issue["severity"] for issue in issues])

    def test_missing_directory(self):
        self.assertEqual(ProfileAggregator(self.temp_dir / "absent").load_profiles(), [])


class TestReportGenerator(unittest.TestCase):
    """Test end-to-end report generation."""

    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp())
        for name, bools in (("l1", (False, False, True, True)), ("s", (False, True, True, True))):
            (self.temp_dir / f"{name}.profile.json").write_text(
                JSONFormatter.format(_document(name, *bools)), encoding="utf-8")

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_csv_table(self):
        report = ReportGenerator(self.temp_dir).generate_report(format="csv")
        rows = list(csv.DictReader(io.StringIO(report)))
        self.assertEqual(tuple(rows[0].keys()), PROFILE_COLUMNS)
        self.assertEqual([(r["name"], r["dg"]) for r in rows], [("l1", "2"), ("s", "1")])

    def test_markdown_report(self):
        report = ReportGenerator(self.temp_dir).generate_report(format="markdown")
        self.assertIn("# Köthe Algebra Profiles", report)
        self.assertIn("| l1 | 2 | 2 | 2 | 2 | fails | fails | holds | holds |", report)
        self.assertIn("Every profile is decided and consistent", report)

    def test_json_written_to_file(self):
        output = self.temp_dir / "out" / "report.json"
        report = ReportGenerator(self.temp_dir).generate_report(format="json", output_path=output)
        self.assertEqual(output.read_text(encoding="utf-8"), report)
        self.assertEqual(json.loads(report)["profiles"], 2)

    def test_unknown_format(self):
        with self.assertRaises(ValueError):
            ReportGenerator(self.temp_dir).generate_report(format="html")


if __name__ == "__main__":
    unittest.main()
