"""
Output formatters for profile reports.

Supports Markdown, JSON and CSV output with ASCII charts and tables. Every
formatter is deterministic: the same data always gives the same bytes.
"""

import csv
import io
import json
import math
from typing import Any, Dict, List, Optional, Sequence

from workbench.verdict import plain

PROFILE_COLUMNS = ("name", "dg", "db", "wdg", "wdb", "U", "N", "B", "M", "flags")

_OUTCOME_ICONS = {"holds": "✓", "fails": "✗", "unknown": "?"}


class ASCIIChart:
    """Simple ASCII chart generator."""

    @staticmethod
    def bar_chart(data: Dict[str, float], max_width: int = 40) -> str:
        """
        Generate horizontal bar chart.

        Args:
            data: Dictionary of label -> value
            max_width: Maximum bar width in characters

        Returns:
            ASCII bar chart as string
        """
        if not data:
            return "No data"

        max_value = max(data.values())
        lines = []

        # ties keep label order so the chart is stable
        for label, value in sorted(data.items(), key=lambda x: (-x[1], x[0])):
            bar_width = int((value / max_value) * max_width) if max_value > 0 else 0
            bar = "█" * bar_width
            lines.append(f"{label:20s} {bar} {value}")

        return "\n".join(lines)

    @staticmethod
    def sparkline(values: List[float], width: Optional[int] = None) -> str:
        """
        Generate sparkline from list of values.

        Args:
            values: List of numeric values
            width: Squeeze into at most this many characters, one per
                bucket, each showing the bucket maximum

        Returns:
            Sparkline string
        """
        if not values:
            return ""

        if width and len(values) > width:
            size = math.ceil(len(values) / width)
            values = [max(values[i:i + size]) for i in range(0, len(values), size)]

        sparks = "▁▂▃▄▅▆▇█"
        min_val = min(values)
        max_val = max(values)
        range_val = max_val - min_val if max_val > min_val else 1

        sparkline = ""
        for v in values:
            index = int(((v - min_val) / range_val) * (len(sparks) - 1))
            sparkline += sparks[index]

        return sparkline


def _outcome(conditions: Dict[str, Any], name: str) -> str:
    verdict = conditions.get(name) or {}
    return verdict.get("outcome", "unknown")


def profile_row(document: Dict[str, Any]) -> Dict[str, str]:
    """One table row (PROFILE_COLUMNS) from a profile document."""
    homology = document.get("homology", {})
    conditions = document.get("conditions", {})
    flags = homology.get("flags", {})
    row = {"name": document.get("space", homology.get("family", ""))}
    for key in ("dg", "db", "wdg", "wdb"):
        row[key] = str(homology.get(key, "unknown"))
    for name in ("U", "N", "B", "M"):
        row[name] = _outcome(conditions, name)
    row["flags"] = ",".join(sorted(name for name, value in flags.items() if value is True))
    return row


class MarkdownFormatter:
    """Format profiles and profile tables as Markdown."""

    @staticmethod
    def format(data: Dict[str, Any], full: bool = True) -> str:
        """
        Format aggregated report data as Markdown.

        Args:
            data: Output of ProfileAggregator.generate_report_data
            full: If True, include all sections. If False, the table only.

        Returns:
            Markdown formatted report
        """
        if full:
            return MarkdownFormatter._format_full_report(data)
        return MarkdownFormatter._format_summary(data)

    @staticmethod
    def _table(rows: List[Dict[str, str]]) -> List[str]:
        lines = ["| " + " | ".join(PROFILE_COLUMNS) + " |",
                 "|" + "|".join("---" for _ in PROFILE_COLUMNS) + "|"]
        for row in rows:
            lines.append("| " + " | ".join(str(row.get(c, "")) for c in PROFILE_COLUMNS) + " |")
        return lines

    @staticmethod
    def _format_full_report(data: Dict[str, Any]) -> str:
        sections = ["# Köthe Algebra Profiles", ""]
        sections.append(f"**Profiles:** {data['profiles']}")
        sections.append("")

        sections.append("## Dimensions")
        sections.append("")
        sections.extend(MarkdownFormatter._table(data["table"]))
        sections.append("")

        counts = data.get("dimension_counts", {})
        if counts.get("dg"):
            sections.append("## Global Dimension Distribution")
            sections.append("")
            sections.append("```")
            sections.append(ASCIIChart.bar_chart({f"dg = {k}": v for k, v in counts["dg"].items()},
                                                 max_width=30))
            sections.append("```")
            sections.append("")

        sections.append("## Issues")
        sections.append("")
        issues = data.get("issues", [])
        if issues:
            for issue in issues:
                icon = {"error": "🔴", "warning": "⚠️"}.get(issue["severity"], "•")
                sections.append(f"- {icon} **{issue['space']}**: {issue['message']}")
        else:
            sections.append("✅ Every profile is decided and consistent")
        sections.append("")
        return "\n".join(sections)

    @staticmethod
    def _format_summary(data: Dict[str, Any]) -> str:
        sections = ["# Köthe Algebra Profiles", ""]
        sections.extend(MarkdownFormatter._table(data["table"]))
        sections.append("")
        return "\n".join(sections)

    @staticmethod
    def format_profile(document: Dict[str, Any]) -> str:
        """One space's profile: dimensions with the case applied, verdicts, flags."""
        homology = document["homology"]
        conditions = document["conditions"]
        lines = [f"# Homological profile: {document['space']}", ""]

        analysis = document.get("analysis")
        if analysis:
            settings = ", ".join(f"{k} {analysis[k]}" for k in sorted(analysis))
            lines.append(f"**Analysis:** {settings}")
            lines.append("")

        lines.append("| invariants | value | witness | case |")
        lines.append("|---|---|---|---|")
        for key, label in (("dg_db", "dg = db"), ("wdg_wdb", "wdg = wdb")):
            case = homology["cases"][key]
            witness = case.get("witness") or "-"
            lines.append(f"| {label} | {case['dimension']} | {witness} | {case['case']} |")
        lines.append("")

        lines.append("## Conditions")
        lines.append("")
        for name in ("U", "N", "B", "M"):
            verdict = conditions[name]
            icon = _OUTCOME_ICONS.get(verdict["outcome"], "?")
            lines.append(f"- {icon} ({name}) {verdict['outcome']} [{verdict['tier']}, "
                         f"depth {verdict['depth']}]: {verdict['reason']}")
        lines.append("")

        lines.append("## Triviality flags")
        lines.append("")
        for name, value in sorted(homology.get("flags", {}).items()):
            lines.append(f"- {name}: {value}")
        lines.append("")

        violations = document.get("consistency", {}).get("violations", [])
        if violations:
            lines.append("## Consistency")
            lines.append("")
            for violation in violations:
                lines.append(f"- 🔴 violated: {violation}")
            lines.append("")
        return "\n".join(lines)

    @staticmethod
    def format_convergence(report: Dict[str, Any], width: int = 60) -> str:
        """Convergence summary with a log10 sparkline of the values."""
        rows = report.get("rows", [])
        logs = [math.log10(row["value"]) if row["value"] > 0 else -300.0 for row in rows]
        floor = max(logs) - 30 if logs else 0.0
        lines = [
            f"epsilon: {report['epsilon']}",
            f"steps: {len(rows)}",
            f"first below epsilon: {report['first_below'] if report['first_below'] else 'never'}",
            f"non-monotone after grace window: {len(report.get('non_monotone', []))}",
            f"unit norm violations: {len(report.get('unit_norm_violations', []))}",
            f"branch bound violations: {len(report.get('branch_violations', []))}",
            "log10 value: " + ASCIIChart.sparkline([max(v, floor) for v in logs], width=width),
        ]
        return "\n".join(lines)


class JSONFormatter:
    """Format report data as JSON."""

    @staticmethod
    def format(data: Any) -> str:
        """
        Format data as JSON with sorted keys and a trailing newline.

        Non-finite floats become the strings "inf", "-inf", "nan" so the
        output is valid JSON.
        """
        return json.dumps(plain(data), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class CSVFormatter:
    """Format rows as CSV."""

    @staticmethod
    def format(columns: Sequence[str], rows: Sequence[Any]) -> str:
        """
        Rows as CSV under a header line.

        Args:
            columns: Header names
            rows: Dicts keyed by column, or sequences in column order
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                row = [row.get(c, "") for c in columns]
            writer.writerow([_cell(value) for value in row])
        return buffer.getvalue()

    @staticmethod
    def format_table(data: Dict[str, Any]) -> str:
        """The aggregated profile table as CSV."""
        return CSVFormatter.format(PROFILE_COLUMNS, data["table"])


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(plain(value))
