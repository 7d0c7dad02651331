"""
Report generator for profile directories.

Orchestrates aggregation and formatting to produce the `report` output.
"""

from pathlib import Path
from typing import Any, Dict, Optional

from .aggregator import ProfileAggregator
from .formatters import CSVFormatter, JSONFormatter, MarkdownFormatter

FORMATS = ("json", "csv", "markdown")


class ReportGenerator:
    """Main report generator class."""

    def __init__(self, profiles_dir: Path):
        self.profiles_dir = Path(profiles_dir)
        self.aggregator = ProfileAggregator(self.profiles_dir)

    def generate_report(self, format: str = "markdown", output_path: Optional[Path] = None,
                        full: bool = True) -> str:
        """
        Aggregate the directory and format the result.

        Args:
            format: "json", "csv" or "markdown"
            output_path: Optional path to write report to
            full: Markdown only; False gives the bare table

        Returns:
            Formatted report as string
        """
        if format not in FORMATS:
            raise ValueError(f"unknown report format {format!r}")
        data = self.aggregator.generate_report_data()

        if format == "json":
            report = JSONFormatter.format(data)
        elif format == "csv":
            report = CSVFormatter.format_table(data)
        else:
            report = MarkdownFormatter.format(data, full=full)

        if output_path:
            output_path = Path(output_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(output_path, 'w', encoding='utf-8') as f:
                f.write(report)

        return report

    def get_raw_data(self) -> Dict[str, Any]:
        """Aggregated data without formatting."""
        return self.aggregator.generate_report_data()
