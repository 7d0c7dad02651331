"""
Aggregation of profile documents for the `report` command.

Loads every *.profile.json of a directory, builds one table row per space,
counts dimensions and flags profiles that are undecided or inconsistent.
"""

import json
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Dict, List

from .formatters import profile_row

logger = logging.getLogger(__name__)

PROFILE_SUFFIX = ".profile.json"


class ProfileAggregator:
    """Aggregates the profile documents of one output directory."""

    def __init__(self, profiles_dir: Path):
        self.profiles_dir = Path(profiles_dir)

    def load_profiles(self) -> List[Dict[str, Any]]:
        """Profile documents in file-name order; unreadable files are skipped."""
        documents = []
        if not self.profiles_dir.is_dir():
            logger.warning("Profile directory %s does not exist", self.profiles_dir)
            return documents

        for path in sorted(self.profiles_dir.glob(f"*{PROFILE_SUFFIX}")):
            try:
                with open(path, encoding="utf-8") as f:
                    document = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning("Skipping %s: %s", path, e)
                continue
            if not isinstance(document, dict) or "homology" not in document:
                logger.warning("Skipping %s: not a profile document", path)
                continue
            document.setdefault("space", path.name[:-len(PROFILE_SUFFIX)])
            documents.append(document)
        return documents

    def generate_report_data(self) -> Dict[str, Any]:
        """
        Table, dimension counts and issues for all profiles.

        Returns:
            {"profiles", "table", "dimension_counts", "issues"}
        """
        documents = self.load_profiles()
        table = [profile_row(document) for document in documents]
        return {
            "profiles": len(documents),
            "table": table,
            "dimension_counts": self._count_dimensions(table),
            "issues": self._identify_issues(documents, table),
        }

    def _count_dimensions(self, table: List[Dict[str, str]]) -> Dict[str, Dict[str, int]]:
        counts = {}
        for key in ("dg", "wdg"):
            counter = Counter(row[key] for row in table)
            counts[key] = dict(sorted(counter.items()))
        return counts

    def _identify_issues(self, documents: List[Dict[str, Any]],
                         table: List[Dict[str, str]]) -> List[Dict[str, Any]]:
        issues = []
        for document, row in zip(documents, table):
            violations = document.get("consistency", {}).get("violations", [])
            if violations:
                issues.append({
                    "severity": "error",
                    "space": row["name"],
                    "message": f"violated assertions: {', '.join(violations)}",
                })
            undecided = [key for key in ("dg", "wdg") if row[key] == "unknown"]
            if undecided:
                blocking = [document["homology"]["cases"][case].get("blocking")
                            for case in ("dg_db", "wdg_wdb")]
                blocking = sorted({b for b in blocking if b})
                issues.append({
                    "severity": "warning",
                    "space": row["name"],
                    "message": f"{' and '.join(undecided)} undecided; blocked by "
                               f"{', '.join(f'({b})' for b in blocking) or 'unknown conditions'}",
                })
        return issues
