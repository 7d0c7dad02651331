"""
Condition check runner.

Runs the (U), (N), (B), (M) checks on one family, isolates failures of
individual checks, and assembles a ConditionProfile.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from workbench.errors import KoetheError
from workbench.verdict import Verdict
from weights.family import WeightFamily
from conditions.checks import check_B, check_N, check_U
from conditions.matrices import REVISED, check_M
from conditions.profile import CONDITIONS, ConditionProfile

logger = logging.getLogger(__name__)


class ConditionCheck(ABC):
    """Base class for condition checks."""

    name = ""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Args:
            config: check-specific settings (depth, level_budget, ...)
        """
        self.config = config or {}

    @abstractmethod
    def run(self, family: WeightFamily) -> Verdict:
        pass

    @property
    def depth(self) -> Optional[int]:
        return self.config.get("depth")

    @property
    def level_budget(self) -> Optional[int]:
        return self.config.get("level_budget")


class UnitalCheck(ConditionCheck):
    """(U): every weight summable."""

    name = "U"

    def run(self, family: WeightFamily) -> Verdict:
        return check_U(family, self.depth, self.level_budget)


class NuclearCheck(ConditionCheck):
    """(N): Grothendieck-Pietsch summability."""

    name = "N"

    def run(self, family: WeightFamily) -> Verdict:
        return check_N(family, self.depth, self.level_budget)


class BiprojectiveCheck(ConditionCheck):
    """(B): P ~ P²."""

    name = "B"

    def run(self, family: WeightFamily) -> Verdict:
        return check_B(family, self.depth, self.level_budget)


class MatrixCheck(ConditionCheck):
    """(M): the α/β matrix condition."""

    name = "M"

    def run(self, family: WeightFamily) -> Verdict:
        return check_M(family, depth=self.config.get("m_depth"), level_budget=self.level_budget,
                       variant=self.config.get("variant", REVISED))


ALL_CHECKS = [UnitalCheck, NuclearCheck, BiprojectiveCheck, MatrixCheck]


class ConditionRunner:
    """Orchestrates the condition checks for one family."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Args:
            config: shared settings plus optional per-check sections keyed
                by condition name, e.g. {"depth": 500, "M": {"variant": "classic"}}
        """
        self.config = config or {}

    def _check_config(self, name: str) -> Dict[str, Any]:
        shared = {k: v for k, v in self.config.items() if k not in CONDITIONS}
        shared.update(self.config.get(name, {}))
        return shared

    def run_checks(self, family: WeightFamily,
                   check_names: Optional[List[str]] = None) -> Dict[str, Verdict]:
        """
        Run the selected checks (all by default).

        A check that raises becomes an Unknown verdict carrying the error, so
        one failing check never hides the others.
        """
        results = {}
        for check_class in ALL_CHECKS:
            if check_names and check_class.name not in check_names:
                continue
            check = check_class(config=self._check_config(check_class.name))
            try:
                results[check.name] = check.run(family)
            except Exception as e:
                logger.warning("(%s) check on %s raised %s: %s", check.name, family.name,
                               type(e).__name__, e)
                details = {"error": type(e).__name__}
                if isinstance(e, KoetheError):
                    details["exit_code"] = e.exit_code
                results[check.name] = Verdict.unknown(
                    0, f"({check.name}) check raised {type(e).__name__}: {e}", **details)
        return results

    def profile(self, family: WeightFamily) -> ConditionProfile:
        """
        All four checks as a ConditionProfile.

        Raises:
            InconsistentProfileError: (U) holds while another condition fails
        """
        results = self.run_checks(family)
        return ConditionProfile.create(results["U"], results["N"], results["B"], results["M"],
                                       family=family.name)

    def get_summary(self, results: Dict[str, Verdict]) -> Dict[str, Any]:
        total = len(results)
        holds = len([v for v in results.values() if v.is_holds])
        fails = len([v for v in results.values() if v.is_fails])
        return {
            "total_checks": total,
            "holds": holds,
            "fails": fails,
            "unknown": total - holds - fails,
            "decided_rate": (holds + fails) / total if total > 0 else 0,
        }

    def format_results(self, results: Dict[str, Verdict], verbose: bool = False) -> str:
        """Human-readable summary of check results."""
        lines = []
        summary = self.get_summary(results)

        lines.append("=" * 60)
        lines.append("Condition Check Results")
        lines.append("=" * 60)
        lines.append("")
        lines.append(f"Total checks: {summary['total_checks']}")
        lines.append(f"Holds: {summary['holds']}")
        lines.append(f"Fails: {summary['fails']}")
        lines.append(f"Unknown: {summary['unknown']}")
        lines.append(f"Decided: {summary['decided_rate']:.1%}")
        lines.append("")

        for name, verdict in results.items():
            if verdict.is_holds:
                icon = "✓"
            elif verdict.is_fails:
                icon = "✗"
            else:
                icon = "?"
            lines.append(f"{icon} ({name}) [{verdict.tier.value}]: {verdict.reason}")
            if verbose and verdict.details:
                for key, value in verdict.details.items():
                    if key == "matrices":
                        continue
                    lines.append(f"    {key}: {value}")
                lines.append("")

        return "\n".join(lines)
