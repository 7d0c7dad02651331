"""
Exact analytic facts attached to builtin families.

A fact is a known truth value plus the rule it comes from. Facts are the
only source, besides the limit oracle and full enumeration of a finite index
set, that may back an exact verdict.
"""

from dataclasses import dataclass, fields
from typing import Any, Dict, Optional


@dataclass(frozen=True)
class AnalyticFact:
    value: bool
    rule: str
    curated: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = {"value": self.value, "rule": self.rule}
        if self.curated:
            data["curated"] = True
        return data


@dataclass(frozen=True)
class AnalyticFacts:
    """Known structural properties of one family (None = not known)."""

    algebra: Optional[AnalyticFact] = None
    unital: Optional[AnalyticFact] = None
    nuclear: Optional[AnalyticFact] = None
    biprojective: Optional[AnalyticFact] = None
    condition_m: Optional[AnalyticFact] = None
    log_criterion: Optional[AnalyticFact] = None
    approximately_contractible: Optional[AnalyticFact] = None

    def get(self, name: str) -> Optional[AnalyticFact]:
        return getattr(self, name)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name).to_dict()
                for f in fields(self) if getattr(self, f.name) is not None}


def fact(value: Optional[bool], rule: str, curated: bool = False) -> Optional[AnalyticFact]:
    """Build a fact, or None when the value is undetermined."""
    if value is None:
        return None
    return AnalyticFact(bool(value), rule, curated)
