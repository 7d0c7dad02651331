"""
HomologicalProfile of a Köthe algebra and its consistency assertions.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from workbench.errors import NotAnAlgebraError
from weights.family import WeightFamily
from relations.domination import is_algebra
from conditions.profile import ConditionProfile
from conditions.runner import ConditionRunner
from classifier.tables import CaseResult, Dimension, classify_strong, classify_weak, triviality_flags

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomologicalProfile:
    """dg = db, wdg = wdb, their witness modules and the triviality flags."""

    dg: Dimension
    db: Dimension
    wdg: Dimension
    wdb: Dimension
    strong: CaseResult
    weak: CaseResult
    flags: Dict[str, Optional[bool]] = field(default_factory=dict)
    family: str = ""

    @property
    def witnesses(self) -> Dict[str, Optional[str]]:
        return {"dg_db": self.strong.witness, "wdg_wdb": self.weak.witness}

    @property
    def dimensions(self) -> tuple:
        return (self.dg, self.db, self.wdg, self.wdb)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "dg": self.dg.value,
            "db": self.db.value,
            "wdg": self.wdg.value,
            "wdb": self.wdb.value,
            "witnesses": self.witnesses,
            "cases": {"dg_db": self.strong.to_dict(), "wdg_wdb": self.weak.to_dict()},
            "flags": {name: "unknown" if value is None else value
                      for name, value in sorted(self.flags.items())},
        }


def classify(cp: ConditionProfile,
             approximately_contractible: Optional[bool] = None) -> HomologicalProfile:
    """
    Both tables and the triviality flags for one condition profile.

    Raises:
        InconsistentProfileError: (U) holds while (N), (B) or (M) fails
    """
    strong = classify_strong(cp)
    weak = classify_weak(cp)
    return HomologicalProfile(
        dg=strong.dimension,
        db=strong.dimension,
        wdg=weak.dimension,
        wdb=weak.dimension,
        strong=strong,
        weak=weak,
        flags=triviality_flags(cp, approximately_contractible),
        family=cp.family,
    )


def _le(a: Dimension, b: Dimension) -> bool:
    return a.rank <= b.rank


def consistency_check(hp: HomologicalProfile) -> List[str]:
    """Violated assertions among the dimensions and flags; empty when consistent."""
    violations = []
    if hp.dg.known and hp.db.known and hp.dg != hp.db:
        violations.append("dg = db")
    if hp.wdg.known and hp.wdb.known and hp.wdg != hp.wdb:
        violations.append("wdg = wdb")
    if hp.wdg.known and hp.dg.known and not _le(hp.wdg, hp.dg):
        violations.append("wdg ≤ dg")
    if hp.wdb.known and hp.db.known and not _le(hp.wdb, hp.db):
        violations.append("wdb ≤ db")
    if hp.flags.get("biprojective") and hp.db.known and not _le(hp.db, Dimension.TWO):
        violations.append("db ≤ 2")
    if hp.flags.get("biflat") and hp.wdg.known and not _le(hp.wdg, Dimension.TWO):
        violations.append("wdg ≤ 2")
    if hp.flags.get("contractible") and hp.db.known and hp.db != Dimension.ZERO:
        violations.append("db = 0")
    return violations


def profile_conditions(family: WeightFamily, depth: Optional[int] = None,
                       level_budget: Optional[int] = None,
                       m_variant: Optional[str] = None) -> ConditionProfile:
    """
    Run (U), (N), (B), (M) on an algebra.

    Raises:
        NotAnAlgebraError: P < P² fails
        InconsistentProfileError: (U) holds while another condition fails
    """
    algebra = is_algebra(family, depth, level_budget)
    if algebra.is_fails:
        raise NotAnAlgebraError(f"{family.name} is not an algebra: {algebra.reason}")
    if algebra.is_unknown:
        logger.warning("Algebra condition undecided for %s; profiling anyway", family.name)
    settings: Dict[str, Any] = {"depth": depth, "level_budget": level_budget}
    if m_variant:
        settings["M"] = {"variant": m_variant}
    return ConditionRunner(settings).profile(family)


def profile_family(family: WeightFamily, depth: Optional[int] = None,
                   level_budget: Optional[int] = None,
                   m_variant: Optional[str] = None) -> Tuple[ConditionProfile, HomologicalProfile]:
    """The condition profile of a family and its classification."""
    cp = profile_conditions(family, depth, level_budget, m_variant)
    known = family.fact("approximately_contractible")
    return cp, classify(cp, None if known is None else known.value)


def classify_family(family: WeightFamily, depth: Optional[int] = None,
                    level_budget: Optional[int] = None) -> HomologicalProfile:
    """Profile the conditions of a family and classify them."""
    return profile_family(family, depth, level_budget)[1]


def profile_document(hp: HomologicalProfile, cp: ConditionProfile, space: str = "",
                     analysis: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    The <name>.profile.json document: dimensions with the case text applied,
    the four verdicts with tiers, and the consistency assertions.
    """
    return {
        "space": space or hp.family,
        "analysis": dict(analysis or {}),
        "homology": hp.to_dict(),
        "conditions": cp.to_dict(),
        "consistency": {"violations": consistency_check(hp)},
    }
