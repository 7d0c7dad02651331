"""
ConditionProfile: the four verdicts (U), (N), (B), (M) of one family.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from workbench.errors import InconsistentProfileError
from workbench.verdict import Verdict

logger = logging.getLogger(__name__)

CONDITIONS = ("U", "N", "B", "M")


@dataclass(frozen=True)
class ConditionProfile:
    """
    Verdicts for (U), (N), (B), (M).

    Build through create(): (U) implies the other three, so a Holds on U
    replaces Unknowns by implied Holds and rejects any Fails.
    """

    U: Verdict
    N: Verdict
    B: Verdict
    M: Verdict
    family: str = ""
    depths: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def create(cls, U: Verdict, N: Verdict, B: Verdict, M: Verdict, family: str = "",
               depths: Optional[Dict[str, int]] = None) -> "ConditionProfile":
        """
        Raises:
            InconsistentProfileError: U holds while one of N, B, M fails
        """
        verdicts = {"N": N, "B": B, "M": M}
        if U.is_holds:
            failing = [name for name, v in verdicts.items() if v.is_fails]
            if failing:
                raise InconsistentProfileError(
                    f"{family or 'profile'}: (U) holds but {', '.join(failing)} fails")
            for name, verdict in verdicts.items():
                if verdict.is_unknown:
                    logger.debug("%s: (%s) follows from (U)", family, name)
                    verdicts[name] = Verdict.holds(U.depth, f"({name}) follows from (U)",
                                                   proof_rule="unital_implies", implied_by="U")
        if depths is None:
            depths = {"U": U.depth, **{name: v.depth for name, v in verdicts.items()}}
        return cls(U, verdicts["N"], verdicts["B"], verdicts["M"], family, dict(depths))

    @classmethod
    def from_bools(cls, U: Optional[bool], N: Optional[bool], B: Optional[bool],
                   M: Optional[bool], family: str = "") -> "ConditionProfile":
        """Profile of hand-set verdicts, None meaning unknown."""

        def verdict(name: str, value: Optional[bool]) -> Verdict:
            if value is None:
                return Verdict.unknown(0, f"({name}) unknown")
            if value:
                return Verdict.holds(0, f"({name}) given")
            return Verdict.fails(0, f"({name}) given")

        return cls.create(verdict("U", U), verdict("N", N), verdict("B", B), verdict("M", M),
                          family)

    def verdict(self, name: str) -> Verdict:
        if name not in CONDITIONS:
            raise KeyError(f"unknown condition {name!r}")
        return getattr(self, name)

    def as_bools(self) -> Tuple[Optional[bool], ...]:
        return tuple(self.verdict(name).as_bool() for name in CONDITIONS)

    def to_dict(self) -> Dict[str, Any]:
        data = {"family": self.family, "depths": dict(self.depths)}
        for name in CONDITIONS:
            data[name] = self.verdict(name).to_dict()
        return data
