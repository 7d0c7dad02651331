"""
Decision tables from condition verdicts to homological dimensions.

Weak dimensions (wdg = wdb):
    (U)                      -> 0
    (B), (N), not (U)        -> 1   witness ℂ
    (B), not (N)             -> 2   witness λ∞(P)
    not (B)                  -> inf witness ℂ

Strong dimensions (dg = db) split the (B), (N) row on (M):
    (B), (N), (M), not (U)   -> 1   witness ℂ
    (B), (N), not (M)        -> 2   witness λ(P̄)

An unknown verdict that the table needs yields an unknown dimension naming
the blocking condition. No row is guessed from partial information.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

from workbench.errors import InconsistentProfileError
from conditions.profile import ConditionProfile


class Dimension(str, Enum):
    ZERO = "0"
    ONE = "1"
    TWO = "2"
    INFINITE = "inf"
    UNKNOWN = "unknown"

    @property
    def rank(self) -> Optional[float]:
        """Numeric value for comparisons, None when unknown."""
        return {"0": 0.0, "1": 1.0, "2": 2.0, "inf": float("inf")}.get(self.value)

    @property
    def known(self) -> bool:
        return self != Dimension.UNKNOWN


TRIVIAL_MODULE = "ℂ"
SUP_SPACE = "λ∞(P)"
BAR_SPACE = "λ(P̄)"


@dataclass(frozen=True)
class CaseResult:
    """One table row: the dimension, its witness module and the case applied."""

    dimension: Dimension
    witness: Optional[str]
    case: str
    blocking: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {"dimension": self.dimension.value, "witness": self.witness, "case": self.case}
        if self.blocking:
            data["blocking"] = self.blocking
        return data


def _undecided(name: str) -> CaseResult:
    return CaseResult(Dimension.UNKNOWN, None, f"({name}) is undecided", blocking=name)


def _check_consistent(cp: ConditionProfile):
    U, N, B, M = cp.as_bools()
    if U is True and False in (N, B, M):
        raise InconsistentProfileError(
            f"{cp.family or 'profile'}: (U) holds, so (N), (B), (M) cannot fail")


def classify_weak(cp: ConditionProfile) -> CaseResult:
    """
    wdg = wdb from (U), (N), (B).

    Raises:
        InconsistentProfileError: (U) holds while (N), (B) or (M) fails
    """
    _check_consistent(cp)
    U, N, B, _ = cp.as_bools()
    if U is True:
        return CaseResult(Dimension.ZERO, None, "(U) holds")
    if B is False:
        return CaseResult(Dimension.INFINITE, TRIVIAL_MODULE, "(B) fails")
    if B is None:
        return _undecided("B")
    if N is False:
        return CaseResult(Dimension.TWO, SUP_SPACE, "(B) holds, (N) fails")
    if N is None:
        return _undecided("N")
    if U is None:
        return _undecided("U")
    return CaseResult(Dimension.ONE, TRIVIAL_MODULE, "(B) and (N) hold, (U) fails")


def classify_strong(cp: ConditionProfile) -> CaseResult:
    """
    dg = db from (U), (N), (B), (M).

    Raises:
        InconsistentProfileError: (U) holds while (N), (B) or (M) fails
    """
    _check_consistent(cp)
    U, N, B, M = cp.as_bools()
    if U is True:
        return CaseResult(Dimension.ZERO, None, "(U) holds")
    if B is False:
        return CaseResult(Dimension.INFINITE, TRIVIAL_MODULE, "(B) fails")
    if B is None:
        return _undecided("B")
    if N is False:
        return CaseResult(Dimension.TWO, SUP_SPACE, "(B) holds, (N) fails")
    if N is None:
        return _undecided("N")
    if M is False:
        return CaseResult(Dimension.TWO, BAR_SPACE, "(B) and (N) hold, (M) fails")
    if M is None:
        return _undecided("M")
    if U is None:
        return _undecided("U")
    return CaseResult(Dimension.ONE, TRIVIAL_MODULE, "(B), (N) and (M) hold, (U) fails")


def triviality_flags(cp: ConditionProfile,
                     approximately_contractible: Optional[bool] = None) -> Dict[str, Optional[bool]]:
    """
    unital = contractible = amenable from (U); biprojective = biflat from (B);
    approximately contractible when (B) and (N) hold.

    Args:
        approximately_contractible: a known value for the family, used only
            when (B) and (N) do not settle it
    """
    U, N, B, _ = cp.as_bools()
    approx = True if (B is True and N is True) or U is True else approximately_contractible
    return {
        "unital": U,
        "contractible": U,
        "amenable": U,
        "biprojective": B,
        "biflat": B,
        "approximately_contractible": approx,
    }
