"""
Three-valued verdicts with a proof tier.

Every analytic condition in the workbench answers with a Verdict. A verdict
that claims Holds or Fails at the exact tier must be backed by a builtin
analytic fact, a symbolic limit proof, or a complete enumeration of a finite
index set. Empirical verdicts stay Unknown and carry trend data, except for
Fails backed by a divergence certificate.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional


class Outcome(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


class Tier(str, Enum):
    EXACT = "exact"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a semi-decision at a given prefix depth."""

    outcome: Outcome
    tier: Tier
    depth: int
    reason: str = ""
    certificate: Optional[Any] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.tier == Tier.EMPIRICAL:
            if self.outcome == Outcome.HOLDS:
                raise ValueError("empirical verdicts cannot claim holds")
            if self.outcome == Outcome.FAILS and "divergence_certificate" not in self.details:
                raise ValueError("empirical fails needs a divergence certificate")

    @classmethod
    def holds(cls, depth: int, reason: str, certificate: Any = None,
              **details) -> "Verdict":
        return cls(Outcome.HOLDS, Tier.EXACT, depth, reason, certificate, details)

    @classmethod
    def fails(cls, depth: int, reason: str, certificate: Any = None,
              **details) -> "Verdict":
        return cls(Outcome.FAILS, Tier.EXACT, depth, reason, certificate, details)

    @classmethod
    def unknown(cls, depth: int, reason: str, certificate: Any = None,
                tier: Tier = Tier.EMPIRICAL, **details) -> "Verdict":
        return cls(Outcome.UNKNOWN, tier, depth, reason, certificate, details)

    @property
    def is_holds(self) -> bool:
        return self.outcome == Outcome.HOLDS

    @property
    def is_fails(self) -> bool:
        return self.outcome == Outcome.FAILS

    @property
    def is_unknown(self) -> bool:
        return self.outcome == Outcome.UNKNOWN

    def as_bool(self) -> Optional[bool]:
        """True / False / None view used by the decision tables."""
        if self.is_holds:
            return True
        if self.is_fails:
            return False
        return None

    def with_reason(self, reason: str, **details) -> "Verdict":
        merged = dict(self.details)
        merged.update(details)
        return Verdict(self.outcome, self.tier, self.depth, reason,
                       self.certificate, merged)

    def to_dict(self) -> Dict[str, Any]:
        certificate = plain(self.certificate)
        return {
            "outcome": self.outcome.value,
            "tier": self.tier.value,
            "depth": self.depth,
            "reason": self.reason,
            "certificate": certificate,
            "details": plain(self.details),
        }


def plain(value: Any) -> Any:
    """Convert nested details to JSON-friendly values."""
    if hasattr(value, "to_dict"):
        return plain(value.to_dict())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, float):
        if value != value:
            return "nan"
        if value in (float("inf"), float("-inf")):
            return "inf" if value > 0 else "-inf"
        return value
    if hasattr(value, "tolist"):
        return plain(value.tolist())
    return value
