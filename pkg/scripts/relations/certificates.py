"""
Domination certificates.

A certificate records, per source level k, a target level m(k) and a
constant C(k) with p^(k) <= C(k) q^(m(k)) on the verified prefix (or, for
summability certificates, sum_i p^(k)_i / q^(m(k))_i <= C(k)). Certificates
replay on any prefix and compose along chains P < Q < R.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from workbench.errors import CertificateMissingError
from workbench.verdict import Tier
from weights import dsl
from weights.family import WeightFamily
from weights.logvalue import log_div, log_max, tree_logsumexp

BOUNDED = "bounded"
SUMMABLE = "summable"

_SLACK = 1e-12


def with_slack(log_c: float) -> float:
    """Widen a log-constant by a relative rounding margin."""
    if not np.isfinite(log_c):
        return log_c
    return log_c + _SLACK * max(1.0, abs(log_c))


def ratio_statistic(kind: str, p_logs: np.ndarray, q_logs: np.ndarray) -> float:
    """log sup_i p_i/q_i (bounded) or log sum_i p_i/q_i (summable) on a prefix."""
    ratios = log_div(p_logs, q_logs)
    # p_i = 0 contributes nothing, whatever q_i is
    ratios = np.where(p_logs == float("-inf"), float("-inf"), ratios)
    if kind == SUMMABLE:
        return tree_logsumexp(ratios)
    return log_max(ratios)


@dataclass(frozen=True)
class LevelMap:
    """Affine target map m(k) = scale * k + offset."""

    scale: int
    offset: int

    def __call__(self, k: int) -> int:
        return self.scale * k + self.offset

    def node(self) -> dsl.Node:
        k = dsl.Var("k")
        if self.scale == 0:
            return dsl.num(self.offset)
        term = k if self.scale == 1 else dsl.mul(dsl.num(self.scale), k)
        return term if self.offset == 0 else dsl.add(term, dsl.num(self.offset))

    def compose(self, after: "LevelMap") -> "LevelMap":
        """k -> after(self(k))."""
        return LevelMap(after.scale * self.scale, after.scale * self.offset + after.offset)

    def describe(self) -> str:
        if self.scale == 0:
            return f"m(k) = {self.offset}"
        term = "k" if self.scale == 1 else f"{self.scale}k"
        return f"m(k) = {term} + {self.offset}" if self.offset else f"m(k) = {term}"

    @classmethod
    def candidates(cls, targets: Dict[int, int]) -> List["LevelMap"]:
        """Smallest affine maps dominating the observed targets, simplest first."""
        maps = []
        for scale in (0, 1, 2):
            offset = max(max(m - scale * k for k, m in targets.items()), 0)
            if scale == 0 and offset < 1:
                continue
            maps.append(cls(scale, offset))
        return maps

    def to_dict(self) -> Dict[str, Any]:
        return {"scale": self.scale, "offset": self.offset}


@dataclass(frozen=True)
class LevelBound:
    source_level: int
    target_level: int
    log_c: float
    proof_rule: str
    depth: int
    # C read off an extended prefix rather than an oracle tail bound
    c_sampled: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "source_level": self.source_level,
            "target_level": self.target_level,
            "logC": self.log_c,
            "proof_rule": self.proof_rule,
            "depth": self.depth,
        }
        if self.c_sampled:
            data["logC_sampled"] = True
        return data


@dataclass(frozen=True)
class DominationCertificate:
    """Per-level bounds of P against Q, optionally uniform in the level."""

    kind: str
    source: str
    target: str
    bounds: Tuple[LevelBound, ...]
    tier: Tier
    all_levels: bool = False
    level_map: Optional[LevelMap] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)

    def bound_for(self, k: int) -> LevelBound:
        for bound in self.bounds:
            if bound.source_level == k:
                return bound
        raise CertificateMissingError(
            f"certificate {self.source} < {self.target} has no bound for level {k}")

    @property
    def levels(self) -> List[int]:
        return [b.source_level for b in self.bounds]

    def replay(self, source: WeightFamily, target: WeightFamily, depth: int) -> List[Dict[str, Any]]:
        """Re-check every bound on a fresh prefix; returns the violations."""
        violations = []
        for bound in self.bounds:
            p_logs = source.log_weights(bound.source_level, depth)
            q_logs = target.log_weights(bound.target_level, depth)
            observed = ratio_statistic(self.kind, p_logs, q_logs)
            if observed > bound.log_c:
                violations.append({"source_level": bound.source_level,
                                   "target_level": bound.target_level,
                                   "observed_logC": observed, "logC": bound.log_c})
        return violations

    def compose(self, after: "DominationCertificate") -> "DominationCertificate":
        """
        Chain P < Q (self) with Q < R (after) into P < R.

        Raises:
            CertificateMissingError: `after` lacks a bound for a target of self
        """
        if self.kind != BOUNDED or after.kind != BOUNDED:
            raise ValueError("only boundedness certificates compose")
        bounds = []
        for bound in self.bounds:
            second = after.bound_for(bound.target_level)
            bounds.append(LevelBound(
                source_level=bound.source_level,
                target_level=second.target_level,
                log_c=bound.log_c + second.log_c,
                proof_rule=f"compose({bound.proof_rule}, {second.proof_rule})",
                depth=min(bound.depth, second.depth),
                c_sampled=bound.c_sampled or second.c_sampled,
            ))
        tier = Tier.EXACT if self.tier == after.tier == Tier.EXACT else Tier.EMPIRICAL
        level_map = None
        if self.level_map is not None and after.level_map is not None:
            level_map = self.level_map.compose(after.level_map)
        return DominationCertificate(
            kind=BOUNDED,
            source=self.source,
            target=after.target,
            bounds=tuple(bounds),
            tier=tier,
            all_levels=self.all_levels and after.all_levels,
            level_map=level_map,
        )

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "kind": self.kind,
            "source": self.source,
            "target": self.target,
            "tier": self.tier.value,
            "all_levels": self.all_levels,
            "bounds": [b.to_dict() for b in self.bounds],
        }
        if self.level_map is not None:
            data["level_map"] = self.level_map.to_dict()
        if self.notes:
            data["notes"] = list(self.notes)
        return data


@dataclass(frozen=True)
class EquivalenceCertificate:
    forward: Optional[DominationCertificate]
    backward: Optional[DominationCertificate]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "forward": None if self.forward is None else self.forward.to_dict(),
            "backward": None if self.backward is None else self.backward.to_dict(),
        }
