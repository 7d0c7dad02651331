"""
Per-level target search behind domination and nuclearity checks.

For every source level k up to the budget the search looks for the smallest
target level m with sup_i p^(k)_i / q^(m)_i < inf (BOUNDED) or
sum_i p^(k)_i / q^(m)_i < inf (SUMMABLE). A candidate is settled, in order
of preference, by full enumeration of a finite index set, by the limit
oracle, or empirically by where the prefix statistic is attained. Valid
targets are upward closed for pointwise-ordered target families, so the
search gallops from the previous level's target and bisects back.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy

from workbench.config import resolve_budget, resolve_depth
from workbench.verdict import Tier, Verdict
from weights import dsl, oracle
from weights.family import WeightFamily
from weights.index_set import IndexKind
from relations.certificates import (
    BOUNDED,
    SUMMABLE,
    DominationCertificate,
    LevelBound,
    LevelMap,
    ratio_statistic,
    with_slack,
)

logger = logging.getLogger(__name__)

PROVEN = "proven"
REFUTED = "refuted"
PLAUSIBLE = "plausible"
IMPLAUSIBLE = "implausible"

# oracle_sampled_c: domination proven, C read off a longer prefix
EXACT_RULES = ("enumeration", "oracle", "oracle_sampled_c")


@dataclass
class _Probe:
    status: str
    statistic: float
    rule: str


@dataclass
class LevelResult:
    bound: Optional[LevelBound] = None
    failure: Optional[str] = None
    trend: Dict[int, float] = field(default_factory=dict)


class LevelSearch:
    """Certificate search of one family against another."""

    def __init__(self, source: WeightFamily, target: WeightFamily, kind: str = BOUNDED,
                 depth: Optional[int] = None, level_budget: Optional[int] = None):
        self.source = source
        self.target = target
        self.kind = kind
        pairs = source.index_set.kind == IndexKind.NATURAL_PAIRS
        self.depth = source.index_set.clamp(resolve_depth(depth, pairs))
        self.budget = resolve_budget(level_budget)
        self.cap = target.clamp_level(2 * self.budget + 2)
        self.exact_prefix = source.index_set.covers(self.depth)
        self.naturals = source.index_set.kind == IndexKind.NATURALS

    @property
    def label(self) -> str:
        if self.kind == SUMMABLE:
            return f"sum {self.source.name}/{self.target.name}"
        return f"{self.source.name} < {self.target.name}"

    def run(self) -> Verdict:
        top = self.source.clamp_level(self.budget)
        bounds: List[LevelBound] = []
        trend: Dict[int, Dict[int, float]] = {}
        start = 1
        for k in range(1, top + 1):
            result = self._search_level(k, start)
            trend[k] = result.trend
            if result.failure is not None:
                return Verdict.fails(
                    self.depth, f"{self.label} fails at level {k}: {result.failure}",
                    source_level=k, trend=trend)
            if result.bound is None:
                return Verdict.unknown(
                    self.depth, f"{self.label}: no target within levels 1..{self.cap} for level {k}",
                    certificate=self._certificate(bounds, Tier.EMPIRICAL),
                    source_level=k, trend=trend)
            bounds.append(result.bound)
            if self.source.flags.pointwise_ordered:
                start = result.bound.target_level

        exact = all(b.proof_rule in EXACT_RULES for b in bounds)
        finite_levels = self.source.level_count is not None and top == self.source.level_count
        level_map = None
        if exact and not finite_levels:
            level_map = self._uniform_map(bounds)
        if exact and (finite_levels or level_map is not None):
            how = level_map.describe() if level_map else f"all {top} levels checked"
            return Verdict.holds(
                self.depth, f"{self.label} holds ({how})",
                certificate=self._certificate(bounds, Tier.EXACT, True, level_map))
        proven = [b.source_level for b in bounds if b.proof_rule in EXACT_RULES]
        return Verdict.unknown(
            self.depth,
            f"{self.label}: levels 1..{top} bounded, no proof for all levels",
            certificate=self._certificate(bounds, Tier.EXACT if exact else Tier.EMPIRICAL),
            levels_proven=proven, trend=trend)

    # -- per level ---------------------------------------------------------

    def _search_level(self, k: int, start: int) -> LevelResult:
        result = LevelResult()
        p_logs = self.source.log_weights(k, self.depth)
        p_node = self.source.level_node(k)
        probes: Dict[int, _Probe] = {}

        def probe(m: int) -> _Probe:
            if m not in probes:
                probes[m] = self._probe(p_logs, p_node, m)
                result.trend[m] = probes[m].statistic
            return probes[m]

        def accepted(m: int) -> bool:
            return probe(m).status in (PROVEN, PLAUSIBLE)

        found = None
        if self.target.flags.pointwise_ordered:
            m, step, last_rejected = min(start, self.cap), 1, min(start, self.cap) - 1
            while True:
                if accepted(m):
                    found = m
                    break
                last_rejected = m
                if m >= self.cap:
                    break
                m = min(m + step, self.cap)
                step *= 2
            if found is not None:
                lo, hi = last_rejected + 1, found
                while lo < hi:
                    mid = (lo + hi) // 2
                    if accepted(mid):
                        hi = mid
                    else:
                        lo = mid + 1
                found = hi
        else:
            found = next((m for m in range(1, self.cap + 1) if accepted(m)), None)

        if found is not None:
            result.bound = self._bound(k, found, p_node, probes[found])
            return result
        result.failure = self._failure(p_logs, p_node, probe)
        return result

    def _probe(self, p_logs: np.ndarray, p_node, m: int) -> _Probe:
        q_logs = self.target.log_weights(m, self.depth)
        statistic = ratio_statistic(self.kind, p_logs, q_logs)
        if statistic == float("inf"):
            return _Probe(REFUTED, statistic, "infinite_term")
        if self.exact_prefix:
            return _Probe(PROVEN, statistic, "enumeration")
        decided = self._ask_oracle(p_node, self.target.level_node(m))
        if decided is True:
            return _Probe(PROVEN, statistic, "oracle")
        if decided is False:
            return _Probe(REFUTED, statistic, "oracle")
        half = max(1, len(p_logs) // 2)
        head = ratio_statistic(self.kind, p_logs[:half], q_logs[:half])
        if self.kind == BOUNDED:
            settled = statistic - head <= 1e-9 * max(1.0, abs(statistic))
        else:
            settled = statistic - head < 1e-3
        return _Probe(PLAUSIBLE if settled else IMPLAUSIBLE, statistic, "empirical")

    def _ask_oracle(self, p_node, q_node) -> Optional[bool]:
        if p_node is None or q_node is None:
            return None
        if self.kind == SUMMABLE:
            return oracle.ratio_summable(p_node, q_node)
        return oracle.ratio_bounded(p_node, q_node)

    def _bound(self, k: int, m: int, p_node, found: _Probe) -> LevelBound:
        log_c, rule = found.statistic, found.rule
        sampled = False
        if rule == "oracle":
            tail = self._tail(p_node, self.target.level_node(m))
            if tail is None:
                tail = self._sampled_tail(k, m)
                rule, sampled = "oracle_sampled_c", True
            log_c = self._combine(log_c, tail)
        return LevelBound(k, m, with_slack(log_c), rule, self.depth, c_sampled=sampled)

    def _combine(self, head: float, tail: float) -> float:
        if self.kind == SUMMABLE:
            return float(np.logaddexp(head, tail))
        return max(head, tail)

    def _tail(self, p_node, q_node) -> Optional[float]:
        """Oracle bound of the statistic beyond the prefix."""
        p, q = oracle.expr_of(p_node), oracle.expr_of(q_node)
        if p is None or q is None or not self.naturals:
            return None
        start = self.depth + 1
        if self.kind == SUMMABLE:
            return oracle.tail_sum_log(sympy.powsimp(p / q, force=True), start)
        return oracle.tail_sup_log(oracle.log_of(p) - oracle.log_of(q), start)

    def _sampled_tail(self, k: int, m: int) -> float:
        """Statistic on the next three prefix lengths when no tail proof exists."""
        extended = 4 * self.depth
        p_logs = self.source.log_weights(k, extended)[self.depth:]
        q_logs = self.target.log_weights(m, extended)[self.depth:]
        if len(p_logs) == 0:
            return float("-inf")
        return ratio_statistic(self.kind, p_logs, q_logs)

    def _failure(self, p_logs, p_node, probe) -> Optional[str]:
        count = self.target.level_count
        if count is not None and count <= self.cap:
            if all(probe(m).status == REFUTED for m in range(1, count + 1)):
                return f"every one of the {count} target levels is refuted"
        if not self.target.flags.pointwise_ordered or p_node is None:
            return None
        q_sym = self.target.symbolic_node()
        p_expr = oracle.expr_of(p_node)
        q_expr = None if q_sym is None else oracle.expr_of(q_sym)
        if p_expr is None or q_expr is None:
            return None
        supremum = oracle.level_supremum(q_expr)
        if supremum is None:
            return None
        if self.kind == SUMMABLE:
            decided = oracle.is_summable(sympy.powsimp(p_expr / supremum, force=True))
        else:
            decided = oracle.is_bounded_ratio(p_expr, supremum)
        if decided is False:
            return f"refuted against the level supremum {supremum}"
        return None

    # -- all levels --------------------------------------------------------

    def _uniform_map(self, bounds: List[LevelBound]) -> Optional[LevelMap]:
        p_sym = self.source.symbolic_node()
        q_sym = self.target.symbolic_node()
        if p_sym is None or q_sym is None or "k" not in dsl.free_variables(p_sym):
            return None
        targets = {b.source_level: b.target_level for b in bounds}
        for level_map in LevelMap.candidates(targets):
            q_mapped = dsl.substitute(q_sym, {"k": level_map.node()})
            if self._ask_oracle(p_sym, q_mapped) is True:
                logger.debug("%s proven uniformly with %s", self.label, level_map.describe())
                return level_map
        return None

    def _certificate(self, bounds: List[LevelBound], tier: Tier, all_levels: bool = False,
                     level_map: Optional[LevelMap] = None) -> DominationCertificate:
        notes: Tuple[str, ...] = ()
        if self.source.flags.running_max or self.target.flags.running_max:
            notes = ("levels replaced by running maxima",)
        return DominationCertificate(
            kind=self.kind,
            source=self.source.name,
            target=self.target.name,
            bounds=tuple(bounds),
            tier=tier,
            all_levels=all_levels,
            level_map=level_map,
            notes=notes,
        )


def search_levels(source: WeightFamily, target: WeightFamily, kind: str = BOUNDED,
                  depth: Optional[int] = None, level_budget: Optional[int] = None) -> Verdict:
    return LevelSearch(source, target, kind, depth, level_budget).run()
