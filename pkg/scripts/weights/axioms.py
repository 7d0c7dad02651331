"""
Prefix checks of the Köthe axioms and of declared family flags.

(P1): every index has some level with a positive weight.
(P2): any two levels are dominated by a third, max{p, q} <= r.
"""

import logging
from typing import List, Optional

import numpy as np

from workbench.config import config
from workbench.verdict import Verdict
from weights.family import Monotonicity, WeightFamily

logger = logging.getLogger(__name__)

_TOLERANCE = 1e-12


def _levels_in_budget(family: WeightFamily, level_budget: Optional[int]) -> int:
    budget = level_budget or config.get("analysis.level_budget", 8)
    return family.clamp_level(budget)


def _le(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a <= b in log-domain with a relative tolerance for rounding."""
    with np.errstate(invalid="ignore"):
        slack = _TOLERANCE * np.maximum(1.0, np.abs(np.where(np.isfinite(b), b, 0.0)))
        return (a <= b) | (a <= b + slack)


def axioms_check(family: WeightFamily, depth: int, level_budget: Optional[int] = None) -> Verdict:
    """
    Check (P1) and (P2) on the first `depth` indices.

    Returns Holds when both axioms are verified on the prefix, Fails with the
    offending index when (P1) fails for a family with finitely many levels,
    Unknown otherwise.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    depth = family.index_set.clamp(depth)
    top = _levels_in_budget(family, level_budget)
    all_levels = family.level_count is not None and top == family.level_count
    logs = [family.log_weights(k, depth) for k in range(1, top + 1)]

    # (P1)
    best = np.maximum.reduce(logs) if len(logs) > 1 else logs[0]
    zero = best == float("-inf")
    if np.any(zero):
        rank = int(np.argmax(zero)) + 1
        index = family.index_set.index_at(rank)
        label = family.index_set.label(index)
        if all_levels:
            return Verdict.fails(depth, f"(P1) fails at index {label}: every level vanishes",
                                 axiom="P1", index=label, rank=rank)
        return Verdict.unknown(depth, f"(P1) undecided at index {label}: levels 1..{top} vanish",
                               axiom="P1", index=label, rank=rank)

    # (P2)
    if family.flags.pointwise_ordered:
        disorder = _first_disorder(logs)
        if disorder is None:
            return Verdict.holds(depth, "(P1) and (P2) verified on the prefix; levels ordered",
                                 levels_checked=top)
        logger.warning("%s declares ordered levels but level %d exceeds level %d",
                       family.name, disorder, disorder + 1)

    for a in range(top):
        for b in range(a + 1, top):
            upper = np.maximum(logs[a], logs[b])
            if not any(np.all(_le(upper, logs[r])) for r in range(top)):
                return Verdict.unknown(
                    depth,
                    f"(P2) undecided: no level within 1..{top} dominates levels {a + 1} and {b + 1}",
                    axiom="P2", levels=[a + 1, b + 1])
    return Verdict.holds(depth, "(P1) and (P2) verified on the prefix", levels_checked=top)


def _first_disorder(logs) -> Optional[int]:
    for k in range(len(logs) - 1):
        if not np.all(_le(logs[k], logs[k + 1])):
            return k + 1
    return None


def check_declared_flags(family: WeightFamily, depth: int,
                         level_budget: Optional[int] = None) -> List[str]:
    """Declared flags that evaluation contradicts on the prefix (empty when all agree)."""
    depth = family.index_set.clamp(depth)
    top = _levels_in_budget(family, level_budget)
    logs = [family.log_weights(k, depth) for k in range(1, top + 1)]
    problems = []

    flags = family.flags
    if flags.pointwise_ordered:
        disorder = _first_disorder(logs)
        if disorder is not None:
            problems.append(f"pointwise_ordered: level {disorder} exceeds level {disorder + 1}")

    if flags.all_weights_ge_one:
        for k, values in enumerate(logs, 1):
            below = values < -_TOLERANCE
            if np.any(below):
                rank = int(np.argmax(below)) + 1
                problems.append(f"all_weights_ge_one: level {k} is below 1 at rank {rank}")
                break

    if flags.monotone_in_index != Monotonicity.NONE and family.index_set.variables == ("i",):
        for k, values in enumerate(logs, 1):
            steps = np.diff(values)
            if flags.monotone_in_index == Monotonicity.NONDECREASING:
                bad = ~_le(values[:-1], values[1:])
            else:
                bad = ~_le(values[1:], values[:-1])
            if steps.size and np.any(bad):
                rank = int(np.argmax(bad)) + 1
                problems.append(
                    f"monotone_in_index: level {k} is not {flags.monotone_in_index.value} at rank {rank}")
                break
    return problems
