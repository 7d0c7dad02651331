"""
Square roots, A = A² and the logarithmic growth criterion.

    A² = {a² : a in A} = {a in A : √|a| in A}

For 1 <= p_n <= p_{n+1} and (B), nuclearity, A = A² and

    sup_n (log n) / (log p_n) < inf for some p

are equivalent. When the last condition fails at every level, a sequence

    a_m = 1/k_n³    for k_{n-1} < m <= k_n,   p^(n)_{k_n} <= k_n^(1/n),  k_n >= 2 k_{n-1}

lies in A while ⁴√|a| is not even summable, so a is not in A².
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from workbench.config import config, resolve_budget, resolve_depth
from workbench.errors import HypothesisError, PreconditionError, WitnessSearchError
from workbench.verdict import Verdict
from weights import dsl
from weights.dsl import WeightExpr
from weights.family import Monotonicity, WeightFamily, running_max_family
from weights.index_set import IndexKind
from weights.logvalue import tree_logsumexp
from conditions.checks import check_B, check_log_criterion, check_N
from sequences.element import SeqElement
from sequences.norms import membership

logger = logging.getLogger(__name__)

A2_CHARACTERIZATION = "A² = {a in A : √|a| in A}"
DUAL_NUCLEAR_NOTE = "nuclearity of the Köthe-Toeplitz dual has no finite check; implied by (i)"

# always part of the battery: one geometric and one p-series element
FIXED_BATTERY = ("2^(-i)", "i^(-2)")


def _sqrt_tail(tail_rule: Optional[WeightExpr]) -> Optional[WeightExpr]:
    if tail_rule is None or tail_rule.is_zero:
        return tail_rule
    return WeightExpr.from_node(dsl.Call("sqrt", (tail_rule.root,)))


def square_decompose(a: SeqElement) -> SeqElement:
    """
    b with b_i² = a_i: b_i = λ_i √|a_i|, λ_i the principal square root of
    a_i / |a_i| (1 where a_i = 0). The tail rule becomes its square root.
    """
    return SeqElement(a.log_abs / 2.0, a.phase / 2.0, _sqrt_tail(a.tail_rule), a.index_set,
                      f"sqrt({a.name})" if a.name else "")


def sqrt_abs(a: SeqElement) -> SeqElement:
    """√|a| with zero phase."""
    return SeqElement(a.log_abs / 2.0, np.zeros(a.n), _sqrt_tail(a.tail_rule), a.index_set,
                      f"sqrt|{a.name}|" if a.name else "")


def sqrt_membership(a: SeqElement, family: WeightFamily, depth: Optional[int] = None,
                    level_budget: Optional[int] = None) -> Verdict:
    """Decide a in A² through membership of √|a| in A."""
    if depth is not None:
        a = a.truncate(depth)
    verdict = membership(sqrt_abs(a), family, level_budget)
    label = a.name or "a"
    relation = {True: "in", False: "not in", None: "undecided for"}[verdict.as_bool()]
    return verdict.with_reason(f"{label} {relation} A² of {family.name}: {verdict.reason}",
                               characterization=A2_CHARACTERIZATION)


# ---------------------------------------------------------------------------
# Equivalent conditions under monotone weights
# ---------------------------------------------------------------------------

def _require_monotone(family: WeightFamily, what: str):
    if family.index_set.kind != IndexKind.NATURALS:
        raise HypothesisError(f"{what} needs the naturals as index set")
    if not family.flags.all_weights_ge_one:
        raise HypothesisError(f"{what} needs all weights of {family.name} >= 1")
    if family.flags.monotone_in_index != Monotonicity.NONDECREASING:
        raise HypothesisError(f"{what} needs weights of {family.name} nondecreasing in the index")


def sample_battery(size: int, seed: int) -> List[str]:
    """Tail rules of the sampling battery: the fixed elements, then random ones."""
    rng = np.random.default_rng(seed)
    rules = list(FIXED_BATTERY)
    while len(rules) < size:
        if rng.integers(2) == 0:
            rules.append(f"{rng.uniform(1.1, 4.0):.2f}^(-i)")
        else:
            rules.append(f"i^(-{rng.uniform(1.5, 6.0):.2f})")
    return rules[:size]


@dataclass(frozen=True)
class IdempotenceReport:
    family: str
    nuclear: Verdict
    log_criterion: Verdict
    samples: List[Dict[str, Any]] = field(default_factory=list)
    counterexamples: List[str] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)
    contradictions: List[str] = field(default_factory=list)
    seed: int = 0

    @property
    def idempotent(self) -> Optional[bool]:
        """A = A² as implied by (i) or (iv), or refuted by a sample."""
        if self.counterexamples:
            return False
        for verdict in (self.nuclear, self.log_criterion):
            if verdict.as_bool() is not None:
                return verdict.as_bool()
        return None

    @property
    def consistent(self) -> bool:
        return not self.contradictions and not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "seed": self.seed,
            "nuclear": self.nuclear.to_dict(),
            "idempotent": "unknown" if self.idempotent is None else self.idempotent,
            "dual_nuclear": DUAL_NUCLEAR_NOTE,
            "log_criterion": self.log_criterion.to_dict(),
            "samples": self.samples,
            "counterexamples": self.counterexamples,
            "violations": self.violations,
            "contradictions": self.contradictions,
        }


def idempotence_profile(family: WeightFamily, depth: Optional[int] = None,
                        level_budget: Optional[int] = None, battery_size: Optional[int] = None,
                        seed: Optional[int] = None) -> IdempotenceReport:
    """
    Nuclearity, A = A² on a sampled battery, and the log criterion.

    Raises:
        HypothesisError: index set, monotonicity or p_n >= 1 unmet, or (B) not proven
    """
    _require_monotone(family, "the idempotence profile")
    biprojective = check_B(family, depth, level_budget)
    if not biprojective.is_holds:
        raise HypothesisError(f"the idempotence profile needs (B) for {family.name}: {biprojective.reason}")

    nuclear = check_N(family, depth, level_budget)
    criterion = check_log_criterion(family, depth, level_budget)
    contradictions = []
    if None not in (nuclear.as_bool(), criterion.as_bool()) and nuclear.as_bool() != criterion.as_bool():
        contradictions.append(f"(N) {nuclear.outcome.value} but log criterion {criterion.outcome.value}")
        logger.error("Contradiction for %s: %s", family.name, contradictions[-1])

    seed = int(seed if seed is not None else config.get("sampling.seed", 0))
    size = int(battery_size or config.get("sampling.battery_size", 24))
    terms = int(config.get("sampling.battery_terms", 512))
    samples, counterexamples, violations = [], [], []
    for rule in sample_battery(size, seed):
        a = SeqElement.from_rule(rule, terms, name=rule)
        in_a = membership(a, family, level_budget)
        entry = {"rule": rule, "in_A": in_a.outcome.value, "in_A2": None}
        if in_a.is_holds:
            in_a2 = sqrt_membership(a, family, level_budget=level_budget)
            entry["in_A2"] = in_a2.outcome.value
            if in_a2.is_fails:
                counterexamples.append(rule)
                for name, verdict in (("(N)", nuclear), ("log criterion", criterion)):
                    if verdict.is_holds:
                        violations.append(f"{rule} in A but not in A² while {name} holds")
        samples.append(entry)
    if violations:
        logger.error("A² samples contradict %s: %s", family.name, violations)
    logger.info("Idempotence battery for %s: %d samples, %d counterexamples",
                family.name, len(samples), len(counterexamples))
    return IdempotenceReport(family.name, nuclear, criterion, samples, counterexamples,
                             violations, contradictions, seed)


# ---------------------------------------------------------------------------
# a in A with ⁴√|a| not summable
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NonIdempotentWitness:
    family: WeightFamily
    ranks: Tuple[int, ...]
    depth: int

    @property
    def blocks(self) -> int:
        return len(self.ranks)

    def _block_of(self) -> np.ndarray:
        """k_n for every m = 1..k_N."""
        bounds = np.asarray(self.ranks)
        return bounds[np.searchsorted(bounds, np.arange(1, bounds[-1] + 1))]

    @property
    def log_coeffs(self) -> np.ndarray:
        return -3.0 * np.log(self._block_of().astype(float))

    @property
    def element(self) -> SeqElement:
        log_abs = self.log_coeffs
        return SeqElement(log_abs, np.zeros(log_abs.size), None, self.family.index_set,
                          f"non_idempotent({self.family.name})")

    def level_partial_log(self, level: int) -> float:
        """log sum over k_{level-1} < m <= k_N of |a_m| p^(level)_m."""
        start = 0 if level == 1 else self.ranks[level - 2]
        logs = self.family.log_weights(self.family.clamp_level(level), self.ranks[-1])
        return tree_logsumexp((self.log_coeffs + logs)[start:])

    def level_bound_log(self, level: int) -> float:
        """log sum_{level <= n <= N} k_n^(1/n - 2)."""
        return tree_logsumexp([(1.0 / n - 2.0) * math.log(k)
                               for n, k in enumerate(self.ranks, start=1) if n >= level])

    def proof_bound_violations(self) -> List[int]:
        violations = []
        for level in range(1, self.blocks + 1):
            partial, bound = self.level_partial_log(level), self.level_bound_log(level)
            if partial > bound + 1e-12 * max(1.0, abs(bound)):
                violations.append(level)
        return violations

    def block_root_sums(self) -> List[float]:
        """Sum of ⁴√|a_m| over each block."""
        previous = (0,) + self.ranks[:-1]
        return [(k - prev) * k ** -0.75 for prev, k in zip(previous, self.ranks)]

    @property
    def fourth_root_sum(self) -> float:
        return float(math.fsum(self.block_root_sums()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.name,
            "depth": self.depth,
            "k": list(self.ranks),
            "fourth_root_sum": self.fourth_root_sum,
            "fourth_root_lower_bound": self.blocks / 2.0,
            "proof_bound_violations": self.proof_bound_violations(),
        }


def _scan_blocks(ordered: WeightFamily, depth: int, limit: int) -> List[int]:
    log_rank = np.log(np.arange(1, depth + 1, dtype=float))
    ranks: List[int] = []
    while len(ranks) < limit:
        n = len(ranks) + 1
        start = max(1, 2 * ranks[-1]) if ranks else 1
        if start > depth:
            break
        logs = ordered.log_weights(ordered.clamp_level(n), depth)[start - 1:]
        bound = log_rank[start - 1:] / n
        fits = logs <= bound + 1e-12 * np.maximum(1.0, np.abs(bound))
        if not fits.any():
            break
        ranks.append(start + int(np.argmax(fits)))
    return ranks


def non_idempotent_witness(family: WeightFamily, depth: Optional[int] = None,
                           blocks: Optional[int] = None,
                           level_budget: Optional[int] = None) -> NonIdempotentWitness:
    """
    Scan k_1 < k_2 < ... and build a in A outside A².

    Raises:
        HypothesisError: weights not >= 1 and nondecreasing on the naturals
        PreconditionError: the log criterion holds, or is not refuted at every
            level up to the budget
        WitnessSearchError: fewer blocks than requested (at least two) fit in
            the prefix
    """
    _require_monotone(family, "the non-idempotence witness")
    depth = resolve_depth(depth)
    criterion = check_log_criterion(family, depth, level_budget)
    if criterion.is_holds:
        raise PreconditionError(f"log criterion holds for {family.name}, so A = A²")
    if criterion.is_unknown:
        top = family.clamp_level(resolve_budget(level_budget))
        refuted = criterion.details.get("refuted_levels", [])
        if len(refuted) < top:
            raise PreconditionError(
                f"log criterion undecided for {family.name} at levels "
                f"{sorted(set(range(1, top + 1)) - set(refuted))}")

    ordered = running_max_family(family)
    wanted = int(blocks) if blocks else int(config.get("witness.k_max", 50))
    ranks = _scan_blocks(ordered, depth, wanted)
    required = int(blocks) if blocks else 2
    if len(ranks) < required:
        raise WitnessSearchError(
            f"only {len(ranks)} blocks of the non-idempotence witness fit in {depth} indices "
            f"of {family.name}", failing_level=len(ranks) + 1, deepest=len(ranks))
    witness = NonIdempotentWitness(ordered, tuple(ranks), depth)
    logger.info("Built non-idempotence witness for %s with %d blocks (k_N = %d)",
                family.name, witness.blocks, ranks[-1])
    return witness
