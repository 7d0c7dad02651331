"""
Explicit element x of λ(P) with x² outside λ(P) when P < P² fails.

With levels replaced by running maxima and m the level that no square
dominates, step k picks a fresh index i_k with

    p^(m)_{i_k} > k^4 (p^(m+k-1)_{i_k})^2

and sets x_{i_k} = 1 / (k^2 p^(m+k-1)_{i_k}). Then every ‖x‖_p^(l) tail is
bounded by sum_{k >= l} 1/k^2 while each term of ‖x²‖_p^(m) exceeds 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import mpmath
import numpy as np

from workbench.config import config, resolve_budget, resolve_depth
from workbench.errors import PreconditionError, WitnessSearchError
from weights.family import WeightFamily, running_max_family
from weights.index_set import IndexKind
from weights.logvalue import tree_logsumexp
from relations.domination import is_algebra

logger = logging.getLogger(__name__)


def trigamma_log(level: int) -> float:
    """log sum_{k >= level} 1/k^2."""
    return float(mpmath.log(mpmath.psi(1, level)))


@dataclass(frozen=True, eq=False)
class NonAlgebraWitness:
    family: WeightFamily
    base_level: int
    ranks: Tuple[int, ...]
    levels: Tuple[int, ...]
    log_coeffs: np.ndarray
    depth: int

    @property
    def k_max(self) -> int:
        return len(self.ranks)

    @property
    def element(self):
        """The witness as a SeqElement on the first max(i_k) indices."""
        from sequences.element import SeqElement
        n = max(self.ranks)
        log_abs = np.full(n, -np.inf)
        log_abs[np.asarray(self.ranks) - 1] = self.log_coeffs
        return SeqElement(log_abs, np.zeros(n), None, self.family.index_set,
                          f"witness({self.family.name})")

    def _at_ranks(self, level: int) -> np.ndarray:
        logs = self.family.log_weights(level, self.depth)
        return logs[np.asarray(self.ranks) - 1]

    def level_terms_log(self, level: int) -> np.ndarray:
        """log |x_{i_k}| p^(l)_{i_k} for k = 1..K."""
        return self.log_coeffs + self._at_ranks(level)

    def tail_log(self, level: int, start: Optional[int] = None) -> float:
        """log of sum over k >= start (default level + 1) of |x_{i_k}| p^(l)_{i_k}."""
        start = level + 1 if start is None else start
        return tree_logsumexp(self.level_terms_log(level)[start - 1:])

    def square_seminorm_log(self, level: Optional[int] = None) -> float:
        """log ‖x²‖ at the given level (default the base level) on the truncation."""
        level = self.base_level if level is None else level
        return tree_logsumexp(2.0 * self.log_coeffs + self._at_ranks(level))

    def proof_bound_violations(self) -> List[int]:
        """Levels l with sum_{l <= k <= K} |x_{i_k}| p^(l)_{i_k} above sum_{k >= l} 1/k^2."""
        violations = []
        top = self.family.clamp_level(self.k_max)
        for level in range(1, top + 1):
            partial = tree_logsumexp(self.level_terms_log(level)[level - 1:])
            bound = trigamma_log(level)
            if partial > bound + 1e-12 * max(1.0, abs(bound)):
                violations.append(level)
        return violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.name,
            "base_level": self.base_level,
            "depth": self.depth,
            "indices": [self.family.index_set.label(self.family.index_set.index_at(r))
                        for r in self.ranks],
            "levels": list(self.levels),
            "log_coeffs": [float(v) for v in self.log_coeffs],
        }


def _scan(family: WeightFamily, base: int, k_max: int, depth: int) -> NonAlgebraWitness:
    base_logs = family.log_weights(base, depth)
    used = np.zeros(base_logs.size, dtype=bool)
    ranks, levels, coeffs = [], [], []
    for k in range(1, k_max + 1):
        level = family.clamp_level(base + k - 1)
        logs = family.log_weights(level, depth)
        with np.errstate(invalid="ignore"):
            margin = base_logs - 2.0 * logs
        eligible = (~used & np.isfinite(base_logs) & np.isfinite(logs)
                    & (margin > 4.0 * math.log(k)))
        if not eligible.any():
            raise WitnessSearchError(
                f"no index in the first {depth} satisfies the witness inequality at step {k} "
                f"(base level {base}); a larger depth or another base level is needed",
                failing_level=base, deepest=k - 1)
        pick = int(np.argmax(np.where(eligible, margin, -np.inf)))
        used[pick] = True
        ranks.append(pick + 1)
        levels.append(level)
        coeffs.append(-2.0 * math.log(k) - float(logs[pick]))
    return NonAlgebraWitness(family, base, tuple(ranks), tuple(levels),
                             np.array(coeffs), depth)


def non_algebra_witness(family: WeightFamily, k_max: Optional[int] = None,
                        depth: Optional[int] = None, override: bool = False,
                        level_budget: Optional[int] = None) -> NonAlgebraWitness:
    """
    Build the truncated witness for a family that is not an algebra.

    Raises:
        PreconditionError: is_algebra holds, or is undecided without override
        WitnessSearchError: no base level completes the scan within the prefix
    """
    verdict = is_algebra(family, depth, level_budget)
    if verdict.is_holds:
        raise PreconditionError(f"is_algebra holds for {family.name}; no witness exists")
    if verdict.is_unknown and not override:
        raise PreconditionError(
            f"is_algebra is undecided for {family.name}; pass override to scan anyway")

    k_max = int(k_max or config.get("witness.k_max", 50))
    pairs = family.index_set.kind == IndexKind.NATURAL_PAIRS
    depth = family.index_set.clamp(resolve_depth(depth, pairs))
    ordered = running_max_family(family)

    known = verdict.details.get("source_level")
    if known is not None:
        bases = [int(known)]
    else:
        bases = list(range(1, ordered.clamp_level(resolve_budget(level_budget)) + 1))

    first_error = None
    for base in bases:
        try:
            witness = _scan(ordered, base, k_max, depth)
        except WitnessSearchError as e:
            logger.debug("Witness scan from level %d stopped: %s", base, e)
            first_error = first_error or e
            continue
        logger.info("Built non-algebra witness for %s from level %d with %d terms",
                    family.name, base, k_max)
        return witness
    raise first_error
