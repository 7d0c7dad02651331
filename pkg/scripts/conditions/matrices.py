"""
Condition (M) and the matrices (α_ij), (β_ij) that witness it.

    (M1)  α_ij + β_ij = 1
    (M2)  sup_i |α_ij| p_i p_j <= C q_j²
    (M3)  sup_j |β_ij| p_i p_j <= C q_i²

For families monotone in the index, α_ij = min{1, inf_p p_j / p_i} and
β = 1 - α satisfy (M2) and (M3) with C = 1 and q = p. The infimum over
levels is taken as a running minimum up to a level cap; the scalar accessors
refine it with the symbolic limit k -> oo when the oracle has one.

The classic variant replaces q_j², q_i² by q_j, q_i.
"""

import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np
import sympy

from workbench.config import config, resolve_budget
from workbench.errors import HypothesisError
from workbench.verdict import Tier, Verdict
from weights import oracle
from weights.family import Monotonicity, WeightFamily
from weights.index_set import IndexKind

logger = logging.getLogger(__name__)

REVISED = "revised"
CLASSIC = "classic"
VARIANTS = (REVISED, CLASSIC)

_SLACK = 1e-12


def _log_one_minus(log_alpha: np.ndarray) -> np.ndarray:
    """log(1 - α) from log α, -inf where α = 1."""
    with np.errstate(divide="ignore"):
        return np.log(1.0 - np.exp(log_alpha))


class MMatrices:
    """
    α and β on the first n indices, computed on demand.

    Either derived from a family (running minimum over levels 1..level_cap)
    or given explicitly as an α array on a prefix.
    """

    def __init__(self, family: WeightFamily, level_cap: Optional[int] = None,
                 alpha: Optional[np.ndarray] = None):
        self.family = family
        self.level_cap = family.clamp_level(level_cap or config.get("analysis.level_cap", 64))
        self._explicit = None
        if alpha is not None:
            alpha = np.asarray(alpha, dtype=float)
            if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
                raise ValueError("alpha must be a square array")
            if np.any(alpha < 0.0) or np.any(alpha > 1.0):
                raise ValueError("alpha entries must lie in [0, 1]")
            with np.errstate(divide="ignore"):
                self._explicit = np.log(alpha)
        self._blocks: Dict[int, np.ndarray] = {}
        self._limits: Dict[Tuple[int, int], Optional[float]] = {}

    @property
    def explicit(self) -> bool:
        return self._explicit is not None

    @property
    def size(self) -> Optional[int]:
        return None if self._explicit is None else self._explicit.shape[0]

    def log_alpha_block(self, n: int) -> np.ndarray:
        """log α_ij for i, j = 1..n (row i, column j)."""
        if self._explicit is not None:
            if n > self._explicit.shape[0]:
                raise ValueError(f"explicit matrices only cover {self._explicit.shape[0]} indices")
            return self._explicit[:n, :n]
        if n not in self._blocks:
            logs = np.stack([self.family.log_weights(k, n) for k in range(1, self.level_cap + 1)])
            with np.errstate(invalid="ignore"):
                diff = logs[:, None, :] - logs[:, :, None]
            diff = np.where(np.isnan(diff), np.inf, diff)
            block = np.minimum(0.0, diff.min(axis=0))
            block.setflags(write=False)
            self._blocks[n] = block
        return self._blocks[n]

    def alpha_block(self, n: int) -> np.ndarray:
        return np.exp(self.log_alpha_block(n))

    def beta_block(self, n: int) -> np.ndarray:
        return 1.0 - self.alpha_block(n)

    def log_beta_block(self, n: int) -> np.ndarray:
        return _log_one_minus(self.log_alpha_block(n))

    def alpha(self, i: int, j: int) -> float:
        """α_ij with the level infimum refined by the limit k -> oo."""
        capped = float(np.exp(self.log_alpha_block(max(i, j))[i - 1, j - 1]))
        if self.explicit:
            return capped
        limit = self._ratio_limit(i, j)
        return capped if limit is None else min(capped, limit)

    def beta(self, i: int, j: int) -> float:
        return 1.0 - self.alpha(i, j)

    def _ratio_limit(self, i: int, j: int) -> Optional[float]:
        if (i, j) in self._limits:
            return self._limits[(i, j)]
        value = None
        symbolic = self.family.symbolic_node()
        expr = None if symbolic is None else oracle.expr_of(symbolic)
        if expr is not None and self.family.index_set.kind == IndexKind.NATURALS:
            ratio = sympy.powsimp(expr.subs(oracle.I, j) / expr.subs(oracle.I, i), force=True)
            limit = oracle.limit_at_infinity(ratio, oracle.K)
            if limit is not None and not isinstance(limit, sympy.AccumBounds) and limit.is_real:
                value = math.inf if limit == sympy.oo else float(limit)
        self._limits[(i, j)] = value
        return value

    def m1_violations(self, n: int) -> int:
        """Entries of the n×n prefix where α + β != 1 in floating point."""
        alpha = self.alpha_block(n)
        return int(np.count_nonzero(alpha + (1.0 - alpha) != 1.0))

    def to_dict(self, n: int = 5) -> Dict:
        n = min(n, self.size or n)
        return {
            "family": self.family.name,
            "level_cap": self.level_cap,
            "explicit": self.explicit,
            "alpha": self.alpha_block(n).tolist(),
        }


def construct_M_matrices(family: WeightFamily, level_cap: Optional[int] = None) -> MMatrices:
    """
    The matrices from the monotone-family construction.

    Raises:
        HypothesisError: the family is not monotone in the index, or not on
            the naturals
    """
    if family.index_set.kind != IndexKind.NATURALS:
        raise HypothesisError(f"{family.name}: (M) matrices need the naturals as index set")
    if family.flags.monotone_in_index == Monotonicity.NONE:
        raise HypothesisError(f"{family.name}: weights are not monotone in the index")
    return MMatrices(family, level_cap)


# ---------------------------------------------------------------------------
# (M2) / (M3) statistics
# ---------------------------------------------------------------------------

def _m_statistic(matrices: MMatrices, family: WeightFamily, k: int, m: int, n: int,
                 variant: str) -> float:
    """
    log C needed for (M2) and (M3) at source level k and target level m on
    the n×n prefix.
    """
    p = family.log_weights(k, n)
    q = family.log_weights(m, n)
    q_power = 2.0 if variant == REVISED else 1.0
    pp = p[:, None] + p[None, :]
    with np.errstate(invalid="ignore"):
        m2 = matrices.log_alpha_block(n) + pp - q_power * q[None, :]
        m3 = matrices.log_beta_block(n) + pp - q_power * q[:, None]
    stats = np.concatenate([m2.ravel(), m3.ravel()])
    stats = stats[~np.isnan(stats)]
    return float(stats.max()) if stats.size else float("-inf")


def _proof_violations(matrices: MMatrices, family: WeightFamily, k: int, n: int) -> int:
    """Pairs breaking α_ij <= p_j/p_i or β_ij <= p_i/p_j at level k."""
    p = family.log_weights(k, n)
    delta = p[None, :] - p[:, None]
    slack = _SLACK * np.maximum(1.0, np.abs(delta))
    with np.errstate(invalid="ignore"):
        bad_alpha = matrices.log_alpha_block(n) - delta > slack
        bad_beta = matrices.log_beta_block(n) + delta > slack
    return int(np.count_nonzero(bad_alpha | bad_beta))


def _search_target(matrices: MMatrices, family: WeightFamily, k: int, n: int, cap: int,
                   variant: str) -> Tuple[Optional[int], Optional[float], Dict[int, float]]:
    """
    Smallest m in k..cap whose statistic is finite and, unless the prefix
    covers the whole index set, has settled.
    """
    exact = family.index_set.covers(n)
    half = max(1, n // 2)
    trend = {}
    for m in range(k, cap + 1):
        full = _m_statistic(matrices, family, k, m, n, variant)
        head = _m_statistic(matrices, family, k, m, half, variant)
        trend[m] = full
        if full == float("inf"):
            continue
        if exact or full - head <= 1e-9 * max(1.0, abs(full)):
            return m, full, trend
    return None, None, trend


def check_M(family: WeightFamily, matrices: Optional[MMatrices] = None, depth: Optional[int] = None,
            level_budget: Optional[int] = None, variant: str = REVISED) -> Verdict:
    """
    Semi-decide condition (M).

    Fails only on a builtin or curated fact; otherwise Holds needs either the
    monotone construction or a finite index set.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown (M) variant {variant!r}; expected one of {VARIANTS}")
    n = family.index_set.clamp(depth or config.get("analysis.m_matrix_depth", 200))
    known = family.fact("condition_m")
    if known is not None and not known.value:
        rule = "curated" if known.curated else "builtin"
        return Verdict.fails(n, f"(M) fails for {family.name}: {known.rule}", proof_rule=rule)

    top = family.clamp_level(resolve_budget(level_budget))
    monotone = (family.index_set.kind == IndexKind.NATURALS
                and family.flags.monotone_in_index != Monotonicity.NONE)
    if matrices is None and monotone:
        matrices = construct_M_matrices(family)
    if matrices is not None and matrices.size is not None:
        n = min(n, matrices.size)

    if matrices is not None and not matrices.explicit and monotone and variant == REVISED:
        violations = {k: _proof_violations(matrices, family, k, n)
                      for k in range(1, min(top, matrices.level_cap) + 1)}
        if not any(violations.values()):
            return Verdict.holds(n, f"(M) holds for {family.name} with C = 1 and q = p",
                                 matrices=matrices, proof_rule="monotone_family",
                                 constants={k: {"target_level": k, "logC": 0.0} for k in violations},
                                 variant=variant)
        logger.warning("%s is declared monotone but the (M) proof inequality fails on %s",
                       family.name, {k: v for k, v in violations.items() if v})

    if known is not None and variant == REVISED:
        rule = "curated" if known.curated else "builtin"
        return Verdict.holds(n, f"(M) holds for {family.name}: {known.rule}", matrices=matrices,
                             proof_rule=rule, variant=variant)
    if matrices is None:
        return Verdict.unknown(n, f"(M) undecided for {family.name}: no matrices to check",
                               variant=variant)

    cap = family.clamp_level(2 * top + 2)
    constants = {}
    trends = {}
    for k in range(1, top + 1):
        m, log_c, trend = _search_target(matrices, family, k, n, cap, variant)
        trends[k] = trend
        if m is None:
            return Verdict.unknown(n, f"(M) found no target level for level {k} of {family.name}",
                                   matrices=matrices, source_level=k, trend=trend, variant=variant)
        constants[k] = {"target_level": m, "logC": log_c}

    if family.index_set.covers(n):
        return Verdict.holds(n, f"(M) holds for {family.name} on its finite index set",
                             matrices=matrices, constants=constants, proof_rule="enumeration",
                             variant=variant)
    return Verdict.unknown(n, f"(M) plausible for {family.name} on the first {n} indices",
                           matrices=matrices, constants=constants, tier=Tier.EMPIRICAL,
                           variant=variant)
