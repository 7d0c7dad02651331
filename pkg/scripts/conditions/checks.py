"""
Conditions (U), (N), (B) and the logarithmic growth criterion.

    (U)  sum_i p_i < inf for every p in P
    (N)  every p has a q with sum_i p_i / q_i < inf
    (B)  P ~ P²
    log  sup_n (log n) / (log p_n) < inf for some p in P

Builtin facts answer first. Otherwise the limit oracle decides level by
level and, for pointwise-ordered families, through the level supremum.
"""

import logging
from typing import Optional

import numpy as np
import sympy

from workbench.config import resolve_budget, resolve_depth
from workbench.errors import HypothesisError, NotAnAlgebraError
from workbench.verdict import Verdict
from weights import oracle
from weights.family import WeightFamily, running_max_family, square
from weights.index_set import IndexKind
from weights.logvalue import log_max, tree_logsumexp
from relations.certificates import SUMMABLE, DominationCertificate
from relations.domination import equivalent, is_algebra
from relations.search import LevelSearch
from sequences.element import SeqElement
from sequences.norms import InequalityReport, log_le

logger = logging.getLogger(__name__)


def _depth(family: WeightFamily, depth: Optional[int]) -> int:
    pairs = family.index_set.kind == IndexKind.NATURAL_PAIRS
    return family.index_set.clamp(resolve_depth(depth, pairs))


def _from_fact(family: WeightFamily, name: str, depth: int, label: str,
               certificate=None) -> Optional[Verdict]:
    known = family.fact(name)
    if known is None:
        return None
    reason = f"{label} {'holds' if known.value else 'fails'} for {family.name}: {known.rule}"
    details = {"proof_rule": "curated" if known.curated else "builtin"}
    if known.value:
        return Verdict.holds(depth, reason, certificate=certificate, **details)
    return Verdict.fails(depth, reason, **details)


# ---------------------------------------------------------------------------
# (U)
# ---------------------------------------------------------------------------

def check_U(family: WeightFamily, depth: Optional[int] = None,
            level_budget: Optional[int] = None) -> Verdict:
    """Every weight summable, i.e. λ(P) has an identity."""
    depth = _depth(family, depth)
    known = _from_fact(family, "unital", depth, "(U)")
    if known is not None:
        return known
    if family.index_set.covers(depth):
        return Verdict.holds(depth, f"(U) holds: {family.name} lives on a finite index set",
                             proof_rule="enumeration")

    top = family.clamp_level(resolve_budget(level_budget))
    partial_sums = {}
    undecided = []
    for k in range(1, top + 1):
        logs = family.log_weights(k, depth)
        partial_sums[k] = tree_logsumexp(logs)
        node = family.level_node(k)
        decided = None if node is None else oracle.series_converges(node)
        if decided is False:
            return Verdict.fails(depth, f"(U) fails: sum of level {k} of {family.name} diverges",
                                 source_level=k, proof_rule="oracle")
        if decided is None:
            undecided.append(k)

    if not undecided:
        if top == family.level_count:
            return Verdict.holds(depth, f"(U) holds: all {top} levels summable", proof_rule="oracle")
        if _all_levels_summable(family):
            return Verdict.holds(depth, "(U) holds: level supremum summable", proof_rule="oracle")
    return Verdict.unknown(depth, f"(U) undecided for {family.name}",
                           partial_sums=partial_sums, undecided_levels=undecided)


def _all_levels_summable(family: WeightFamily) -> bool:
    symbolic = family.symbolic_node()
    expr = None if symbolic is None else oracle.expr_of(symbolic)
    if expr is None:
        return False
    if family.flags.pointwise_ordered:
        supremum = oracle.level_supremum(expr)
        if supremum is not None and oracle.is_summable(supremum):
            return True
    return oracle.is_summable(expr) is True


# ---------------------------------------------------------------------------
# (N)
# ---------------------------------------------------------------------------

def check_N(family: WeightFamily, depth: Optional[int] = None,
            level_budget: Optional[int] = None) -> Verdict:
    """
    Grothendieck-Pietsch: for every level p a level q with sum p/q < inf.

    A Holds verdict carries the summability certificate (q per level and the
    log of the sum) used by gp_norm_check.
    """
    depth = _depth(family, depth)
    ordered = running_max_family(family)
    known = family.fact("nuclear")
    if known is not None and not known.value:
        return _from_fact(family, "nuclear", depth, "(N)")
    found = LevelSearch(ordered, ordered, SUMMABLE, depth, level_budget).run()
    if known is not None:
        return _from_fact(family, "nuclear", depth, "(N)", certificate=found.certificate)
    return found.with_reason(f"(N): {found.reason}")


def gp_norm_check(x: SeqElement, family: WeightFamily, certificate: DominationCertificate,
                  k: int) -> InequalityReport:
    """
    ‖x‖_p <= ‖p/q‖_l1 ‖x‖_q^inf on the prefix of x, with q and the l1 bound
    taken from a summability certificate.

    Raises:
        CertificateMissingError: the certificate has no bound for level k
    """
    bound = certificate.bound_for(k)
    ordered = running_max_family(family)
    n = x.n
    p_logs = ordered.log_weights(k, n)
    q_logs = ordered.log_weights(bound.target_level, n)
    with np.errstate(invalid="ignore"):
        lhs = tree_logsumexp(np.where(x.log_abs == -np.inf, -np.inf, x.log_abs + p_logs))
        sup_q = log_max(np.where(x.log_abs == -np.inf, -np.inf, x.log_abs + q_logs))
    rhs = bound.log_c + sup_q if sup_q != -np.inf else -np.inf
    return InequalityReport("gp_norm", lhs, rhs, log_le(lhs, rhs),
                            {"level": k, "target_level": bound.target_level, "logC": bound.log_c})


# ---------------------------------------------------------------------------
# (B)
# ---------------------------------------------------------------------------

def check_B(family: WeightFamily, depth: Optional[int] = None,
            level_budget: Optional[int] = None) -> Verdict:
    """
    P ~ P², equivalently λ(P) biprojective and biflat.

    Raises:
        NotAnAlgebraError: P < P² fails
    """
    algebra = is_algebra(family, depth, level_budget)
    if algebra.is_fails:
        raise NotAnAlgebraError(f"{family.name} is not an algebra: {algebra.reason}")
    verdict = equivalent(family, square(family), depth, level_budget)
    return verdict.with_reason(f"(B): {verdict.reason}")


# ---------------------------------------------------------------------------
# Logarithmic growth criterion
# ---------------------------------------------------------------------------

def _log_ratio_class(expr: sympy.Expr) -> Optional[bool]:
    """Is sup_n (log n)/(log p_n) finite for a weight expression p?"""
    log_p = oracle.log_of(expr)
    if not log_p.has(oracle.I):
        return False
    return oracle.is_bounded_above(sympy.log(oracle.I) / log_p)


def check_log_criterion(family: WeightFamily, depth: Optional[int] = None,
                        level_budget: Optional[int] = None) -> Verdict:
    """
    sup_n (log n)/(log p_n) < inf for some level p.

    Raises:
        HypothesisError: index set is not the naturals or weights dip below 1
    """
    if family.index_set.kind != IndexKind.NATURALS:
        raise HypothesisError("the log criterion needs the naturals as index set")
    if not family.flags.all_weights_ge_one:
        raise HypothesisError(f"the log criterion needs all weights of {family.name} >= 1")
    depth = _depth(family, depth)
    known = _from_fact(family, "log_criterion", depth, "log criterion")
    if known is not None:
        return known

    top = family.clamp_level(resolve_budget(level_budget))
    refuted = []
    trend = {}
    n = np.arange(2, depth + 1, dtype=float)
    for k in range(1, top + 1):
        logs = family.log_weights(k, depth)[1:]
        with np.errstate(divide="ignore"):
            ratios = np.where(logs > 0, np.log(n) / np.where(logs > 0, logs, 1.0), np.inf)
        trend[k] = float(np.max(ratios)) if ratios.size else 0.0
        node = family.level_node(k)
        expr = None if node is None else oracle.expr_of(node)
        decided = None if expr is None else _log_ratio_class(expr)
        if decided:
            return Verdict.holds(depth, f"log criterion holds at level {k}", source_level=k,
                                 proof_rule="oracle")
        if decided is False:
            refuted.append(k)

    if len(refuted) == top and family.level_count == top:
        return Verdict.fails(depth, "log criterion fails at every level", proof_rule="oracle")
    if family.flags.pointwise_ordered and family.symbolic_node() is not None:
        expr = oracle.expr_of(family.symbolic_node())
        supremum = None if expr is None else oracle.level_supremum(expr)
        if supremum is not None and _log_ratio_class(supremum) is False:
            return Verdict.fails(depth, f"log criterion fails against the level supremum {supremum}",
                                 proof_rule="oracle")
    return Verdict.unknown(depth, "log criterion undecided", trend=trend, refuted_levels=refuted)
