"""
Seminorms, membership and the multiplication bound.

A prefix statistic is always exact (tree log-sum-exp or max in log-domain).
Beyond the prefix only a tail rule can say anything: the limit oracle bounds
the tail by a geometric closed form, the integral test, or eventual
monotonicity. Without a tail rule the status stays unknown.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from workbench.config import resolve_budget
from workbench.errors import CertificateMissingError, PreconditionError
from workbench.verdict import Verdict
from weights import dsl, oracle
from weights.family import WeightFamily, running_max_family
from weights.logvalue import LogValue, log_max, log_mul, tree_logsumexp
from relations.domination import is_algebra
from sequences.element import SeqElement, pointwise_mul

logger = logging.getLogger(__name__)

SUM = "sum"
SUP = "sup"


class NormStatus(str, Enum):
    CONVERGED = "converged"
    DIVERGING = "diverging"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SeminormValue:
    """Prefix value plus, when a tail rule allows it, a bound for the rest."""

    partial: LogValue
    tail_bound: Optional[LogValue]
    status: NormStatus
    trend: Dict[int, float] = field(default_factory=dict)
    kind_is_sup: bool = False

    @property
    def bound(self) -> Optional[LogValue]:
        if self.tail_bound is None:
            return None
        if self.kind_is_sup:
            return max(self.partial, self.tail_bound)
        return self.partial + self.tail_bound

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "status": self.status.value,
            "partial": self.partial.to_dict(),
            "tail_bound": None if self.tail_bound is None else self.tail_bound.to_dict(),
        }
        if self.trend:
            data["trend"] = {str(n): v for n, v in self.trend.items()}
        return data


@dataclass(frozen=True)
class InequalityReport:
    """lhs <= rhs checked in log-domain."""

    name: str
    lhs_log: float
    rhs_log: float
    holds: bool
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def slack_log(self) -> float:
        return self.rhs_log - self.lhs_log

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "lhs_log": self.lhs_log, "rhs_log": self.rhs_log,
                "holds": self.holds, "details": self.details}


def log_le(lhs: float, rhs: float) -> bool:
    """lhs <= rhs up to a relative rounding margin."""
    if lhs == -np.inf:
        return True
    return lhs <= rhs + 1e-12 * max(1.0, abs(rhs))


def _prefix(kind: str, log_terms: np.ndarray) -> float:
    return log_max(log_terms) if kind == SUP else tree_logsumexp(log_terms)


def series_value(kind: str, log_terms: np.ndarray, tail: Optional[dsl.Node], start: int,
                 complete: bool = False) -> SeminormValue:
    """
    Seminorm of a prefix of terms with an optional closed-form tail.

    Args:
        kind: SUM or SUP
        log_terms: log-magnitudes of the prefix terms
        tail: DSL tree of the terms beyond the prefix (None when unknown)
        start: first index of the tail
        complete: the prefix already enumerates the whole index set
    """
    partial = LogValue.from_log(_prefix(kind, log_terms))
    sup = kind == SUP
    if complete:
        return SeminormValue(partial, LogValue.zero(), NormStatus.CONVERGED, kind_is_sup=sup)
    if tail is None:
        half = max(1, log_terms.size // 2)
        trend = {half: _prefix(kind, log_terms[:half]), int(log_terms.size): partial.log}
        return SeminormValue(partial, None, NormStatus.UNKNOWN, trend, kind_is_sup=sup)

    expr = oracle.expr_of(tail)
    if expr is None:
        return SeminormValue(partial, None, NormStatus.UNKNOWN, kind_is_sup=sup)
    if sup:
        tail_log = float("-inf") if expr.is_zero else oracle.tail_sup_log(oracle.log_of(expr), start)
    else:
        converges = oracle.is_summable(expr)
        if converges is False:
            return SeminormValue(partial, LogValue.infinity(), NormStatus.DIVERGING, kind_is_sup=sup)
        tail_log = oracle.tail_sum_log(expr, start) if converges else None
        if converges and tail_log is None:
            logger.debug("Tail of %s is summable but has no closed-form bound", expr)
            return SeminormValue(partial, None, NormStatus.CONVERGED, kind_is_sup=sup)
    if tail_log is None:
        return SeminormValue(partial, None, NormStatus.UNKNOWN, kind_is_sup=sup)
    if tail_log == float("inf"):
        return SeminormValue(partial, LogValue.infinity(), NormStatus.DIVERGING, kind_is_sup=sup)
    return SeminormValue(partial, LogValue.from_log(tail_log), NormStatus.CONVERGED, kind_is_sup=sup)


def _weighted_tail(x: SeqElement, node: Optional[dsl.Node]) -> Optional[dsl.Node]:
    if x.tail_rule is None or node is None:
        return None
    return dsl.mul(x.tail_rule.root, node)


def _seminorm(kind: str, x: SeqElement, family: WeightFamily, k: int) -> SeminormValue:
    k = family.check_level(k)
    log_terms = log_mul(x.log_abs, family.log_weights(k, x.n)) if x.n else np.empty(0)
    complete = family.index_set.covers(x.n)
    tail = None if complete else _weighted_tail(x, family.level_node(k))
    return series_value(kind, np.asarray(log_terms), tail, x.n + 1, complete)


def seminorm_l1(x: SeqElement, family: WeightFamily, k: int) -> SeminormValue:
    """‖x‖_p = sum_i |x_i| p^(k)_i."""
    return _seminorm(SUM, x, family, k)


def seminorm_sup(x: SeqElement, family: WeightFamily, k: int) -> SeminormValue:
    """‖x‖_p^inf = sup_i |x_i| p^(k)_i."""
    return _seminorm(SUP, x, family, k)


def _uniform_tail(kind: str, x: SeqElement, family: WeightFamily) -> Optional[bool]:
    """Does the tail statistic stay finite for every level at once?"""
    node = _weighted_tail(x, family.symbolic_node())
    expr = None if node is None else oracle.expr_of(node)
    if expr is None:
        return None
    if kind == SUP:
        return oracle.is_bounded_above(oracle.log_of(expr)) if not expr.is_zero else True
    return oracle.is_summable(expr)


def _membership(kind: str, x: SeqElement, family: WeightFamily,
                level_budget: Optional[int]) -> Verdict:
    top = family.clamp_level(resolve_budget(level_budget))
    values = {}
    for k in range(1, top + 1):
        value = _seminorm(kind, x, family, k)
        values[k] = value
        if value.status == NormStatus.DIVERGING:
            return Verdict.fails(x.n, f"seminorm at level {k} diverges", source_level=k,
                                 seminorms=values)
    converged = all(v.status == NormStatus.CONVERGED for v in values.values())
    all_levels = top == family.level_count or family.index_set.covers(x.n)
    if converged and not all_levels and family.level_count is None:
        all_levels = _uniform_tail(kind, x, family) is True
    if converged and all_levels:
        return Verdict.holds(x.n, f"every seminorm of {x.name or 'x'} converges", seminorms=values)
    return Verdict.unknown(x.n, f"levels 1..{top} give no proof for {x.name or 'x'}",
                           seminorms=values)


def membership(x: SeqElement, family: WeightFamily, level_budget: Optional[int] = None) -> Verdict:
    """Semi-decide x in λ(P)."""
    return _membership(SUM, x, family, level_budget)


def membership_sup(x: SeqElement, family: WeightFamily,
                   level_budget: Optional[int] = None) -> Verdict:
    """Semi-decide x in λ∞(P)."""
    return _membership(SUP, x, family, level_budget)


def mul_bound_check(x: SeqElement, y: SeqElement, family: WeightFamily, k: int,
                    certificate=None) -> InequalityReport:
    """
    ‖xy‖_p <= C ‖x‖_q ‖y‖_q on the common prefix, with (q, C) from the
    algebra certificate for level k.

    Raises:
        CertificateMissingError: no algebra certificate, or none for level k
    """
    if certificate is None:
        verdict = is_algebra(family, level_budget=k)
        if not verdict.is_holds or verdict.certificate is None:
            raise CertificateMissingError(f"no algebra certificate for {family.name}: {verdict.reason}")
        certificate = verdict.certificate
    bound = certificate.bound_for(k)
    q_family = running_max_family(family)
    n = min(x.n, y.n)
    xy = pointwise_mul(x, y)
    p_logs = family.log_weights(k, n)
    q_logs = q_family.log_weights(bound.target_level, n)
    lhs = tree_logsumexp(log_mul(xy.log_abs, p_logs))
    x_q = tree_logsumexp(log_mul(x.log_abs[:n], q_logs))
    y_q = tree_logsumexp(log_mul(y.log_abs[:n], q_logs))
    rhs = float(log_mul(log_mul(bound.log_c, x_q), y_q))
    return InequalityReport("mul_bound", lhs, rhs, log_le(lhs, rhs),
                            {"level": k, "target_level": bound.target_level,
                             "logC": bound.log_c, "N": n})


def dual_membership(y: SeqElement, generators: List[SeqElement]) -> Verdict:
    """
    Necessary condition for y in the Köthe-Toeplitz dual: sum |y_i x_i| < inf
    for every supplied x. Holds only means "holds against the sample".

    Raises:
        PreconditionError: no generators
    """
    if not generators:
        raise PreconditionError("dual membership needs at least one generator")
    values = []
    for index, x in enumerate(generators):
        product = pointwise_mul(y, x)
        tail = None if product.tail_rule is None else product.tail_rule.root
        complete = y.index_set.covers(product.n)
        value = series_value(SUM, product.log_abs, tail, product.n + 1, complete)
        values.append(value)
        if value.status == NormStatus.DIVERGING:
            return Verdict.fails(product.n, f"sum |y_i x_i| diverges for generator {index + 1}",
                                 generator=index + 1, sums=values)
    if all(v.status == NormStatus.CONVERGED for v in values):
        return Verdict.holds(min(x.n for x in generators),
                             f"holds against sample of {len(generators)} generators",
                             sampled=True, sums=values)
    return Verdict.unknown(min(x.n for x in generators), "some pairings have no tail proof",
                           sums=values)
