"""
Approximate identities of Köthe algebras satisfying (B) and (N).

For a in λ(P), a level p and a level q with p <= q and p <= λq (λ in l1),
split the index set into I' = {p_i > 1} and I'' = {p_i <= 1}:

    J'_n  = I'                         when I' is finite
          = {i in I' : q_i <= n}       otherwise
    J''_n = {i in I'' : |a_i| p_i >= 1/n²}
    u_n   = indicator of J'_n ∪ J''_n

Then ‖u_n‖_p^inf <= n and n‖a - a u_n‖_p^inf -> 0. Both sets are scanned on
a prefix; beyond it the tail rule of a bounds what is left out.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from workbench.config import config, resolve_budget, resolve_depth
from workbench.errors import CertificateMissingError, PreconditionError, TailBoundError
from weights import dsl, oracle
from weights.family import WeightFamily, running_max_family
from weights.index_set import IndexKind
from weights.logvalue import log_max, log_mul, tree_logsumexp
from conditions.checks import check_B, check_N
from sequences.element import SeqElement, pointwise_mul

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "value", "branch_bound_Ipp", "branch_bound_Ip")

_REL = 1e-12
_MAX_DOUBLINGS = 24


def _slack(value: float) -> float:
    return _REL * max(1.0, abs(value))


def _tail_log(a: SeqElement, node: Optional[dsl.Node], start: int, kind: str = "sup") -> Optional[float]:
    """log of sup (or sum) over i >= start of |a_i| w_i, from the tail rule of a."""
    if a.tail_rule is None:
        return None
    if a.tail_rule.is_zero:
        return float("-inf")
    if node is None:
        return None
    expr = oracle.expr_of(dsl.mul(a.tail_rule.root, node))
    if expr is None:
        return None
    if expr.is_zero:
        return float("-inf")
    if kind == "sup":
        return oracle.tail_sup_log(oracle.log_of(expr), start)
    return oracle.tail_sum_log(expr, start)


def _doubling_depth(depth: int, accept) -> Optional[int]:
    """Smallest depth * 2^t (t >= 1) accepted, or None."""
    candidate = depth
    for _ in range(_MAX_DOUBLINGS):
        candidate *= 2
        if accept(candidate):
            return candidate
    return None


@dataclass(frozen=True, eq=False)
class ApproxIdentityStep:
    """u_n together with the two index sets it is the indicator of."""

    n: int
    J_prime: Tuple[int, ...]
    J_doubleprime: Tuple[int, ...]
    u: SeqElement
    p_level: int
    q_level: int

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.J_prime + self.J_doubleprime))

    @property
    def outside(self) -> np.ndarray:
        """Mask of prefix indices not in J'_n ∪ J''_n."""
        return self.u.log_abs == -np.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "p_level": self.p_level,
            "q_level": self.q_level,
            "depth": self.u.n,
            "J_prime": list(self.J_prime),
            "J_doubleprime": list(self.J_doubleprime),
        }


class ApproxIdentityBuilder:
    """
    Produces u_n for one element and one level.

    The (B) and (N) verdicts are checked once; the (N) certificate supplies q
    unless a level is passed explicitly.

    Raises:
        CertificateMissingError: (B) or (N) is not proven, or the (N)
            certificate has no bound for p_level
        PreconditionError: a has no tail rule on an infinite index set, or an
            explicit q_level lies below p on the prefix
        NotAnAlgebraError: the family is not an algebra
    """

    def __init__(self, a: SeqElement, family: WeightFamily, p_level: int = 1,
                 q_level: Optional[int] = None, depth: Optional[int] = None,
                 level_budget: Optional[int] = None):
        pairs = family.index_set.kind == IndexKind.NATURAL_PAIRS
        self.depth = family.index_set.clamp(resolve_depth(depth, pairs))
        self.complete = family.index_set.covers(self.depth)
        if a.tail_rule is None and not family.index_set.covers(a.n):
            raise PreconditionError(f"{a.name or 'a'} needs a tail rule to bound what lies past the prefix")
        self.a = a
        self.family = family
        self.ordered = running_max_family(family)
        self.p_level = self.ordered.check_level(p_level)

        budget = max(self.p_level, resolve_budget(level_budget))
        biprojective = check_B(family, self.depth, budget)
        if not biprojective.is_holds:
            raise CertificateMissingError(f"(B) is not proven for {family.name}: {biprojective.reason}")
        nuclear = check_N(family, self.depth, budget)
        if not nuclear.is_holds or nuclear.certificate is None:
            raise CertificateMissingError(f"(N) is not proven for {family.name}: {nuclear.reason}")
        self.bound = nuclear.certificate.bound_for(self.p_level)

        self._p = self.ordered.log_weights(self.p_level, self.depth)
        if q_level is None:
            self.q_level = self.bound.target_level
        else:
            self.q_level = self.ordered.check_level(q_level)
        self._q = self.ordered.log_weights(self.q_level, self.depth)
        if np.any(self._p > self._q + _REL * np.maximum(1.0, np.abs(self._q))):
            raise PreconditionError(f"level {self.q_level} of {family.name} is not above level {self.p_level}")

        self._zero = dsl.parse_weight_expr("0")
        self._weighted = log_mul(a.extended_log_abs(self.depth), self._p)
        self._i_prime = self._p > 0.0
        self.i_prime_finite = self._decide_i_prime_finite()
        self._tail_p = self._tail(self.depth + 1)
        self._q_floor = None if self.complete or self.i_prime_finite else self._q_floor_log(self.depth + 1)
        if not (self.complete or self.i_prime_finite) and self._q_floor is None:
            logger.warning("Cannot bound q past index %d; J'_n is scanned on the prefix only", self.depth)
        logger.info("Approximate identity for %s on %s: p = %d, q = %d, I' %s",
                    a.name or "a", family.name, self.p_level, self.q_level,
                    "finite" if self.i_prime_finite else "infinite")

    # -- index sets --------------------------------------------------------

    def _decide_i_prime_finite(self) -> bool:
        if self.complete:
            return True
        node = self.ordered.level_node(self.p_level)
        expr = None if node is None else oracle.expr_of(node)
        if expr is None:
            return False
        limit = oracle.limit_at_infinity(oracle.log_of(expr))
        if limit is None or not limit.is_negative:
            return False
        beyond = oracle.tail_sup_log(oracle.log_of(expr), self.depth + 1)
        if beyond is None or beyond > 0.0:
            logger.warning("I' of %s is finite but may reach past index %d", self.family.name, self.depth)
        return True

    def _tail(self, start: int) -> Optional[float]:
        if self.complete:
            return float("-inf")
        return _tail_log(self.a, self.ordered.level_node(self.p_level), start)

    def _q_floor_log(self, start: int) -> Optional[float]:
        """log inf_{i >= start} q_i when q is eventually nondecreasing from start."""
        node = self.ordered.level_node(self.q_level)
        expr = None if node is None else oracle.expr_of(node)
        if expr is None:
            return None
        log_q = oracle.log_of(expr)
        if oracle.monotonicity(log_q, start) != oracle.NONDECREASING:
            return None
        return oracle.value_log(log_q, start)

    def _check_tails(self, n: int):
        log_n = math.log(n)
        limit = -2.0 * log_n
        if self._tail_p is None:
            raise TailBoundError(
                f"no closed-form bound for |a_i| p_i past index {self.depth} of {self.family.name}")
        if self._tail_p >= limit:
            needed = _doubling_depth(self.depth, lambda d: (self._tail(d + 1) or 0.0) < limit)
            raise TailBoundError(f"sup of |a_i| p_i past index {self.depth} is not below 1/n² for n = {n}",
                                 needed)
        if self.complete or self.i_prime_finite:
            return
        floor = self._q_floor
        if floor is not None and floor <= log_n:
            needed = _doubling_depth(self.depth, lambda d: (self._q_floor_log(d + 1) or 0.0) > log_n)
            raise TailBoundError(f"q_i <= {n} past index {self.depth}, so J'_{n} leaves the prefix", needed)

    def build(self, n: int) -> ApproxIdentityStep:
        """
        u_n for one n >= 1.

        Raises:
            TailBoundError: the 1/n² tail bound, or q_i > n, fails past the prefix
        """
        n = int(n)
        if n < 1:
            raise ValueError("n must be at least 1")
        self._check_tails(n)
        log_n = math.log(n)
        if self.i_prime_finite:
            j_prime = self._i_prime
        else:
            j_prime = self._i_prime & (self._q <= log_n + _slack(log_n))
        j_double = ~self._i_prime & (self._weighted >= -2.0 * log_n - _slack(2.0 * log_n))
        chosen = j_prime | j_double
        u = SeqElement(np.where(chosen, 0.0, -np.inf), np.zeros(self.depth),
                       self._zero, self.family.index_set, f"u_{n}")
        return ApproxIdentityStep(
            n=n,
            J_prime=tuple(int(r) for r in np.flatnonzero(j_prime) + 1),
            J_doubleprime=tuple(int(r) for r in np.flatnonzero(j_double) + 1),
            u=u,
            p_level=self.p_level,
            q_level=self.q_level,
        )

    def net(self, ns: Iterable[int]) -> List[ApproxIdentityStep]:
        return [self.build(n) for n in ns]


def build_un(a: SeqElement, family: WeightFamily, p_level: int, n: int, depth: Optional[int] = None,
             q_level: Optional[int] = None, level_budget: Optional[int] = None) -> ApproxIdentityStep:
    """A single step u_n; see ApproxIdentityBuilder for the errors."""
    return ApproxIdentityBuilder(a, family, p_level, q_level, depth, level_budget).build(n)


def build_net(a: SeqElement, family: WeightFamily, p_level: int, ns: Iterable[int],
              depth: Optional[int] = None, q_level: Optional[int] = None,
              level_budget: Optional[int] = None) -> List[ApproxIdentityStep]:
    """Steps for every n in ns, validating the certificates once."""
    return ApproxIdentityBuilder(a, family, p_level, q_level, depth, level_budget).net(ns)


# ---------------------------------------------------------------------------
# Convergence of n‖a - a u_n‖_p^inf
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    epsilon: float
    grace_window: int
    rows: List[Dict[str, float]]
    first_below: Optional[int]
    non_monotone: List[int] = field(default_factory=list)
    unit_norm_violations: List[int] = field(default_factory=list)
    branch_violations: List[int] = field(default_factory=list)
    tail_bounded: bool = True

    @property
    def converged(self) -> bool:
        return self.first_below is not None

    @property
    def values(self) -> List[float]:
        return [row["value"] for row in self.rows]

    def csv_rows(self) -> List[List[Any]]:
        return [[row[column] for column in CSV_COLUMNS] for row in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "grace_window": self.grace_window,
            "converged": self.converged,
            "first_below": self.first_below,
            "non_monotone": self.non_monotone,
            "unit_norm_violations": self.unit_norm_violations,
            "branch_violations": self.branch_violations,
            "tail_bounded": self.tail_bounded,
            "rows": self.rows,
        }


def _first_below(ns: Sequence[int], values: Sequence[float], epsilon: float) -> Optional[int]:
    first = None
    for n, value in zip(ns, values):
        if value <= epsilon:
            first = n if first is None else first
        else:
            first = None
    return first


def verify_convergence(a: SeqElement, family: WeightFamily, p_level: int,
                       steps: Sequence[ApproxIdentityStep], epsilon: Optional[float] = None,
                       grace_window: Optional[int] = None) -> ConvergenceReport:
    """
    n‖a - a u_n‖_p^inf per step, with the two branch bounds

        I''  n sup_{I'' \\ J''_n} |a_i| p_i <= 1/n
        I'   n sup_{I' \\ J'_n} |a_i| p_i <= sup_{I' \\ J'_n} |a_i| q_i²

    Non-monotone steps past the grace window are reported, not raised.
    """
    if not steps:
        raise ValueError("no steps to verify")
    epsilon = float(epsilon if epsilon is not None else config.get("analysis.epsilon", 1e-6))
    grace_window = int(grace_window if grace_window is not None
                       else config.get("convergence.grace_window", 10))
    ordered = running_max_family(family)
    depth = steps[0].u.n
    q_level = steps[0].q_level
    complete = family.index_set.covers(depth)

    a_logs = a.extended_log_abs(depth)
    p_logs = ordered.log_weights(p_level, depth)
    q_logs = ordered.log_weights(q_level, depth)
    weighted = log_mul(a_logs, p_logs)
    weighted_q2 = log_mul(a_logs, 2.0 * q_logs)
    i_prime = p_logs > 0.0

    if complete:
        tail_p = tail_q2 = float("-inf")
    else:
        tail_p = _tail_log(a, ordered.level_node(p_level), depth + 1)
        q_node = ordered.level_node(q_level)
        tail_q2 = _tail_log(a, None if q_node is None else dsl.power(q_node, dsl.num(2)), depth + 1)
    tail_bounded = tail_p is not None
    if not tail_bounded:
        logger.warning("No tail bound for %s on %s; values cover the prefix only",
                       a.name or "a", family.name)

    rows, unit_violations, branch_violations = [], [], []
    for step in steps:
        outside = step.outside
        log_n = math.log(step.n)
        defect = max(log_max(weighted[outside]), tail_p if tail_p is not None else float("-inf"))
        branch_ip = max(log_max(weighted_q2[outside & i_prime]),
                        tail_q2 if tail_q2 is not None else float("-inf"))
        value = float(np.exp(log_n + defect))
        row = {
            "n": step.n,
            "value": value,
            "branch_bound_Ipp": 1.0 / step.n,
            "branch_bound_Ip": float(np.exp(branch_ip)),
        }
        rows.append(row)
        if log_max(p_logs[~outside]) > log_n + _slack(log_n):
            unit_violations.append(step.n)
        if value > max(row["branch_bound_Ipp"], row["branch_bound_Ip"]) * (1.0 + 1e-9):
            branch_violations.append(step.n)

    ns = [row["n"] for row in rows]
    values = [row["value"] for row in rows]
    non_monotone = [ns[i] for i in range(max(1, grace_window), len(values))
                    if values[i] > values[i - 1] * (1.0 + 1e-12)]
    if non_monotone:
        logger.warning("n‖a - a u_n‖ increases at %d steps past the grace window (first n = %d)",
                       len(non_monotone), non_monotone[0])
    return ConvergenceReport(
        epsilon=epsilon,
        grace_window=grace_window,
        rows=rows,
        first_below=_first_below(ns, values, epsilon),
        non_monotone=non_monotone,
        unit_norm_violations=unit_violations,
        branch_violations=branch_violations,
        tail_bounded=tail_bounded,
    )


# ---------------------------------------------------------------------------
# Lawson-Read conditions on a finite sample
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LawsonReadReport:
    """Per-condition outcome; (iii) and (iv) are exact, (i) and (ii) numeric."""

    conditions: Dict[str, Dict[str, Any]]

    @property
    def all_hold(self) -> bool:
        return all(entry["holds"] for entry in self.conditions.values())

    def holds(self, name: str) -> bool:
        return bool(self.conditions[name]["holds"])

    def to_dict(self) -> Dict[str, Any]:
        return {"all_hold": self.all_hold, "conditions": self.conditions}


def _defect_log(a: SeqElement, ordered: WeightFamily, level: int, step: ApproxIdentityStep,
                complete: bool) -> float:
    """log ‖a - a u‖_p at one level (the l1 seminorm)."""
    depth = step.u.n
    terms = log_mul(a.extended_log_abs(depth), ordered.log_weights(level, depth))
    prefix = tree_logsumexp(terms[step.outside])
    if complete:
        return prefix
    tail = _tail_log(a, ordered.level_node(level), depth + 1, kind="sum")
    if tail is None:
        return prefix
    return float(np.logaddexp(prefix, tail))


def verify_lawson_read(samples: Sequence[SeqElement], family: WeightFamily,
                       steps: Sequence[ApproxIdentityStep], levels: Optional[Sequence[int]] = None,
                       epsilon: Optional[float] = None) -> LawsonReadReport:
    """
    Check the four conditions on a sample of A and a finite net.

        (i)   ‖a - a u‖_p -> 0                 last step below epsilon
        (ii)  ‖a - a u‖_p ‖u‖_p -> 0           last step below epsilon
        (iii) π(d) = 2u - u² with d = Σ_J e_i ⊗ e_i, i.e. u² = u
        (iv)  a·d = d·a

    Only necessary consequences on the prefix are verified.
    """
    if not steps:
        raise ValueError("no steps to verify")
    epsilon = float(epsilon if epsilon is not None else config.get("analysis.epsilon", 1e-6))
    ordered = running_max_family(family)
    levels = list(levels) if levels else [steps[0].p_level]
    complete = family.index_set.covers(steps[0].u.n)

    defects: Dict[str, Dict[str, List[float]]] = {}
    products: Dict[str, Dict[str, List[float]]] = {}
    for index, a in enumerate(samples):
        label = a.name or f"sample_{index + 1}"
        defects[label], products[label] = {}, {}
        for level in levels:
            p_logs = ordered.log_weights(level, steps[0].u.n)
            d_values, prod_values = [], []
            for step in steps:
                defect = _defect_log(a, ordered, level, step, complete)
                unit = tree_logsumexp(p_logs[~step.outside])
                d_values.append(float(np.exp(defect)))
                prod_values.append(float(np.exp(log_mul(defect, unit))))
            defects[label][str(level)] = d_values
            products[label][str(level)] = prod_values

    def last_below(table):
        return all(values[-1] <= epsilon for by_level in table.values() for values in by_level.values())

    idempotent = all(np.array_equal(pointwise_mul(s.u, s.u).log_abs, s.u.log_abs)
                     and np.all(np.isin(s.u.log_abs, (0.0, -np.inf))) and not np.any(s.u.phase)
                     for s in steps)
    commuting = all(np.array_equal(pointwise_mul(a, s.u).log_abs, pointwise_mul(s.u, a).log_abs)
                    and np.array_equal(pointwise_mul(a, s.u).phase, pointwise_mul(s.u, a).phase)
                    for a in samples for s in steps)

    ns = [s.n for s in steps]
    return LawsonReadReport({
        "i": {"holds": last_below(defects), "exact": False, "n": ns, "values": defects},
        "ii": {"holds": last_below(products), "exact": False, "n": ns, "values": products},
        "iii": {"holds": bool(idempotent), "exact": True},
        "iv": {"holds": bool(commuting), "exact": True},
    })
