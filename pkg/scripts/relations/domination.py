"""
Domination P < Q, equivalence P ~ Q and the algebra condition P < P².
"""

import logging
from typing import Optional

import numpy as np

from workbench.config import resolve_budget, resolve_depth
from workbench.errors import IndexSetMismatchError
from workbench.verdict import Tier, Verdict
from weights.family import WeightFamily, is_square_of, running_max_family, square
from weights.index_set import IndexKind
from relations.certificates import (
    BOUNDED,
    DominationCertificate,
    EquivalenceCertificate,
    LevelBound,
    LevelMap,
)
from relations.search import LevelSearch

logger = logging.getLogger(__name__)


def _check_index_sets(source: WeightFamily, target: WeightFamily):
    if source.index_set != target.index_set:
        raise IndexSetMismatchError(
            f"cannot compare {source.name} on {source.index_set.label()} "
            f"with {target.name} on {target.index_set.label()}")


def _depth_for(family: WeightFamily, depth: Optional[int]) -> int:
    pairs = family.index_set.kind == IndexKind.NATURAL_PAIRS
    return family.index_set.clamp(resolve_depth(depth, pairs))


def _fact_verdict(source: WeightFamily, target: WeightFamily, depth: int) -> Optional[Verdict]:
    """Builtin facts decide P < P² and, for algebras, P² < P."""
    if is_square_of(target, source):
        algebra = source.fact("algebra")
        if algebra is not None:
            reason = f"{source.name} < {target.name} by builtin fact: {algebra.rule}"
            if algebra.value:
                return Verdict.holds(depth, reason, proof_rule="builtin")
            return Verdict.fails(depth, reason, proof_rule="builtin")
    if is_square_of(source, target):
        algebra = target.fact("algebra")
        biprojective = target.fact("biprojective")
        if algebra is not None and algebra.value and biprojective is not None:
            reason = f"{source.name} < {target.name} by builtin fact: {biprojective.rule}"
            if biprojective.value:
                return Verdict.holds(depth, reason, proof_rule="builtin")
            return Verdict.fails(depth, reason, proof_rule="builtin")
    return None


def dominates(source: WeightFamily, target: WeightFamily, depth: Optional[int] = None,
              level_budget: Optional[int] = None) -> Verdict:
    """
    Semi-decide P < Q: every p in P is bounded by C q for some q in Q.

    Raises:
        IndexSetMismatchError: the families live on different index sets
    """
    _check_index_sets(source, target)
    depth = _depth_for(source, depth)
    known = _fact_verdict(source, target, depth)
    search = LevelSearch(running_max_family(source), running_max_family(target),
                         BOUNDED, depth, level_budget)
    if known is None:
        return search.run()
    if known.is_fails:
        return known
    # the fact settles the outcome; the search still supplies the constants
    found = search.run()
    logger.debug("Builtin fact decided %s; search returned %s", search.label, found.outcome.value)
    return Verdict.holds(depth, known.reason, certificate=found.certificate,
                         proof_rule="builtin", search=found.outcome.value)


def equivalent(source: WeightFamily, target: WeightFamily, depth: Optional[int] = None,
               level_budget: Optional[int] = None) -> Verdict:
    """
    P ~ Q: both dominations.

    Raises:
        IndexSetMismatchError: the families live on different index sets
    """
    forward = dominates(source, target, depth, level_budget)
    if forward.is_fails:
        return Verdict.fails(forward.depth, f"{source.name} ~ {target.name} fails: {forward.reason}",
                             certificate=EquivalenceCertificate(forward.certificate, None),
                             direction="forward")
    backward = dominates(target, source, depth, level_budget)
    certificate = EquivalenceCertificate(forward.certificate, backward.certificate)
    if backward.is_fails:
        return Verdict.fails(backward.depth, f"{source.name} ~ {target.name} fails: {backward.reason}",
                             certificate=certificate, direction="backward")
    if forward.is_holds and backward.is_holds:
        return Verdict.holds(forward.depth, f"{source.name} ~ {target.name} holds",
                             certificate=certificate)
    tier = Tier.EXACT if Tier.EMPIRICAL not in (forward.tier, backward.tier) else Tier.EMPIRICAL
    return Verdict.unknown(forward.depth, f"{source.name} ~ {target.name} undecided",
                           certificate=certificate, tier=tier,
                           forward=forward.outcome.value, backward=backward.outcome.value)


def _ge_one_certificate(family: WeightFamily, depth: int, top: int) -> Optional[DominationCertificate]:
    bounds = []
    for k in range(1, top + 1):
        if np.any(family.log_weights(k, depth) < 0.0):
            logger.warning("%s declares all weights >= 1 but level %d dips below 1", family.name, k)
            return None
        bounds.append(LevelBound(k, k, 0.0, "p <= p^2 for p >= 1", depth))
    return DominationCertificate(
        kind=BOUNDED,
        source=family.name,
        target=f"square({family.name})",
        bounds=tuple(bounds),
        tier=Tier.EXACT,
        all_levels=True,
        level_map=LevelMap(1, 0),
    )


def is_algebra(family: WeightFamily, depth: Optional[int] = None,
               level_budget: Optional[int] = None) -> Verdict:
    """P < P², i.e. λ(P) is closed under pointwise multiplication."""
    depth = _depth_for(family, depth)
    if family.flags.all_weights_ge_one:
        top = family.clamp_level(resolve_budget(level_budget))
        certificate = _ge_one_certificate(family, depth, top)
        if certificate is not None:
            return Verdict.holds(depth, f"all weights of {family.name} are >= 1, so p <= p^2 with C = 1",
                                 certificate=certificate, proof_rule="weights_ge_one")
    return dominates(family, square(family), depth, level_budget)
