"""
Weight families (Köthe sets) and the derived families P·Q, P², bar-P and
the running-maximum transform.

A family is an index set plus a countable list of levels p^(1), p^(2), ...
Each level evaluates to log-weights on any enumerated prefix. Levels that
come from DSL expressions also expose a symbolic tree so the limit oracle
can reason about them, either for one fixed level or uniformly in k.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from workbench.errors import ConfigError, IndexSetMismatchError
from weights import dsl
from weights.dsl import Node, WeightExpr
from weights.facts import AnalyticFacts
from weights.index_set import Index, IndexSet
from weights.logvalue import LogValue, log_mul

logger = logging.getLogger(__name__)


class Monotonicity(str, Enum):
    NONDECREASING = "nondecreasing"
    NONINCREASING = "nonincreasing"
    NONE = "none"


@dataclass(frozen=True)
class FamilyFlags:
    pointwise_ordered: bool = False
    monotone_in_index: Monotonicity = Monotonicity.NONE
    all_weights_ge_one: bool = False
    running_max: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pointwise_ordered": self.pointwise_ordered,
            "monotone_in_index": self.monotone_in_index.value,
            "all_weights_ge_one": self.all_weights_ge_one,
            "running_max": self.running_max,
        }

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "FamilyFlags":
        data = data or {}
        return cls(
            pointwise_ordered=bool(data.get("pointwise_ordered", False)),
            monotone_in_index=Monotonicity(data.get("monotone_in_index", "none")),
            all_weights_ge_one=bool(data.get("all_weights_ge_one", False)),
            running_max=bool(data.get("running_max", False)),
        )


@dataclass(frozen=True)
class Provenance:
    kind: str  # builtin | user_dsl | derived
    family_id: str
    params: Tuple[Tuple[str, str], ...] = ()
    parents: Tuple["WeightFamily", ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "family_id": self.family_id, "params": dict(self.params)}


# ---------------------------------------------------------------------------
# Levels
# ---------------------------------------------------------------------------

class Levels(ABC):
    """A countable list of weight functions on one index set."""

    #: number of levels, None for infinitely many
    count: Optional[int] = None

    @abstractmethod
    def evaluate(self, coords: Dict[str, np.ndarray], k: int) -> np.ndarray:
        """Log-weights of level k on the given coordinates."""

    def node(self, k: int) -> Optional[Node]:
        """Closed-form tree of level k (level variable substituted)."""
        return None

    def symbolic(self) -> Optional[Node]:
        """Tree with the level variable k left free, when uniform in k."""
        return None


class ExprLevels(Levels):
    """Levels given by one DSL expression in the index and the level k."""

    def __init__(self, expr: WeightExpr, count: Optional[int] = None):
        self.expr = expr
        if count is None and "k" not in expr.variables:
            count = 1
        self.count = count

    def evaluate(self, coords, k):
        env = dict(coords)
        env["k"] = float(k)
        if not coords:
            env["i"] = np.ones(1)
        return dsl.evaluate_log(self.expr.root, env)

    def node(self, k):
        return dsl.substitute(self.expr.root, {"k": dsl.num(k)})

    def symbolic(self):
        return self.expr.root

    def to_dict(self):
        data = {"expr": self.expr.source}
        if self.count is not None and "k" in self.expr.variables:
            data["count"] = self.count
        return data


class ListLevels(Levels):
    """Explicit finite list of level expressions."""

    def __init__(self, exprs: Tuple[WeightExpr, ...]):
        if not exprs:
            raise ConfigError("a family needs at least one level")
        self.exprs = tuple(exprs)
        self.count = len(self.exprs)

    def evaluate(self, coords, k):
        return dsl.evaluate_log(self.exprs[k - 1].root, dict(coords))

    def node(self, k):
        return self.exprs[k - 1].root

    def to_dict(self):
        return {"levels": [e.source for e in self.exprs]}


def level_pair(rank: int, left_count: Optional[int], right_count: Optional[int]) -> Tuple[int, int]:
    """Enumerate pairs of levels: Cantor order, row-major when one side is finite."""
    if right_count is not None:
        return (rank - 1) // right_count + 1, (rank - 1) % right_count + 1
    if left_count is not None:
        return (rank - 1) % left_count + 1, (rank - 1) // left_count + 1
    s = 2
    while (s - 1) * s // 2 < rank:
        s += 1
    i = rank - (s - 2) * (s - 1) // 2
    return i, s - i


class ProductLevels(Levels):
    """All pairwise products p^(a) q^(b)."""

    def __init__(self, left: "WeightFamily", right: "WeightFamily"):
        self.left = left
        self.right = right
        if left.level_count is not None and right.level_count is not None:
            self.count = left.level_count * right.level_count
        else:
            self.count = None

    def pair(self, k: int) -> Tuple[int, int]:
        return level_pair(k, self.left.level_count, self.right.level_count)

    def evaluate(self, coords, k):
        a, b = self.pair(k)
        return log_mul(self.left.levels.evaluate(coords, a), self.right.levels.evaluate(coords, b))

    def node(self, k):
        a, b = self.pair(k)
        left, right = self.left.level_node(a), self.right.level_node(b)
        if left is None or right is None:
            return None
        return dsl.mul(left, right)


class SquaredLevels(Levels):
    """Diagonal form p^2 of the square family."""

    def __init__(self, base: "WeightFamily"):
        self.base = base
        self.count = base.level_count

    def evaluate(self, coords, k):
        return 2.0 * self.base.levels.evaluate(coords, k)

    def node(self, k):
        inner = self.base.level_node(k)
        return None if inner is None else dsl.power(inner, dsl.num(2))

    def symbolic(self):
        inner = self.base.symbolic_node()
        return None if inner is None else dsl.power(inner, dsl.num(2))


class ClampedLevels(Levels):
    """min(p, 1) levelwise."""

    def __init__(self, base: "WeightFamily"):
        self.base = base
        self.count = base.level_count

    def evaluate(self, coords, k):
        return np.minimum(self.base.levels.evaluate(coords, k), 0.0)

    def node(self, k):
        inner = self.base.level_node(k)
        return None if inner is None else dsl.Call("min", (inner, dsl.ONE))

    def symbolic(self):
        inner = self.base.symbolic_node()
        return None if inner is None else dsl.Call("min", (inner, dsl.ONE))


class RunningMaxLevels(Levels):
    """max(p^(1), ..., p^(k)) levelwise."""

    def __init__(self, base: "WeightFamily"):
        self.base = base
        self.count = base.level_count

    def evaluate(self, coords, k):
        out = self.base.levels.evaluate(coords, 1)
        for level in range(2, k + 1):
            out = np.maximum(out, self.base.levels.evaluate(coords, level))
        return out

    def node(self, k):
        nodes = [self.base.level_node(level) for level in range(1, k + 1)]
        if any(n is None for n in nodes):
            return None
        return nodes[0] if len(nodes) == 1 else dsl.Call("max", tuple(nodes))


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightFamily:
    """A countable Köthe set on a fixed index set."""

    name: str
    index_set: IndexSet
    levels: Levels
    flags: FamilyFlags
    provenance: Provenance
    facts: Optional[AnalyticFacts] = None
    _cache: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def level_count(self) -> Optional[int]:
        return self.levels.count

    def check_level(self, k: int) -> int:
        k = int(k)
        if k < 1 or (self.level_count is not None and k > self.level_count):
            raise ValueError(f"level {k} outside 1..{self.level_count or 'inf'} of {self.name}")
        return k

    def clamp_level(self, k: int) -> int:
        """Largest available level not above k."""
        return k if self.level_count is None else min(k, self.level_count)

    def log_weights(self, k: int, depth: int) -> np.ndarray:
        """Read-only log-weights of level k on the first `depth` indices."""
        k = self.check_level(k)
        depth = self.index_set.clamp(depth)
        cached = self._cache.get(k)
        if cached is None or len(cached) < depth:
            values = np.asarray(self.levels.evaluate(self.index_set.coordinates(depth), k), dtype=float)
            values = np.broadcast_to(values, (depth,)).copy()
            values.setflags(write=False)
            self._cache[k] = cached = values
        return cached[:depth]

    def level_node(self, k: int) -> Optional[Node]:
        return self.levels.node(self.check_level(k))

    def symbolic_node(self) -> Optional[Node]:
        return self.levels.symbolic()

    def fact(self, name: str):
        return None if self.facts is None else self.facts.get(name)

    def describe(self) -> str:
        count = self.level_count if self.level_count is not None else "inf"
        return f"{self.name} on {self.index_set.label()} ({count} levels)"


def eval_weight(family: WeightFamily, k: int, index: Index) -> LogValue:
    """Exact log-domain value of p^(k) at one index."""
    k = family.check_level(k)
    coords = family.index_set.coordinates_of(index)
    value = np.ravel(family.levels.evaluate(coords, k))[0]
    return LogValue.from_log(float(value))


def _same_index_set(left: WeightFamily, right: WeightFamily):
    if left.index_set != right.index_set:
        raise IndexSetMismatchError(
            f"{left.name} lives on {left.index_set.label()}, "
            f"{right.name} on {right.index_set.label()}")


def _combine_monotone(a: Monotonicity, b: Monotonicity) -> Monotonicity:
    return a if a == b else Monotonicity.NONE


def square(family: WeightFamily) -> WeightFamily:
    """The family P² in its diagonal form {p² : p ∈ P}."""
    flags = FamilyFlags(
        pointwise_ordered=family.flags.pointwise_ordered,
        monotone_in_index=family.flags.monotone_in_index,
        all_weights_ge_one=family.flags.all_weights_ge_one,
        running_max=family.flags.running_max,
    )
    return WeightFamily(
        name=f"square({family.name})",
        index_set=family.index_set,
        levels=SquaredLevels(family),
        flags=flags,
        provenance=Provenance("derived", "square", parents=(family,)),
    )


def product_family(left: WeightFamily, right: WeightFamily) -> WeightFamily:
    """
    The family P·Q of all pairwise products.

    For P·P the diagonal form P² is returned, which is equivalent.

    Raises:
        IndexSetMismatchError: families live on different index sets
    """
    _same_index_set(left, right)
    if left is right:
        return square(left)
    flags = FamilyFlags(
        pointwise_ordered=False,
        monotone_in_index=_combine_monotone(left.flags.monotone_in_index,
                                            right.flags.monotone_in_index),
        all_weights_ge_one=left.flags.all_weights_ge_one and right.flags.all_weights_ge_one,
    )
    return WeightFamily(
        name=f"product({left.name}, {right.name})",
        index_set=left.index_set,
        levels=ProductLevels(left, right),
        flags=flags,
        provenance=Provenance("derived", "product", parents=(left, right)),
    )


def is_square_of(candidate: WeightFamily, family: WeightFamily) -> bool:
    prov = candidate.provenance
    return prov.family_id == "square" and len(prov.parents) == 1 and prov.parents[0] is family


def bar_family(family: WeightFamily) -> WeightFamily:
    """Levels clamped above by 1 (idempotent)."""
    if family.provenance.family_id == "bar":
        return family
    facts = None
    if family.flags.all_weights_ge_one:
        # every clamped weight is exactly 1, so the result is l1 pointwise
        from weights.catalog import l1_facts
        facts = l1_facts()
    flags = FamilyFlags(
        pointwise_ordered=family.flags.pointwise_ordered,
        monotone_in_index=family.flags.monotone_in_index,
        all_weights_ge_one=family.flags.all_weights_ge_one,
        running_max=family.flags.running_max,
    )
    return WeightFamily(
        name=f"bar({family.name})",
        index_set=family.index_set,
        levels=ClampedLevels(family),
        flags=flags,
        provenance=Provenance("derived", "bar", parents=(family,)),
        facts=facts,
    )


def running_max_family(family: WeightFamily) -> WeightFamily:
    """
    Replace levels by running maxima so that p^(k) <= p^(k+1).

    The result is equivalent to the input. Families already ordered are
    returned unchanged.
    """
    if family.flags.pointwise_ordered:
        return family
    logger.info("Replacing levels of %s by running maxima", family.name)
    flags = FamilyFlags(
        pointwise_ordered=True,
        monotone_in_index=family.flags.monotone_in_index,
        all_weights_ge_one=family.flags.all_weights_ge_one,
        running_max=True,
    )
    return WeightFamily(
        name=f"running_max({family.name})",
        index_set=family.index_set,
        levels=RunningMaxLevels(family),
        flags=flags,
        provenance=Provenance("derived", "running_max", parents=(family,)),
        facts=family.facts,
    )


# ---------------------------------------------------------------------------
# User families and serialization
# ---------------------------------------------------------------------------

def dsl_family(name: str, index_set: IndexSet, levels: Any,
               flags: Optional[FamilyFlags] = None, count: Optional[int] = None) -> WeightFamily:
    """
    Family from DSL source: one level-parameterized expression or a list.

    Raises:
        WeightExprError: an expression fails to parse or validate
    """
    allowed = index_set.variables + ("k",)
    if isinstance(levels, str):
        level_obj: Levels = ExprLevels(dsl.parse_weight_expr(levels, allowed), count)
    else:
        exprs = tuple(dsl.parse_weight_expr(text, index_set.variables) for text in levels)
        level_obj = ListLevels(exprs)
    return WeightFamily(
        name=name,
        index_set=index_set,
        levels=level_obj,
        flags=flags or FamilyFlags(),
        provenance=Provenance("user_dsl", name),
    )


def family_to_dict(family: WeightFamily) -> Dict[str, Any]:
    """JSON document {name, index_set, builtin | levels | derived, flags}."""
    data: Dict[str, Any] = {
        "name": family.name,
        "index_set": family.index_set.to_dict(),
        "flags": family.flags.to_dict(),
    }
    prov = family.provenance
    if prov.kind == "builtin":
        data["builtin"] = {"family_id": prov.family_id, "params": dict(prov.params)}
    elif prov.kind == "derived":
        data["derived"] = {"op": prov.family_id,
                           "operands": [family_to_dict(p) for p in prov.parents]}
    else:
        data.update(family.levels.to_dict())
    return data


def family_from_dict(data: Dict[str, Any]) -> WeightFamily:
    """
    Rebuild a family from its JSON document.

    Raises:
        ConfigError: unknown layout or derived operation
    """
    if "builtin" in data:
        from weights.catalog import make_builtin
        builtin = data["builtin"]
        return make_builtin(builtin["family_id"], builtin.get("params") or {})
    if "derived" in data:
        op = data["derived"]["op"]
        operands = [family_from_dict(d) for d in data["derived"]["operands"]]
        if op == "square":
            return square(operands[0])
        if op == "product":
            return product_family(*operands)
        if op == "bar":
            return bar_family(operands[0])
        if op == "running_max":
            return running_max_family(operands[0])
        raise ConfigError(f"unknown derived family operation {op!r}")
    index_set = IndexSet.parse(data.get("index_set", "naturals"))
    flags = FamilyFlags.from_dict(data.get("flags"))
    if "expr" in data:
        return dsl_family(data.get("name", "user"), index_set, data["expr"], flags, data.get("count"))
    if "levels" in data:
        return dsl_family(data.get("name", "user"), index_set, list(data["levels"]), flags)
    raise ConfigError("family needs one of builtin, expr, levels or derived")
