"""
Builtin catalog of Köthe sets.

    l1                  single weight 1
    finite_dim(n)       finite(n) index set, single weight 1 (desk-scale C^I)
    s                   p^(k)_i = i^k
    entire              p^(k)_i = k^i
    power_series(R, a)  p^(m)_i = r_m^(a_i), r_m = m (R = inf) or R*m/(m+1)
    hadamard_disk(R)    power_series(R, i)
    matrix_example      on N x N: 2^((k*j)^i) * (i+j)^k for i <= k, (i+j)^k otherwise

Every builtin carries its exact analytic facts.
"""

import logging
import math
import re
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
import sympy

from workbench.errors import ConfigError, UnknownFamilyError, WeightExprError
from weights import dsl, oracle
from weights.facts import AnalyticFacts, fact
from weights.family import (
    ExprLevels,
    FamilyFlags,
    Monotonicity,
    Provenance,
    WeightFamily,
)
from weights.index_set import IndexSet

logger = logging.getLogger(__name__)

FAMILY_IDS = ("l1", "finite_dim", "s", "entire", "power_series", "hadamard_disk", "matrix_example")

MATRIX_EXAMPLE_EXPR = "2^((k*j)^i) * (i+j)^k if i <= k else (i+j)^k"

_CALL_RE = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*$", re.DOTALL)


def parse_family_id(text: str) -> Tuple[str, Tuple[str, ...]]:
    """Split "power_series(inf, i)" into ("power_series", ("inf", "i"))."""
    match = _CALL_RE.match(text)
    if not match:
        raise UnknownFamilyError(f"unknown family {text!r}")
    name, args = match.group(1), match.group(2)
    if args is None or not args.strip():
        return name, ()
    parts, depth, current = [], 0, ""
    for char in args:
        if char == "," and depth == 0:
            parts.append(current.strip())
            current = ""
            continue
        depth += char == "("
        depth -= char == ")"
        current += char
    parts.append(current.strip())
    return name, tuple(parts)


def make_builtin(family_id: str, params: Optional[Mapping[str, Any]] = None) -> WeightFamily:
    """
    Build a catalog family.

    Parameters may be given inline ("hadamard_disk(2)") or as a mapping
    ({"R": "2"}); power_series takes R and alpha.

    Raises:
        UnknownFamilyError: family_id not in the catalog
        ConfigError: invalid parameters (R <= 0, bad alpha, bad size)
    """
    name, args = parse_family_id(family_id)
    params = dict(params or {})
    if name not in FAMILY_IDS:
        raise UnknownFamilyError(f"unknown family {name!r}; known: {', '.join(FAMILY_IDS)}")

    if name == "l1":
        return _constant_family("l1", IndexSet.naturals(), ())
    if name == "finite_dim":
        size = params.get("n", args[0] if args else None)
        if size is None:
            raise ConfigError("finite_dim needs a size n")
        try:
            n = int(size)
        except (TypeError, ValueError):
            raise ConfigError(f"finite_dim size must be an integer, got {size!r}")
        if n < 1:
            raise ConfigError("finite_dim size must be >= 1")
        return _constant_family(f"finite_dim({n})", IndexSet.finite(n), (("n", str(n)),))
    if name == "s":
        return _s()
    if name == "entire":
        return _entire()
    if name == "matrix_example":
        return _matrix_example()

    if name == "hadamard_disk":
        radius = str(params.get("R", args[0] if args else ""))
        return power_series(radius, "i", family_id="hadamard_disk")
    radius = str(params.get("R", args[0] if args else ""))
    alpha = str(params.get("alpha", args[1] if len(args) > 1 else "i"))
    return power_series(radius, alpha)


def l1_facts() -> AnalyticFacts:
    return AnalyticFacts(
        algebra=fact(True, "1 <= 1^2"),
        unital=fact(False, "sum of 1 diverges"),
        nuclear=fact(False, "the only ratio is 1 and sum of 1 diverges"),
        biprojective=fact(True, "P equals P^2"),
        condition_m=fact(True, "constant weights, sup alpha <= 1"),
        log_criterion=fact(False, "log p_n = 0"),
        approximately_contractible=fact(False, "l1 is not approximately contractible", curated=True),
    )


def _constant_family(name: str, index_set: IndexSet, params) -> WeightFamily:
    finite = index_set.is_finite
    facts = l1_facts()
    if finite:
        facts = AnalyticFacts(
            algebra=fact(True, "1 <= 1^2"),
            unital=fact(True, "finite sum of ones"),
            nuclear=fact(True, "finite index set"),
            biprojective=fact(True, "P equals P^2"),
            condition_m=fact(True, "constant weights, sup alpha <= 1"),
        )
    return WeightFamily(
        name=name,
        index_set=index_set,
        levels=ExprLevels(dsl.parse_weight_expr("1")),
        flags=FamilyFlags(True, Monotonicity.NONDECREASING, True),
        provenance=Provenance("builtin", name.split("(")[0], params),
        facts=facts,
    )


def _s() -> WeightFamily:
    return WeightFamily(
        name="s",
        index_set=IndexSet.naturals(),
        levels=ExprLevels(dsl.parse_weight_expr("i^k")),
        flags=FamilyFlags(True, Monotonicity.NONDECREASING, True),
        provenance=Provenance("builtin", "s"),
        facts=AnalyticFacts(
            algebra=fact(True, "p_i <= p_i^2 for weights >= 1"),
            unital=fact(False, "sum of i^k diverges"),
            nuclear=fact(True, "sum of i^k / i^(k+2) converges"),
            biprojective=fact(True, "power series space with R = inf"),
            condition_m=fact(True, "weights nondecreasing in the index"),
            log_criterion=fact(True, "(log n)/(log n) = 1 at level 1"),
        ),
    )


def _entire() -> WeightFamily:
    return WeightFamily(
        name="entire",
        index_set=IndexSet.naturals(),
        levels=ExprLevels(dsl.parse_weight_expr("k^i")),
        flags=FamilyFlags(True, Monotonicity.NONDECREASING, True),
        provenance=Provenance("builtin", "entire"),
        facts=AnalyticFacts(
            algebra=fact(True, "p_i <= p_i^2 for weights >= 1"),
            unital=fact(False, "sum of 1^i diverges at level 1"),
            nuclear=fact(True, "sup (log n)/n < inf for R = inf"),
            biprojective=fact(True, "power series space with R = inf"),
            condition_m=fact(True, "weights nondecreasing in the index"),
            log_criterion=fact(True, "(log n)/(n log 2) -> 0 at level 2"),
        ),
    )


def _matrix_example() -> WeightFamily:
    return WeightFamily(
        name="matrix_example",
        index_set=IndexSet.pairs(),
        levels=ExprLevels(dsl.parse_weight_expr(MATRIX_EXAMPLE_EXPR)),
        flags=FamilyFlags(True, Monotonicity.NONE, True),
        provenance=Provenance("builtin", "matrix_example"),
        facts=AnalyticFacts(
            algebra=fact(True, "p_i <= p_i^2 for weights >= 1"),
            unital=fact(False, "sum of (i+j)^k diverges"),
            nuclear=fact(True, "nuclear by the Grothendieck-Pietsch criterion"),
            biprojective=fact(True, "P is equivalent to P^2"),
            condition_m=fact(False, "the family does not satisfy (M)", curated=True),
        ),
    )


# ---------------------------------------------------------------------------
# Power series spaces
# ---------------------------------------------------------------------------

def _parse_radius(text: str) -> Tuple[Optional[sympy.Expr], str]:
    """Exact radius (None for infinity) and its source text."""
    text = text.strip()
    if not text:
        raise ConfigError("power series family needs a radius R")
    if text.lower() in ("inf", "infinity", "oo"):
        return None, "inf"
    try:
        node = dsl.parse(text, allowed=())
        value = dsl.to_sympy(node, {})
    except WeightExprError as e:
        raise ConfigError(f"invalid radius {text!r}: {e}")
    if not value.is_real or not value.is_finite:
        raise ConfigError(f"invalid radius {text!r}")
    if not value.is_positive:
        raise ConfigError(f"radius must be > 0, got {text}")
    return value, text


def _validate_alpha(text: str, depth: int = 256) -> dsl.WeightExpr:
    """alpha: one variable, positive, nondecreasing, unbounded."""
    alpha = dsl.parse_weight_expr(text, allowed=("i",))
    if alpha.variables != frozenset({"i"}):
        raise ConfigError(f"alpha must depend on i, got {text!r}")
    log_alpha = alpha.log_values(i=np.arange(1, depth + 1, dtype=float))
    if np.any(log_alpha == float("-inf")):
        raise ConfigError(f"alpha must be positive, {text!r} vanishes")
    if np.any(np.diff(log_alpha) < 0):
        raise ConfigError(f"alpha must be nondecreasing, {text!r} is not")
    expr = oracle.expr_of(alpha.root)
    growth = None if expr is None else oracle.limit_at_infinity(expr)
    if growth is not None and growth != sympy.oo:
        raise ConfigError(f"alpha must be unbounded, {text!r} tends to {growth}")
    if growth is None:
        logger.warning("Could not prove that alpha = %s is unbounded; accepting it", text)
    return alpha


def _log_growth_limit(alpha: dsl.WeightExpr) -> Optional[sympy.Expr]:
    """lim (log n)/alpha_n as 0, a positive constant or oo (None when unresolved)."""
    value = oracle.growth_limit(dsl.Call("log", (dsl.Var("i"),)), alpha.root)
    if value is None or isinstance(value, sympy.AccumBounds):
        return None
    if value == 0 or value == sympy.oo:
        return value
    if value.is_finite and value.is_positive:
        return value
    return None


def _unital(radius: Optional[sympy.Expr], growth: Optional[sympy.Expr]) -> Optional[bool]:
    """sum r^(alpha_n) < inf for every r < R."""
    if radius is None or radius > 1:
        return False
    if growth is None:
        return None
    if growth == 0:
        return True
    if growth == sympy.oo:
        return False
    # r^(alpha_n) behaves like n^(log(r)/c)
    return (sympy.log(radius) + growth).is_nonpositive


def power_series(radius_text: str, alpha_text: str, family_id: str = "power_series") -> WeightFamily:
    """
    Power series family with level grid r_m = m (R = inf) or R*m/(m+1).

    Raises:
        ConfigError: R <= 0 or alpha rejected
    """
    radius, radius_src = _parse_radius(str(radius_text))
    alpha = _validate_alpha(alpha_text)
    if radius is None:
        source = f"k^({alpha.source})"
    else:
        source = f"(({radius_src})*k/(k+1))^({alpha.source})"
    expr = dsl.parse_weight_expr(source, allowed=("i", "k"))

    if radius is None or radius >= 2:
        monotone = Monotonicity.NONDECREASING
    elif radius <= 1:
        monotone = Monotonicity.NONINCREASING
    else:
        monotone = Monotonicity.NONE
    ge_one = radius is None or radius >= 2

    growth = _log_growth_limit(alpha)
    is_inf = radius is None
    algebra = is_inf or radius >= 1
    if growth is None:
        nuclear = None
    elif is_inf:
        nuclear = growth != sympy.oo
    else:
        nuclear = growth == 0
    unital = _unital(radius, growth)
    log_criterion = None
    if ge_one and growth is not None:
        log_criterion = growth != sympy.oo

    facts = AnalyticFacts(
        algebra=fact(algebra, "power series algebra iff R >= 1"),
        unital=fact(unital, "sum r^(alpha_n) < inf for all r < R iff R <= 1 and log R <= -lim (log n)/alpha_n"),
        nuclear=fact(nuclear, "R = inf: sup (log n)/alpha_n < inf; R < inf: (log n)/alpha_n -> 0"),
        biprojective=fact(is_inf or radius == 1, "biprojective iff R = 1 or R = inf"),
        condition_m=fact(True if monotone != Monotonicity.NONE else None,
                         "weights monotone in the index"),
        log_criterion=fact(log_criterion, "(log n)/(alpha_n log r) bounded iff sup (log n)/alpha_n < inf"),
    )
    label_r = "inf" if is_inf else radius_src
    if family_id == "hadamard_disk":
        name = f"hadamard_disk({label_r})"
        params = (("R", label_r),)
    else:
        name = f"power_series({label_r}, {alpha.source})"
        params = (("R", label_r), ("alpha", alpha.source))
    return WeightFamily(
        name=name,
        index_set=IndexSet.naturals(),
        levels=ExprLevels(expr),
        flags=FamilyFlags(True, monotone, ge_one),
        provenance=Provenance("builtin", family_id, params),
        facts=facts,
    )


def radius_value(radius_text: str) -> float:
    radius, _ = _parse_radius(radius_text)
    return math.inf if radius is None else float(radius)
