"""
Asymptotic limit oracle.

Answers growth questions about closed-form weights symbolically: whether a
ratio of weights stays bounded, whether a series converges, whether a
sequence is eventually monotone, and what a family tends to as the level
grows. Every question answers True, False or None. None means undecided and
is never an error; sympy failures are logged at debug level and degrade to
None.

The index variable is `i` (positive real for limits), the level variable is
`k` (positive integer). Expressions in the second index component `j` are
outside the oracle's reach.
"""

import logging
import math
from functools import lru_cache
from typing import Optional

import mpmath
import sympy

from workbench.config import config
from weights import dsl

logger = logging.getLogger(__name__)

I = sympy.Symbol("i", positive=True)
J = sympy.Symbol("j", positive=True)
K = sympy.Symbol("k", positive=True, integer=True)
SYMBOLS = {"i": I, "j": J, "k": K}

NONINCREASING = "nonincreasing"
NONDECREASING = "nondecreasing"


class _Undecided(Exception):
    pass


# ---------------------------------------------------------------------------
# Conversion
# ---------------------------------------------------------------------------

def expr_of(node: dsl.Node) -> Optional[sympy.Expr]:
    """Sympy image of a DSL tree with piecewise and min/max resolved eventually."""
    if not config.is_enabled("oracle"):
        return None
    return _expr_of(node)


@lru_cache(maxsize=4096)
def _expr_of(node: dsl.Node) -> Optional[sympy.Expr]:
    if "j" in dsl.free_variables(node):
        return None
    try:
        expr = dsl.to_sympy(node, SYMBOLS)
        expr = expr.replace(lambda e: isinstance(e, sympy.Piecewise), _eventual_branch)
        expr = expr.replace(lambda e: isinstance(e, (sympy.Min, sympy.Max)), _eventual_extreme)
    except _Undecided:
        logger.debug("could not resolve branches of %s", dsl.render(node))
        return None
    except Exception as e:
        logger.debug("sympy conversion failed for %s: %s", dsl.render(node), e)
        return None
    return expr


def _eventually_true(condition) -> Optional[bool]:
    if condition in (sympy.true, True):
        return True
    if condition in (sympy.false, False):
        return False
    if condition.free_symbols - {I}:
        return None
    try:
        truth_set = condition.as_set()
    except Exception as e:
        logger.debug("as_set failed for %s: %s", condition, e)
        return None
    domain = sympy.Interval(1, sympy.oo)
    rest = sympy.Complement(domain, truth_set)
    if rest is sympy.S.EmptySet or (rest.sup is not None and rest.sup.is_finite):
        return True
    inside = sympy.Intersection(domain, truth_set)
    if inside is sympy.S.EmptySet or (inside.sup is not None and inside.sup.is_finite):
        return False
    return None


def _eventual_branch(piecewise):
    for branch, condition in piecewise.args:
        truth = _eventually_true(condition)
        if truth is True:
            return branch
        if truth is None:
            raise _Undecided()
    raise _Undecided()


def _eventual_extreme(extreme):
    pick_larger = isinstance(extreme, sympy.Max)
    args = list(extreme.args)
    best = args[0]
    for other in args[1:]:
        gap = limit_at_infinity(other - best)
        if gap is None or gap == 0 or isinstance(gap, sympy.AccumBounds):
            raise _Undecided()
        other_larger = bool(gap > 0)
        if other_larger == pick_larger:
            best = other
    return best


def log_of(expr: sympy.Expr) -> sympy.Expr:
    return sympy.expand_log(sympy.log(expr), force=True)


# ---------------------------------------------------------------------------
# Limits
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def limit_at_infinity(expr: sympy.Expr, symbol: sympy.Symbol = I):
    """lim expr as symbol -> oo, or None when sympy cannot decide it."""
    try:
        value = sympy.limit(expr, symbol, sympy.oo)
    except Exception as e:  # sympy raises many unrelated exception types here
        logger.debug("limit failed for %s: %s", expr, e)
        return None
    if value is sympy.nan or value is sympy.zoo or value.has(sympy.nan, sympy.zoo):
        return None
    if symbol in value.free_symbols or isinstance(value, sympy.Limit):
        return None
    return value


def _upper_class(value) -> Optional[str]:
    """'-oo', 'finite' or '+oo' for the limsup encoded by a limit value."""
    if value is None:
        return None
    if isinstance(value, sympy.AccumBounds):
        value = value.max
    if value == sympy.oo:
        return "+oo"
    if value == -sympy.oo:
        return "-oo"
    if value.is_finite:
        return "finite"
    return None


@lru_cache(maxsize=4096)
def is_bounded_above(f: sympy.Expr) -> Optional[bool]:
    """Is limsup f < +oo as i -> oo?"""
    upper = _upper_class(limit_at_infinity(f))
    if upper is None:
        return None
    return upper != "+oo"


@lru_cache(maxsize=4096)
def is_bounded_ratio(p: sympy.Expr, q: sympy.Expr) -> Optional[bool]:
    """Is sup_i p_i / q_i finite (eventually) for nonnegative p, q?"""
    if p.is_zero:
        return True
    if q.is_zero:
        return False
    return is_bounded_above(log_of(p) - log_of(q))


@lru_cache(maxsize=4096)
def is_summable(term: sympy.Expr) -> Optional[bool]:
    """
    Does sum_i term_i converge?

    Exponent rule first: with L = lim log(term)/log(i), the series converges
    for L < -1 and diverges for L > -1. The boundary case goes to sympy's
    convergence tests.
    """
    if term.is_zero:
        return True
    exponent = limit_at_infinity(log_of(term) / sympy.log(I))
    if exponent is not None and not isinstance(exponent, sympy.AccumBounds):
        if exponent == -sympy.oo:
            return True
        if exponent == sympy.oo:
            return False
        shifted = exponent + 1
        if shifted.is_extended_negative:
            return True
        if shifted.is_extended_positive:
            return False
    return _sum_is_convergent(term)


def _sum_is_convergent(term: sympy.Expr) -> Optional[bool]:
    if term.free_symbols - {I}:
        return None
    n = sympy.Symbol("n", integer=True, positive=True)
    try:
        verdict = sympy.Sum(term.subs(I, n), (n, 1, sympy.oo)).is_convergent()
    except Exception as e:
        logger.debug("convergence test failed for %s: %s", term, e)
        return None
    if verdict in (sympy.true, True):
        return True
    if verdict in (sympy.false, False):
        return False
    return None


@lru_cache(maxsize=1024)
def monotonicity(f: sympy.Expr, start: int = 1) -> Optional[str]:
    """Monotone direction of f on [start, oo), if provable."""
    if not f.has(I):
        return NONINCREASING
    interval = sympy.Interval(start, sympy.oo)
    try:
        if sympy.is_decreasing(f, interval, I):
            return NONINCREASING
        if sympy.is_increasing(f, interval, I):
            return NONDECREASING
    except Exception as e:
        logger.debug("monotonicity failed for %s: %s", f, e)
    return None


@lru_cache(maxsize=1024)
def level_supremum(expr: sympy.Expr) -> Optional[sympy.Expr]:
    """
    Pointwise lim_{k -> oo} of a level-parameterized weight.

    For pointwise-ordered families this is sup over all levels. None when the
    limit is infinite or undecided.
    """
    if K not in expr.free_symbols:
        return expr
    value = limit_at_infinity(expr, K)
    if value is None or K in value.free_symbols or isinstance(value, sympy.AccumBounds):
        return None
    if value.has(sympy.oo, -sympy.oo, sympy.zoo):
        return None
    return value


def value_log(f: sympy.Expr, at: int) -> Optional[float]:
    """Numeric value of a log-magnitude expression at one index."""
    try:
        value = sympy.N(f.subs(I, at), 30)
    except Exception as e:
        logger.debug("evaluation failed for %s at %d: %s", f, at, e)
        return None
    if value == -sympy.oo:
        return float("-inf")
    if value == sympy.oo:
        return float("inf")
    if not value.is_real:
        return None
    return float(value)


@lru_cache(maxsize=1024)
def tail_sup_log(log_f: sympy.Expr, start: int) -> Optional[float]:
    """sup over i >= start of a log-magnitude, via eventual monotonicity."""
    direction = monotonicity(log_f, start)
    if direction == NONINCREASING:
        return value_log(log_f, start)
    if direction == NONDECREASING:
        value = limit_at_infinity(log_f)
        if value is None or isinstance(value, sympy.AccumBounds):
            return None
        if value == sympy.oo:
            return float("inf")
        return float(sympy.N(value, 30)) if value.is_finite else None
    return None


@lru_cache(maxsize=1024)
def tail_sum_log(term: sympy.Expr, start: int) -> Optional[float]:
    """
    Log of an upper bound for sum_{i >= start} term_i.

    Two rules: an exact geometric tail when term(i+1)/term(i) is a constant
    below 1, otherwise the integral test for eventually nonincreasing terms
    (sum <= term(start) + integral from start), integrated with mpmath.
    """
    if term.is_zero:
        return float("-inf")
    if not is_summable(term):
        return None
    first = value_log(log_of(term), start)
    if first is None:
        return None
    try:
        ratio = sympy.simplify(term.subs(I, I + 1) / term)
    except Exception as e:
        logger.debug("ratio simplification failed for %s: %s", term, e)
        ratio = None
    if ratio is not None and not ratio.free_symbols:
        r = float(ratio)
        if 0 <= r < 1:
            return first - math.log1p(-r)
    if monotonicity(term, start) != NONINCREASING:
        return None
    try:
        f = sympy.lambdify(I, term, modules="mpmath")
        with mpmath.workdps(config.get("oracle.quadrature_dps", 30)):
            integral = mpmath.quad(f, [start, mpmath.inf])
            total = mpmath.exp(first) + integral
            if not mpmath.isfinite(total) or total < 0:
                return None
            return float(mpmath.log(total)) if total > 0 else float("-inf")
    except Exception as e:
        logger.debug("tail quadrature failed for %s: %s", term, e)
        return None


# ---------------------------------------------------------------------------
# Node-level conveniences
# ---------------------------------------------------------------------------

def ratio_bounded(p: dsl.Node, q: dsl.Node) -> Optional[bool]:
    p_expr, q_expr = expr_of(p), expr_of(q)
    if p_expr is None or q_expr is None:
        return None
    return is_bounded_ratio(p_expr, q_expr)


def ratio_summable(p: dsl.Node, q: dsl.Node) -> Optional[bool]:
    p_expr, q_expr = expr_of(p), expr_of(q)
    if p_expr is None or q_expr is None:
        return None
    if p_expr.is_zero:
        return True
    if q_expr.is_zero:
        return False
    return is_summable(sympy.powsimp(p_expr / q_expr, force=True))


def series_converges(term: dsl.Node) -> Optional[bool]:
    expr = expr_of(term)
    if expr is None:
        return None
    return is_summable(expr)


def growth_limit(numerator: dsl.Node, denominator: dsl.Node):
    """lim numerator/denominator as i -> oo (sympy value or None)."""
    num_expr, den_expr = expr_of(numerator), expr_of(denominator)
    if num_expr is None or den_expr is None:
        return None
    return limit_at_infinity(num_expr / den_expr)
