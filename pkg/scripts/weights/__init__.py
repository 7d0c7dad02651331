"""
Köthe sets: index sets, log-domain weights, the weight DSL and the builtin
catalog.

- logvalue: extended-real logarithmic scalars and array helpers
- index_set: naturals, Cantor-ordered pairs, finite sets
- dsl: weight expression parser and signed-log evaluator
- oracle: sympy limit oracle for growth questions
- family: WeightFamily and the derived families P·Q, P², bar-P
- catalog: builtin families with their analytic facts
- axioms: prefix checks of (P1), (P2) and of declared flags
"""

from .logvalue import LogTag, LogValue, log_div, log_max, log_mul, tree_logsumexp
from .index_set import IndexKind, IndexSet, cantor_pair
from .dsl import WeightExpr, parse_weight_expr
from .facts import AnalyticFact, AnalyticFacts
from .family import (
    FamilyFlags,
    Monotonicity,
    Provenance,
    WeightFamily,
    bar_family,
    dsl_family,
    eval_weight,
    family_from_dict,
    family_to_dict,
    is_square_of,
    product_family,
    running_max_family,
    square,
)
from .catalog import make_builtin, power_series
from .axioms import axioms_check, check_declared_flags

__all__ = [
    'LogTag',
    'LogValue',
    'log_div',
    'log_max',
    'log_mul',
    'tree_logsumexp',
    'IndexKind',
    'IndexSet',
    'cantor_pair',
    'WeightExpr',
    'parse_weight_expr',
    'AnalyticFact',
    'AnalyticFacts',
    'FamilyFlags',
    'Monotonicity',
    'Provenance',
    'WeightFamily',
    'bar_family',
    'dsl_family',
    'eval_weight',
    'family_from_dict',
    'family_to_dict',
    'is_square_of',
    'product_family',
    'running_max_family',
    'square',
    'make_builtin',
    'power_series',
    'axioms_check',
    'check_declared_flags',
]
