"""
The structural conditions (U), (N), (B), (M) and the log growth criterion.

- checks: (U), (N), (B), the log criterion and the Grothendieck-Pietsch
  norm comparison
- matrices: (M) matrices and check_M in the revised and classic variants
- profile: ConditionProfile with (U)-propagation
- runner: ConditionRunner, per-check isolation and text summaries
"""

from .checks import check_B, check_log_criterion, check_N, check_U, gp_norm_check
from .matrices import CLASSIC, REVISED, MMatrices, check_M, construct_M_matrices
from .profile import CONDITIONS, ConditionProfile
from .runner import ALL_CHECKS, ConditionCheck, ConditionRunner

__all__ = [
    'check_B',
    'check_log_criterion',
    'check_N',
    'check_U',
    'gp_norm_check',
    'CLASSIC',
    'REVISED',
    'MMatrices',
    'check_M',
    'construct_M_matrices',
    'CONDITIONS',
    'ConditionProfile',
    'ALL_CHECKS',
    'ConditionCheck',
    'ConditionRunner',
]
