"""
Homological classification of Köthe algebras.

- tables: the weak and strong decision tables and triviality flags
- homology: HomologicalProfile, classify, consistency_check and the
  end-to-end profile_conditions / classify_family
"""

from .homology import (
    HomologicalProfile,
    classify,
    classify_family,
    consistency_check,
    profile_conditions,
    profile_document,
    profile_family,
)
from .tables import CaseResult, Dimension, classify_strong, classify_weak, triviality_flags

__all__ = [
    'HomologicalProfile',
    'classify',
    'classify_family',
    'consistency_check',
    'profile_conditions',
    'profile_document',
    'profile_family',
    'CaseResult',
    'Dimension',
    'classify_strong',
    'classify_weak',
    'triviality_flags',
]
