"""
Domination between Köthe sets.

- certificates: per-level bounds, replay and composition
- search: the per-level target search with oracle and empirical probes
- domination: dominates, equivalent, is_algebra
- witness: the explicit non-algebra witness
"""

from .certificates import (
    BOUNDED,
    SUMMABLE,
    DominationCertificate,
    EquivalenceCertificate,
    LevelBound,
    LevelMap,
)
from .search import LevelSearch, search_levels
from .domination import dominates, equivalent, is_algebra
from .witness import NonAlgebraWitness, non_algebra_witness

__all__ = [
    'BOUNDED',
    'SUMMABLE',
    'DominationCertificate',
    'EquivalenceCertificate',
    'LevelBound',
    'LevelMap',
    'LevelSearch',
    'search_levels',
    'dominates',
    'equivalent',
    'is_algebra',
    'NonAlgebraWitness',
    'non_algebra_witness',
]
