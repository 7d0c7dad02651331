"""
Shared utilities for the Köthe workbench.

- errors: exception hierarchy mapped to CLI exit codes
- verdict: three-valued outcomes with proof tiers
- config: unified configuration management
- jsonl_utils: locked JSONL run log
"""

from .errors import (
    KoetheError,
    ConfigError,
    WeightExprError,
    UnknownFamilyError,
    IndexSetMismatchError,
    PreconditionError,
    NotAnAlgebraError,
    HypothesisError,
    CertificateMissingError,
    TailBoundError,
    WitnessSearchError,
    InconsistentProfileError,
    ConsistencyError,
)
from .verdict import Outcome, Tier, Verdict, plain
from .config import WorkbenchConfig, config
from .jsonl_utils import JSONLReader, JSONLWriter

__all__ = [
    'KoetheError',
    'ConfigError',
    'WeightExprError',
    'UnknownFamilyError',
    'IndexSetMismatchError',
    'PreconditionError',
    'NotAnAlgebraError',
    'HypothesisError',
    'CertificateMissingError',
    'TailBoundError',
    'WitnessSearchError',
    'InconsistentProfileError',
    'ConsistencyError',
    'Outcome',
    'Tier',
    'Verdict',
    'plain',
    'WorkbenchConfig',
    'config',
    'JSONLReader',
    'JSONLWriter',
]

__version__ = '1.0.0'
