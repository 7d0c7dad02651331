"""
Batch front end of the workbench.

- spaces: space definitions, validation and the golden catalog
- commands: validate, classify, check, witness, approx-id, hadamard, report
- main: argument parsing, exit codes and the run log
"""

from .spaces import (
    SpaceConfig,
    ValidationResult,
    golden_catalog,
    load_space,
    require_valid,
    validate_space,
)

__all__ = [
    'SpaceConfig',
    'ValidationResult',
    'golden_catalog',
    'load_space',
    'require_valid',
    'validate_space',
]
