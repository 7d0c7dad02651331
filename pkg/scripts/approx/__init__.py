"""
Approximate identities and the A = A² criterion.

- identity: the net u_n built from (B) and (N) certificates, convergence
  reports and the Lawson-Read checks
- idempotence: square roots, sqrt membership, the idempotence profile and
  the non-idempotence witness
"""

from .identity import (
    CSV_COLUMNS,
    ApproxIdentityBuilder,
    ApproxIdentityStep,
    ConvergenceReport,
    LawsonReadReport,
    build_net,
    build_un,
    verify_convergence,
    verify_lawson_read,
)
from .idempotence import (
    IdempotenceReport,
    NonIdempotentWitness,
    idempotence_profile,
    non_idempotent_witness,
    sample_battery,
    sqrt_abs,
    sqrt_membership,
    square_decompose,
)

__all__ = [
    'CSV_COLUMNS',
    'ApproxIdentityBuilder',
    'ApproxIdentityStep',
    'ConvergenceReport',
    'LawsonReadReport',
    'build_net',
    'build_un',
    'verify_convergence',
    'verify_lawson_read',
    'IdempotenceReport',
    'NonIdempotentWitness',
    'idempotence_profile',
    'non_idempotent_witness',
    'sample_battery',
    'sqrt_abs',
    'sqrt_membership',
    'square_decompose',
]
