"""
Truncated elements of λ(P) and their seminorms.

- element: SeqElement in log-magnitude and phase form, pointwise products
- norms: seminorms with tail bounds, membership, the multiplication bound,
  Köthe-Toeplitz dual sampling
- taylor: Taylor coefficients, the Hadamard product and coefficient CSV files
"""

from .element import SeqElement, pointwise_mul
from .norms import (
    InequalityReport,
    NormStatus,
    SeminormValue,
    dual_membership,
    membership,
    membership_sup,
    mul_bound_check,
    seminorm_l1,
    seminorm_sup,
)
from .taylor import (
    exp_coeffs,
    geometric_coeffs,
    hadamard_mul,
    index_coeffs,
    polynomial_coeffs,
    read_coefficients_csv,
    write_coefficients_csv,
)

__all__ = [
    'SeqElement',
    'pointwise_mul',
    'InequalityReport',
    'NormStatus',
    'SeminormValue',
    'dual_membership',
    'membership',
    'membership_sup',
    'mul_bound_check',
    'seminorm_l1',
    'seminorm_sup',
    'exp_coeffs',
    'geometric_coeffs',
    'hadamard_mul',
    'index_coeffs',
    'polynomial_coeffs',
    'read_coefficients_csv',
    'write_coefficients_csv',
]
