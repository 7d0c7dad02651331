#!/usr/bin/env python3
"""
Tests for sequence elements, seminorms, membership and Taylor helpers.

Run with: python3 -m pytest scripts/sequences/test_sequences.py -v
"""

import math
import tempfile
import unittest
from pathlib import Path

import sys
if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent.parent))

import mpmath
import numpy as np
from hypothesis import given, settings, strategies as st

from workbench.errors import ConfigError, PreconditionError
from weights.catalog import make_builtin
from relations.domination import is_algebra
from relations.witness import non_algebra_witness
from sequences.element import SeqElement, pointwise_mul
from sequences.norms import (
    NormStatus,
    dual_membership,
    membership,
    membership_sup,
    mul_bound_check,
    seminorm_l1,
    seminorm_sup,
)
from sequences.taylor import (
    exp_coeffs,
    geometric_coeffs,
    hadamard_mul,
    index_coeffs,
    polynomial_coeffs,
    read_coefficients_csv,
    write_coefficients_csv,
)

N = 1000


class TestSeqElement(unittest.TestCase):
    """Test construction and products of truncated elements."""

    def test_from_rule(self):
        x = SeqElement.from_rule("2^(-i)", 10)
        np.testing.assert_allclose(x.coeffs.real, 2.0 ** -np.arange(1, 11))
        self.assertIsNotNone(x.tail_rule)

    def test_rejects_nan(self):
        with self.assertRaises(ConfigError):
            SeqElement.from_coeffs([1.0, float("nan")])

    def test_phase_survives_product(self):
        """(i)(i) = -1."""
        x = SeqElement.from_coeffs([1j, 2.0])
        product = pointwise_mul(x, x)
        np.testing.assert_allclose(product.coeffs, [-1.0, 4.0], atol=1e-15)

    def test_product_with_ones(self):
        x = SeqElement.from_rule("1/i^2", 50)
        product = pointwise_mul(x, SeqElement.ones(50))
        np.testing.assert_array_equal(product.log_abs, x.log_abs)

    def test_geometric_square(self):
        """2^-i * 2^-i = 4^-i."""
        x = SeqElement.from_rule("2^(-i)", 40)
        np.testing.assert_allclose(pointwise_mul(x, x).coeffs.real, 4.0 ** -np.arange(1, 41))

    def test_disjoint_units(self):
        self.assertTrue(pointwise_mul(SeqElement.unit(1, 5), SeqElement.unit(2, 5)).is_zero)

    def test_truncates_to_shorter(self):
        self.assertEqual(pointwise_mul(SeqElement.ones(10), SeqElement.ones(4)).n, 4)

    def test_dict_round_trip(self):
        x = SeqElement.from_coeffs([1.0, -2.0, 0.5j])
        back = SeqElement.from_dict(x.to_dict())
        np.testing.assert_allclose(back.coeffs, x.coeffs)

    def test_dict_length_mismatch(self):
        with self.assertRaises(ConfigError):
            SeqElement.from_dict({"N": 3, "coeffs": [[1.0, 0.0]]})


class TestSeminorms(unittest.TestCase):
    """Test seminorms with tail bounds."""

    def test_geometric_on_s(self):
        """sum i / 2^i = 2."""
        value = seminorm_l1(SeqElement.from_rule("2^(-i)", N), make_builtin("s"), 1)
        self.assertEqual(value.status, NormStatus.CONVERGED)
        self.assertAlmostEqual(value.partial.to_float(), 2.0, places=10)
        self.assertAlmostEqual(value.bound.to_float(), 2.0, places=10)

    def test_matches_high_precision_sum(self):
        value = seminorm_l1(SeqElement.from_rule("1/i^3", N), make_builtin("s"), 1)
        with mpmath.workdps(40):
            direct = mpmath.fsum(mpmath.mpf(1) / mpmath.mpf(i) ** 2 for i in range(1, N + 1))
        self.assertLess(abs(value.partial.to_float() / float(direct) - 1.0), 1e-10)

    def test_unit_vector(self):
        value = seminorm_l1(SeqElement.unit(1, 5), make_builtin("entire"), 3)
        self.assertAlmostEqual(value.partial.log, math.log(3.0), places=12)
        self.assertEqual(value.status, NormStatus.CONVERGED)

    def test_ones_on_l1_diverge(self):
        value = seminorm_l1(SeqElement.ones(N), make_builtin("l1"), 1)
        self.assertEqual(value.status, NormStatus.DIVERGING)

    def test_no_tail_rule_is_unknown(self):
        value = seminorm_l1(SeqElement.from_rule("2^(-i)", N, with_tail=False), make_builtin("s"), 1)
        self.assertEqual(value.status, NormStatus.UNKNOWN)
        self.assertEqual(len(value.trend), 2)

    def test_sup_constant_terms(self):
        """sup i * (1/i) = 1."""
        value = seminorm_sup(SeqElement.from_rule("1/i", N), make_builtin("s"), 1)
        self.assertEqual(value.status, NormStatus.CONVERGED)
        self.assertAlmostEqual(value.partial.log, 0.0, places=12)

    def test_sup_of_zero(self):
        value = seminorm_sup(SeqElement.zeros(10), make_builtin("s"), 2)
        self.assertTrue(value.partial.is_zero)

    def test_sup_diverges(self):
        """sup (3/2)^i is infinite."""
        value = seminorm_sup(SeqElement.from_rule("2^(-i)", N), make_builtin("entire"), 3)
        self.assertEqual(value.status, NormStatus.DIVERGING)


class TestMembership(unittest.TestCase):
    """Test membership in λ(P) and λ∞(P)."""

    def test_geometric_in_s(self):
        verdict = membership(SeqElement.from_rule("2^(-i)", N), make_builtin("s"), level_budget=4)
        self.assertTrue(verdict.is_holds)

    def test_inverse_square_not_in_s(self):
        verdict = membership(SeqElement.from_rule("1/i^2", N), make_builtin("s"), level_budget=4)
        self.assertTrue(verdict.is_fails)

    def test_without_tail_rule(self):
        x = SeqElement.from_rule("2^(-i)", N, with_tail=False)
        self.assertTrue(membership(x, make_builtin("s"), level_budget=2).is_unknown)

    def test_inverse_square_in_sup_space_of_l1(self):
        self.assertTrue(membership_sup(SeqElement.from_rule("1/i^2", N), make_builtin("l1")).is_holds)

    def test_witness_trends(self):
        """The witness has no tail proof while x² blows up at the base level."""
        witness = non_algebra_witness(make_builtin("hadamard_disk(1/2)"), k_max=10, depth=1000)
        x = witness.element
        self.assertTrue(membership(x, witness.family, level_budget=2).is_unknown)
        square = seminorm_l1(pointwise_mul(x, x), witness.family, witness.base_level)
        self.assertGreater(square.partial.log, math.log(1e6))


class TestMulBound(unittest.TestCase):
    """Test ‖xy‖_p <= C ‖x‖_q ‖y‖_q."""

    @classmethod
    def setUpClass(cls):
        cls.s = make_builtin("s")
        cls.certificate = is_algebra(cls.s, level_budget=4).certificate

    def test_geometric_on_s(self):
        x = SeqElement.from_rule("2^(-i)", N)
        report = mul_bound_check(x, x, self.s, 1, self.certificate)
        self.assertTrue(report.holds)
        self.assertEqual(report.details["target_level"], 1)
        self.assertGreater(report.slack_log, 0.0)

    def test_zero(self):
        report = mul_bound_check(SeqElement.zeros(10), SeqElement.ones(10), self.s, 1, self.certificate)
        self.assertTrue(report.holds)

    def test_units_on_l1(self):
        e1 = SeqElement.unit(1, 3)
        report = mul_bound_check(e1, e1, make_builtin("l1"), 1)
        self.assertTrue(report.holds)
        self.assertAlmostEqual(report.lhs_log, report.rhs_log, places=12)

    @given(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=30),
           st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=30),
           st.integers(min_value=1, max_value=4))
    @settings(max_examples=50, deadline=None)
    def test_submultiplicative(self, xs, ys, k):
        """Weights >= 1 make every seminorm submultiplicative."""
        report = mul_bound_check(SeqElement.from_coeffs(xs), SeqElement.from_coeffs(ys),
                                 self.s, k, self.certificate)
        self.assertTrue(report.holds)


class TestDualMembership(unittest.TestCase):
    """Test sampled Köthe-Toeplitz dual membership."""

    def test_ones_against_geometric(self):
        verdict = dual_membership(SeqElement.ones(N), [SeqElement.from_rule("2^(-i)", N)])
        self.assertTrue(verdict.is_holds)
        self.assertTrue(verdict.details["sampled"])

    def test_growth_against_geometric(self):
        verdict = dual_membership(SeqElement.from_rule("2^i", 100), [SeqElement.from_rule("2^(-i)", 100)])
        self.assertTrue(verdict.is_fails)

    def test_finite_support(self):
        verdict = dual_membership(SeqElement.unit(5, 10), [SeqElement.from_rule("i^3", 10)])
        self.assertTrue(verdict.is_holds)

    def test_needs_generators(self):
        with self.assertRaises(PreconditionError):
            dual_membership(SeqElement.ones(5), [])


class TestTaylor(unittest.TestCase):
    """Test Hadamard products of Taylor coefficients."""

    @given(st.lists(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e100),
                    min_size=1, max_size=64))
    @settings(max_examples=50, deadline=None)
    def test_geometric_is_identity(self, values):
        f = np.array(values, dtype=complex)
        np.testing.assert_array_equal(hadamard_mul(f, geometric_coeffs(f.size)), f)

    def test_exp_times_geometric(self):
        np.testing.assert_array_equal(hadamard_mul(exp_coeffs(30), geometric_coeffs(30)), exp_coeffs(30))

    def test_geometric_squared(self):
        np.testing.assert_array_equal(hadamard_mul(geometric_coeffs(16), geometric_coeffs(16)),
                                      geometric_coeffs(16))

    def test_index_times_exp(self):
        """m / m! = 1/(m-1)!, the coefficients of z e^z."""
        product = hadamard_mul(index_coeffs(20), exp_coeffs(20))
        self.assertEqual(product[0], 0)
        np.testing.assert_allclose(product[1:], exp_coeffs(19), rtol=1e-12)

    def test_polynomial_padding(self):
        np.testing.assert_array_equal(polynomial_coeffs([1, 2], 4), [1, 2, 0, 0])

    def test_csv(self):
        coeffs = np.array([1.0, 0.5 - 2j, 1e-300])
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "coeffs.csv"
            write_coefficients_csv(path, coeffs)
            np.testing.assert_array_equal(read_coefficients_csv(path), coeffs)


if __name__ == "__main__":
    unittest.main()
