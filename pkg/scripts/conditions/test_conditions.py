#!/usr/bin/env python3
"""
Tests for conditions (U), (N), (B), (M), the log criterion and profiles.

Run with: python3 -m pytest scripts/conditions/test_conditions.py -v
"""

import unittest
from pathlib import Path

import sys
if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
from hypothesis import given, settings, strategies as st

from workbench.errors import HypothesisError, InconsistentProfileError, NotAnAlgebraError
from workbench.verdict import Tier, Verdict
from weights.catalog import make_builtin
from weights.family import FamilyFlags, Monotonicity, dsl_family
from weights.index_set import IndexSet
from sequences.element import SeqElement
from conditions.checks import check_B, check_log_criterion, check_N, check_U, gp_norm_check
from conditions.matrices import CLASSIC, MMatrices, check_M, construct_M_matrices
from conditions.profile import ConditionProfile
from conditions.runner import ConditionRunner

DEPTH = 200


class TestCheckU(unittest.TestCase):
    """Test condition (U)."""

    def test_unit_disk_is_unital(self):
        self.assertTrue(check_U(make_builtin("hadamard_disk(1)"), DEPTH).is_holds)

    def test_l1_is_not_unital(self):
        self.assertTrue(check_U(make_builtin("l1"), DEPTH).is_fails)

    def test_s_is_not_unital(self):
        self.assertTrue(check_U(make_builtin("s"), DEPTH).is_fails)

    def test_finite_dim(self):
        self.assertTrue(check_U(make_builtin("finite_dim(4)"), DEPTH).is_holds)

    def test_user_family_by_oracle(self):
        """(k+1)^(-i) is summable at each of three levels."""
        family = dsl_family("decay", IndexSet.naturals(), "(k+1)^(-i)", count=3)
        verdict = check_U(family, DEPTH, level_budget=3)
        self.assertTrue(verdict.is_holds)
        self.assertEqual(verdict.details["proof_rule"], "oracle")

    def test_user_family_fails_at_first_level(self):
        family = dsl_family("flat", IndexSet.naturals(), "k^(-i)", count=2)
        verdict = check_U(family, DEPTH, level_budget=2)
        self.assertTrue(verdict.is_fails)
        self.assertEqual(verdict.details["source_level"], 1)


class TestCheckN(unittest.TestCase):
    """Test condition (N) and the Grothendieck-Pietsch comparison."""

    @classmethod
    def setUpClass(cls):
        cls.s = make_builtin("s")
        cls.s_verdict = check_N(cls.s, DEPTH, level_budget=2)

    def test_l1_is_not_nuclear(self):
        self.assertTrue(check_N(make_builtin("l1"), DEPTH).is_fails)

    def test_s_is_nuclear_two_levels_up(self):
        """sum i^k / i^(k+2) converges, sum i^k / i^(k+1) does not."""
        self.assertTrue(self.s_verdict.is_holds)
        self.assertEqual(self.s_verdict.certificate.bound_for(1).target_level, 3)

    def test_entire_is_nuclear(self):
        self.assertTrue(check_N(make_builtin("entire"), DEPTH, level_budget=2).is_holds)

    def test_misdeclared_order_is_not_an_exact_failure(self):
        """(i/2)^(k/100) has no finite level supremum, so (N) is never refuted through it."""
        flags = FamilyFlags(True, Monotonicity.NONE, False)
        family = dsl_family("slow", IndexSet.naturals(), "(i/2)^(k/100)", flags=flags)
        self.assertFalse(check_N(family, DEPTH, level_budget=3).is_fails)

    def test_gp_norm_geometric(self):
        x = SeqElement.from_rule("2^(-i)", DEPTH)
        report = gp_norm_check(x, self.s, self.s_verdict.certificate, 1)
        self.assertTrue(report.holds)
        self.assertEqual(report.details["target_level"], 3)

    @given(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=40),
           st.integers(min_value=1, max_value=2))
    @settings(max_examples=50, deadline=None)
    def test_gp_norm_bound(self, values, k):
        """‖x‖_p <= C sup |x_i| q_i for every finitely supported x."""
        report = gp_norm_check(SeqElement.from_coeffs(values), self.s, self.s_verdict.certificate, k)
        self.assertTrue(report.holds)


class TestCheckB(unittest.TestCase):
    """Test condition (B)."""

    def test_l1(self):
        self.assertTrue(check_B(make_builtin("l1"), DEPTH).is_holds)

    def test_s(self):
        self.assertTrue(check_B(make_builtin("s"), DEPTH, level_budget=3).is_holds)

    def test_disk_of_radius_two(self):
        self.assertTrue(check_B(make_builtin("hadamard_disk(2)"), DEPTH, level_budget=3).is_fails)

    def test_not_an_algebra(self):
        with self.assertRaises(NotAnAlgebraError):
            check_B(make_builtin("hadamard_disk(1/2)"), DEPTH, level_budget=2)


class TestLogCriterion(unittest.TestCase):
    """Test sup (log n)/(log p_n) < inf."""

    def test_s(self):
        self.assertTrue(check_log_criterion(make_builtin("s"), DEPTH).is_holds)

    def test_entire(self):
        self.assertTrue(check_log_criterion(make_builtin("entire"), DEPTH).is_holds)

    def test_l1(self):
        self.assertTrue(check_log_criterion(make_builtin("l1"), DEPTH).is_fails)

    def test_user_polynomial_weights(self):
        flags = FamilyFlags(True, Monotonicity.NONDECREASING, True)
        family = dsl_family("poly", IndexSet.naturals(), "i^k", flags=flags)
        verdict = check_log_criterion(family, DEPTH, level_budget=2)
        self.assertTrue(verdict.is_holds)
        self.assertEqual(verdict.details["source_level"], 1)

    def test_bounded_weights_fail_by_level_supremum(self):
        flags = FamilyFlags(True, Monotonicity.NONDECREASING, True)
        family = dsl_family("bounded", IndexSet.naturals(), "2 - 1/k", flags=flags)
        self.assertTrue(check_log_criterion(family, DEPTH, level_budget=3).is_fails)

    def test_needs_weights_at_least_one(self):
        with self.assertRaises(HypothesisError):
            check_log_criterion(make_builtin("hadamard_disk(1/2)"), DEPTH)

    def test_needs_naturals(self):
        with self.assertRaises(HypothesisError):
            check_log_criterion(make_builtin("matrix_example"), DEPTH)


class TestMMatrices(unittest.TestCase):
    """Test the monotone-family (M) matrices."""

    @classmethod
    def setUpClass(cls):
        cls.s = make_builtin("s")
        cls.matrices = construct_M_matrices(cls.s)

    def test_below_diagonal_limit_is_zero(self):
        """inf_k (1/2)^k = 0."""
        self.assertEqual(self.matrices.alpha(2, 1), 0.0)
        self.assertEqual(self.matrices.beta(2, 1), 1.0)

    def test_above_diagonal_is_one(self):
        self.assertEqual(self.matrices.alpha(1, 2), 1.0)
        self.assertEqual(self.matrices.beta(1, 2), 0.0)

    def test_diagonal(self):
        for i in range(1, 6):
            self.assertEqual(self.matrices.alpha(i, i), 1.0)

    def test_alpha_plus_beta_is_one(self):
        self.assertEqual(self.matrices.m1_violations(80), 0)
        disk = construct_M_matrices(make_builtin("hadamard_disk(1)"))
        self.assertEqual(disk.m1_violations(80), 0)

    def test_alpha_in_unit_interval(self):
        alpha = self.matrices.alpha_block(60)
        self.assertTrue(np.all((alpha >= 0.0) & (alpha <= 1.0)))

    def test_ratio_plus_alpha_at_least_one(self):
        """p_i/p_j + α_ij >= 1 at every level."""
        for family in (self.s, make_builtin("hadamard_disk(1)")):
            matrices = construct_M_matrices(family)
            alpha = matrices.alpha_block(50)
            for k in range(1, 5):
                p = family.log_weights(k, 50)
                ratio = np.exp(p[:, None] - p[None, :])
                self.assertTrue(np.all(ratio + alpha >= 1.0 - 1e-12), f"{family.name} level {k}")

    def test_needs_monotone_family(self):
        with self.assertRaises(HypothesisError):
            construct_M_matrices(dsl_family("unflagged", IndexSet.naturals(), "k*i"))

    def test_needs_naturals(self):
        with self.assertRaises(HypothesisError):
            construct_M_matrices(make_builtin("matrix_example"))


class TestCheckM(unittest.TestCase):
    """Test condition (M)."""

    def test_s_with_unit_constants(self):
        verdict = check_M(make_builtin("s"), depth=100, level_budget=3)
        self.assertTrue(verdict.is_holds)
        self.assertEqual(verdict.details["proof_rule"], "monotone_family")
        self.assertEqual(verdict.details["constants"][1], {"target_level": 1, "logC": 0.0})

    def test_l1(self):
        self.assertTrue(check_M(make_builtin("l1"), depth=100).is_holds)

    def test_unit_disk(self):
        self.assertTrue(check_M(make_builtin("hadamard_disk(1)"), depth=100, level_budget=3).is_holds)

    def test_finite_dim(self):
        self.assertTrue(check_M(make_builtin("finite_dim(3)")).is_holds)

    def test_matrix_example_fails_by_curated_fact(self):
        verdict = check_M(make_builtin("matrix_example"))
        self.assertTrue(verdict.is_fails)
        self.assertEqual(verdict.details["proof_rule"], "curated")
        self.assertEqual(verdict.tier, Tier.EXACT)

    def test_classic_variant_needs_a_higher_level(self):
        """With q_j in place of q_j², level 1 of s needs level 2."""
        verdict = check_M(make_builtin("s"), depth=100, level_budget=1, variant=CLASSIC)
        self.assertFalse(verdict.is_fails)
        self.assertEqual(verdict.details["constants"][1]["target_level"], 2)

    def test_explicit_matrices_on_finite_set(self):
        family = dsl_family("fin", IndexSet.finite(3), "k*i", count=2)
        matrices = MMatrices(family, alpha=np.ones((3, 3)))
        verdict = check_M(family, matrices)
        self.assertTrue(verdict.is_holds)
        self.assertEqual(verdict.details["proof_rule"], "enumeration")

    def test_rejects_unknown_variant(self):
        with self.assertRaises(ValueError):
            check_M(make_builtin("s"), variant="older")

    def test_explicit_alpha_range(self):
        with self.assertRaises(ValueError):
            MMatrices(make_builtin("s"), alpha=np.full((2, 2), 2.0))


class TestConditionProfile(unittest.TestCase):
    """Test profile construction and (U)-propagation."""

    def test_unital_propagates(self):
        profile = ConditionProfile.from_bools(True, None, None, None)
        self.assertEqual(profile.as_bools(), (True, True, True, True))
        self.assertEqual(profile.N.details["implied_by"], "U")

    def test_unital_with_failure_is_inconsistent(self):
        with self.assertRaises(InconsistentProfileError):
            ConditionProfile.from_bools(True, False, True, True)

    def test_unknown_stays_unknown(self):
        profile = ConditionProfile.from_bools(False, None, True, True)
        self.assertIsNone(profile.as_bools()[1])

    def test_to_dict(self):
        data = ConditionProfile.from_bools(False, True, True, True, family="s").to_dict()
        self.assertEqual(data["family"], "s")
        self.assertEqual(data["N"]["outcome"], "holds")
        self.assertEqual(set(data), {"family", "depths", "U", "N", "B", "M"})


class TestConditionRunner(unittest.TestCase):
    """Test the runner on catalog families."""

    def setUp(self):
        self.runner = ConditionRunner({"depth": DEPTH, "level_budget": 3, "M": {"m_depth": 100}})

    def test_s(self):
        profile = self.runner.profile(make_builtin("s"))
        self.assertEqual(profile.as_bools(), (False, True, True, True))

    def test_l1(self):
        profile = self.runner.profile(make_builtin("l1"))
        self.assertEqual(profile.as_bools(), (False, False, True, True))

    def test_unital_families(self):
        for family_id in ("hadamard_disk(1)", "finite_dim(4)"):
            profile = self.runner.profile(make_builtin(family_id))
            self.assertEqual(profile.as_bools(), (True, True, True, True), family_id)

    def test_check_errors_are_isolated(self):
        results = self.runner.run_checks(make_builtin("hadamard_disk(1/2)"), ["B", "M"])
        self.assertEqual(set(results), {"B", "M"})
        self.assertTrue(results["B"].is_unknown)
        self.assertEqual(results["B"].details["error"], "NotAnAlgebraError")
        self.assertTrue(results["M"].is_holds)

    def test_unexpected_errors_are_isolated(self):
        """A ValueError in (M) leaves the other verdicts in place."""
        runner = ConditionRunner({"depth": DEPTH, "level_budget": 3, "M": {"variant": "bogus"}})
        results = runner.run_checks(make_builtin("s"))
        self.assertEqual(set(results), {"U", "N", "B", "M"})
        self.assertTrue(results["M"].is_unknown)
        self.assertEqual(results["M"].details["error"], "ValueError")
        self.assertNotIn("exit_code", results["M"].details)
        self.assertTrue(results["N"].is_holds)
        self.assertTrue(results["B"].is_holds)

    def test_format_results(self):
        results = {"U": Verdict.fails(10, "diverges"), "N": Verdict.holds(10, "summable")}
        text = self.runner.format_results(results, verbose=True)
        self.assertIn("Condition Check Results", text)
        self.assertIn("✗ (U)", text)
        self.assertIn("Holds: 1", text)


if __name__ == "__main__":
    unittest.main()
