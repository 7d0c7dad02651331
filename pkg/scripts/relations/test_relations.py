#!/usr/bin/env python3
"""
Tests for domination, equivalence, the algebra condition and the
non-algebra witness.

Run with: python3 -m pytest scripts/relations/test_relations.py -v
"""

import math
import unittest
from pathlib import Path
from unittest.mock import patch

import sys
if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from workbench.config import config
from workbench.errors import CertificateMissingError, IndexSetMismatchError, PreconditionError
from workbench.verdict import Tier
from weights.catalog import make_builtin
from weights.family import dsl_family, square
from weights.index_set import IndexSet
from relations.certificates import DominationCertificate, LevelBound, LevelMap
from relations.domination import dominates, equivalent, is_algebra
from relations.search import LevelSearch
from relations.witness import non_algebra_witness, trigamma_log

DEPTH = 200


class TestLevelMap(unittest.TestCase):
    """Test affine level maps."""

    def test_compose(self):
        """(2k + 1) then (k + 3) is 2k + 4."""
        composed = LevelMap(2, 1).compose(LevelMap(1, 3))
        self.assertEqual(composed, LevelMap(2, 4))
        self.assertEqual(composed(5), 14)

    def test_candidates_cover_observed_targets(self):
        """Every candidate map reaches at least the observed targets."""
        targets = {1: 1, 2: 1, 3: 2, 4: 2}
        for level_map in LevelMap.candidates(targets):
            for k, m in targets.items():
                self.assertGreaterEqual(level_map(k), m)

    def test_describe(self):
        self.assertEqual(LevelMap(1, 0).describe(), "m(k) = k")
        self.assertEqual(LevelMap(0, 2).describe(), "m(k) = 2")


class TestDominates(unittest.TestCase):
    """Test the certificate search."""

    def test_l1_below_s(self):
        """1 <= 1 * i with target level 1 and C = 1."""
        verdict = dominates(make_builtin("l1"), make_builtin("s"), DEPTH)
        self.assertTrue(verdict.is_holds)
        self.assertEqual(verdict.tier, Tier.EXACT)
        bound = verdict.certificate.bound_for(1)
        self.assertEqual(bound.target_level, 1)
        self.assertAlmostEqual(bound.log_c, 0.0, places=9)

    def test_s_not_below_l1(self):
        """i^k / 1 is unbounded."""
        verdict = dominates(make_builtin("s"), make_builtin("l1"), DEPTH)
        self.assertTrue(verdict.is_fails)
        self.assertEqual(verdict.details["source_level"], 1)

    def test_certificate_replays_on_longer_prefix(self):
        """A Holds certificate survives a prefix twice as long."""
        l1, s = make_builtin("l1"), make_builtin("s")
        verdict = dominates(l1, s, DEPTH)
        self.assertEqual(verdict.certificate.replay(l1, s, 2 * DEPTH), [])

    def test_certificate_json_keys(self):
        verdict = dominates(make_builtin("l1"), make_builtin("s"), DEPTH)
        bound = verdict.certificate.to_dict()["bounds"][0]
        self.assertEqual(set(bound), {"source_level", "target_level", "logC", "proof_rule", "depth"})

    def test_composition(self):
        """l1 < s and s < entire compose into l1 < entire."""
        l1, s, entire = make_builtin("l1"), make_builtin("s"), make_builtin("entire")
        first = dominates(l1, s, DEPTH)
        second = dominates(s, entire, DEPTH, level_budget=2)
        self.assertIsNotNone(second.certificate)
        composed = first.certificate.compose(second.certificate)
        self.assertEqual(composed.bound_for(1).target_level, 2)
        self.assertEqual(composed.replay(l1, entire, 2 * DEPTH), [])

    def test_compose_missing_level(self):
        """Composition needs a bound at every intermediate level."""
        first = DominationCertificate("bounded", "a", "b", (LevelBound(1, 3, 0.0, "oracle", 10),),
                                      Tier.EXACT)
        second = DominationCertificate("bounded", "b", "c", (LevelBound(1, 1, 0.0, "oracle", 10),),
                                       Tier.EXACT)
        with self.assertRaises(CertificateMissingError):
            first.compose(second)

    def test_sampled_constant_is_recorded(self):
        """Without an oracle tail bound the rule stays proven but C is marked sampled."""
        with patch.object(LevelSearch, "_tail", return_value=None):
            verdict = dominates(make_builtin("l1"), make_builtin("s"), DEPTH)
        self.assertTrue(verdict.is_holds)
        self.assertEqual(verdict.tier, Tier.EXACT)
        bound = verdict.certificate.bound_for(1)
        self.assertEqual(bound.proof_rule, "oracle_sampled_c")
        self.assertTrue(bound.c_sampled)
        self.assertTrue(bound.to_dict()["logC_sampled"])

    def test_composition_keeps_sampled_flag(self):
        first = DominationCertificate("bounded", "a", "b",
                                      (LevelBound(1, 1, 0.0, "oracle_sampled_c", 10, c_sampled=True),),
                                      Tier.EXACT)
        second = DominationCertificate("bounded", "b", "c", (LevelBound(1, 2, 0.0, "oracle", 10),),
                                       Tier.EXACT)
        self.assertTrue(first.compose(second).bound_for(1).c_sampled)

    def test_index_set_mismatch(self):
        with self.assertRaises(IndexSetMismatchError):
            dominates(make_builtin("s"), make_builtin("matrix_example"), DEPTH)

    def test_finite_index_set_by_enumeration(self):
        """On a finite set every ratio is bounded; i <= 8 * 1 on finite(8)."""
        ones = make_builtin("finite_dim(8)")
        linear = dsl_family("linear", IndexSet.finite(8), ["i"])
        verdict = dominates(linear, ones, DEPTH)
        self.assertTrue(verdict.is_holds)
        bound = verdict.certificate.bound_for(1)
        self.assertEqual(bound.proof_rule, "enumeration")
        self.assertAlmostEqual(bound.log_c, math.log(8), places=9)


class TestEmpiricalSearch(unittest.TestCase):
    """Test the search with the limit oracle switched off."""

    def setUp(self):
        config.set("oracle.enabled", False)

    def tearDown(self):
        config.set("oracle.enabled", True)

    def test_never_claims_holds(self):
        """Without proofs the search stays Unknown and empirical."""
        small = dsl_family("small", IndexSet.naturals(), ["1/i"])
        verdict = dominates(small, make_builtin("s"), DEPTH)
        self.assertTrue(verdict.is_unknown)
        self.assertEqual(verdict.certificate.tier, Tier.EMPIRICAL)
        self.assertEqual(verdict.certificate.bound_for(1).target_level, 1)


class TestEquivalent(unittest.TestCase):
    """Test equivalence of families."""

    def test_reflexive(self):
        l1 = make_builtin("l1")
        self.assertTrue(equivalent(l1, l1, DEPTH).is_holds)

    def test_s_and_its_square(self):
        s = make_builtin("s")
        verdict = equivalent(s, square(s), DEPTH, level_budget=3)
        self.assertTrue(verdict.is_holds)
        self.assertIsNotNone(verdict.certificate.forward)
        self.assertIsNotNone(verdict.certificate.backward)

    def test_disk_of_radius_two_and_its_square(self):
        """P² < P fails for 1 < R < inf."""
        disk = make_builtin("hadamard_disk(2)")
        verdict = equivalent(disk, square(disk), DEPTH, level_budget=2)
        self.assertTrue(verdict.is_fails)
        self.assertEqual(verdict.details["direction"], "backward")

    def test_disk_of_radius_two_is_algebra(self):
        """P < P² holds for R >= 1."""
        disk = make_builtin("hadamard_disk(2)")
        self.assertTrue(dominates(disk, square(disk), DEPTH, level_budget=2).is_holds)


class TestIsAlgebra(unittest.TestCase):
    """Test P < P²."""

    def test_s_with_unit_constant(self):
        verdict = is_algebra(make_builtin("s"), DEPTH)
        self.assertTrue(verdict.is_holds)
        self.assertEqual(verdict.certificate.bound_for(3).log_c, 0.0)
        self.assertEqual(verdict.certificate.level_map, LevelMap(1, 0))

    def test_l1(self):
        self.assertTrue(is_algebra(make_builtin("l1"), DEPTH).is_holds)

    def test_small_disk_fails(self):
        self.assertTrue(is_algebra(make_builtin("hadamard_disk(1/2)"), DEPTH).is_fails)

    def test_decaying_single_level(self):
        """1/i <= C / i^2 fails."""
        family = dsl_family("decay", IndexSet.naturals(), ["1/i"])
        self.assertTrue(is_algebra(family, DEPTH).is_fails)


class TestNonAlgebraWitness(unittest.TestCase):
    """Test the explicit witness construction."""

    @classmethod
    def setUpClass(cls):
        cls.witness = non_algebra_witness(make_builtin("hadamard_disk(1/2)"), k_max=20, depth=2000)

    def test_guard_on_algebra(self):
        with self.assertRaises(PreconditionError):
            non_algebra_witness(make_builtin("s"), k_max=5, depth=DEPTH)

    def test_distinct_indices(self):
        self.assertEqual(len(set(self.witness.ranks)), 20)

    def test_level_bounds_hold(self):
        """Partial sums at level l stay below sum_{k >= l} 1/k^2."""
        self.assertEqual(self.witness.proof_bound_violations(), [])

    def test_tails_are_small(self):
        for level in range(1, 5):
            self.assertLess(self.witness.tail_log(level), math.log(1e-6))

    def test_square_is_large(self):
        self.assertGreater(self.witness.square_seminorm_log(), math.log(1e6))

    def test_element_support(self):
        element = self.witness.element
        self.assertEqual(sorted(element.support.tolist()), sorted(self.witness.ranks))
        np.testing.assert_allclose(element.log_abs[np.asarray(self.witness.ranks) - 1],
                                   self.witness.log_coeffs)

    def test_quarter_disk(self):
        witness = non_algebra_witness(make_builtin("power_series(1/4, i)"), k_max=10, depth=1000)
        self.assertEqual(witness.proof_bound_violations(), [])

    def test_trigamma(self):
        self.assertAlmostEqual(math.exp(trigamma_log(1)), math.pi ** 2 / 6, places=12)


if __name__ == "__main__":
    unittest.main()
