#!/usr/bin/env python3
"""
Tests for the homological decision tables and consistency assertions.

Run with: python3 -m pytest scripts/classifier/test_classifier.py -v
"""

import itertools
import json
import unittest
from pathlib import Path

import sys
if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent.parent))

from hypothesis import given, settings, strategies as st

from workbench.errors import InconsistentProfileError, NotAnAlgebraError
from workbench.verdict import Verdict
from weights.catalog import make_builtin
from conditions.profile import ConditionProfile
from classifier.homology import (
    HomologicalProfile,
    classify,
    classify_family,
    consistency_check,
    profile_conditions,
)
from classifier.tables import (
    BAR_SPACE,
    SUP_SPACE,
    TRIVIAL_MODULE,
    CaseResult,
    Dimension,
    classify_strong,
    classify_weak,
)

DEPTH = 200
BUDGET = 3

verdicts = st.sampled_from([True, False, None])


def _profile(U, N, B, M, family=""):
    return ConditionProfile.from_bools(U, N, B, M, family)


class TestDecisionTables(unittest.TestCase):
    """Test the weak and strong tables row by row."""

    def test_unital(self):
        cp = _profile(True, True, True, True)
        self.assertEqual(classify_weak(cp).dimension, Dimension.ZERO)
        self.assertEqual(classify_strong(cp).dimension, Dimension.ZERO)

    def test_nuclear_biprojective(self):
        cp = _profile(False, True, True, True)
        weak = classify_weak(cp)
        self.assertEqual(weak.dimension, Dimension.ONE)
        self.assertEqual(weak.witness, TRIVIAL_MODULE)

    def test_not_nuclear(self):
        cp = _profile(False, False, True, True)
        self.assertEqual(classify_weak(cp).dimension, Dimension.TWO)
        self.assertEqual(classify_weak(cp).witness, SUP_SPACE)
        self.assertEqual(classify_strong(cp).dimension, Dimension.TWO)

    def test_not_biprojective(self):
        cp = _profile(False, True, False, True)
        self.assertEqual(classify_weak(cp).dimension, Dimension.INFINITE)
        self.assertEqual(classify_strong(cp).witness, TRIVIAL_MODULE)

    def test_condition_m_fails(self):
        cp = _profile(False, True, True, False)
        strong = classify_strong(cp)
        self.assertEqual(strong.dimension, Dimension.TWO)
        self.assertEqual(strong.witness, BAR_SPACE)
        self.assertEqual(classify_weak(cp).dimension, Dimension.ONE)

    def test_unknown_blocks(self):
        cp = _profile(False, None, True, True)
        result = classify_weak(cp)
        self.assertEqual(result.dimension, Dimension.UNKNOWN)
        self.assertEqual(result.blocking, "N")

    def test_failed_b_decides_despite_unknown_u(self):
        cp = _profile(None, None, False, None)
        self.assertEqual(classify_strong(cp).dimension, Dimension.INFINITE)

    def test_unknown_m_only_blocks_strong(self):
        cp = _profile(False, True, True, None)
        self.assertEqual(classify_weak(cp).dimension, Dimension.ONE)
        self.assertEqual(classify_strong(cp).blocking, "M")

    def test_all_boolean_combinations(self):
        """Every (U, N, B, M) combination classifies or is rejected."""
        for U, N, B, M in itertools.product([True, False], repeat=4):
            if U and not (N and B and M):
                with self.assertRaises(InconsistentProfileError):
                    _profile(U, N, B, M)
                continue
            hp = classify(_profile(U, N, B, M))
            self.assertTrue(hp.dg.known and hp.wdg.known, (U, N, B, M))
            self.assertEqual(consistency_check(hp), [], (U, N, B, M))
            differs = hp.dg != hp.wdg
            self.assertEqual(differs, B and N and not M and not U, (U, N, B, M))

    def test_direct_construction_is_rejected(self):
        cp = ConditionProfile(Verdict.holds(1, ""), Verdict.fails(1, ""), Verdict.holds(1, ""),
                              Verdict.holds(1, ""))
        with self.assertRaises(InconsistentProfileError):
            classify(cp)

    @given(verdicts, verdicts, verdicts, verdicts)
    @settings(max_examples=100, deadline=None)
    def test_deterministic_serialization(self, U, N, B, M):
        if U is True:
            N = B = M = True
        first = json.dumps(classify(_profile(U, N, B, M)).to_dict(), sort_keys=True)
        second = json.dumps(classify(_profile(U, N, B, M)).to_dict(), sort_keys=True)
        self.assertEqual(first, second)


class TestTrivialityFlags(unittest.TestCase):
    """Test unital/biprojective/approximately contractible flags."""

    def test_unital_flags(self):
        flags = classify(_profile(True, None, None, None)).flags
        self.assertTrue(all(flags.values()))

    def test_approximately_contractible_from_b_and_n(self):
        flags = classify(_profile(False, True, True, True)).flags
        self.assertTrue(flags["approximately_contractible"])
        self.assertFalse(flags["amenable"])

    def test_approximately_contractible_unknown_without_fact(self):
        flags = classify(_profile(False, False, True, True)).flags
        self.assertIsNone(flags["approximately_contractible"])

    def test_known_value_used(self):
        flags = classify(_profile(False, False, True, True), approximately_contractible=False).flags
        self.assertFalse(flags["approximately_contractible"])

    def test_serialized_unknown(self):
        data = classify(_profile(False, None, True, True)).to_dict()
        self.assertEqual(data["flags"]["approximately_contractible"], "unknown")


class TestConsistencyCheck(unittest.TestCase):
    """Test the dimension inequalities."""

    def _hp(self, dg, wdg, **flags):
        return HomologicalProfile(dg, dg, wdg, wdg, CaseResult(dg, None, "built"),
                                  CaseResult(wdg, None, "built"), flags)

    def test_weak_above_strong(self):
        violations = consistency_check(self._hp(Dimension.ONE, Dimension.TWO))
        self.assertIn("wdg ≤ dg", violations)

    def test_biprojective_bound(self):
        hp = self._hp(Dimension.INFINITE, Dimension.INFINITE, biprojective=True)
        self.assertIn("db ≤ 2", consistency_check(hp))

    def test_unknown_is_not_a_violation(self):
        hp = self._hp(Dimension.UNKNOWN, Dimension.TWO, biprojective=True)
        self.assertEqual(consistency_check(hp), [])


class TestGoldenCatalog(unittest.TestCase):
    """Test end-to-end classification of the catalog families."""

    EXPECTED = {
        "l1": ("2", "2", "2", "2"),
        "s": ("1", "1", "1", "1"),
        "entire": ("1", "1", "1", "1"),
        "hadamard_disk(1)": ("0", "0", "0", "0"),
        "hadamard_disk(2)": ("inf", "inf", "inf", "inf"),
        "matrix_example": ("2", "2", "1", "1"),
        "finite_dim(64)": ("0", "0", "0", "0"),
    }

    @classmethod
    def setUpClass(cls):
        cls.profiles = {family_id: classify_family(make_builtin(family_id), DEPTH, BUDGET)
                        for family_id in cls.EXPECTED}

    def test_dimensions(self):
        for family_id, expected in self.EXPECTED.items():
            hp = self.profiles[family_id]
            self.assertEqual(tuple(d.value for d in hp.dimensions), expected, family_id)

    def test_consistent(self):
        for family_id, hp in self.profiles.items():
            self.assertEqual(consistency_check(hp), [], family_id)

    def test_matrix_example_witnesses(self):
        hp = self.profiles["matrix_example"]
        self.assertEqual(hp.witnesses, {"dg_db": BAR_SPACE, "wdg_wdb": TRIVIAL_MODULE})

    def test_l1_not_approximately_contractible(self):
        flags = self.profiles["l1"].flags
        self.assertTrue(flags["biprojective"])
        self.assertFalse(flags["approximately_contractible"])

    def test_s_approximately_contractible(self):
        self.assertTrue(self.profiles["s"].flags["approximately_contractible"])

    def test_finite_dim_flags(self):
        self.assertTrue(all(self.profiles["finite_dim(64)"].flags.values()))

    def test_non_algebra_rejected(self):
        with self.assertRaises(NotAnAlgebraError):
            profile_conditions(make_builtin("hadamard_disk(1/2)"), DEPTH, BUDGET)


if __name__ == "__main__":
    unittest.main()
