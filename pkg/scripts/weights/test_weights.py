#!/usr/bin/env python3
"""
Tests for weight families, the DSL and the builtin catalog.

Run with: python3 -m pytest scripts/weights/test_weights.py -v
"""

import math
import unittest
from pathlib import Path

import sys
if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent.parent))

import mpmath
import numpy as np
from hypothesis import given, settings, strategies as st

from workbench.errors import (
    ConfigError,
    IndexSetMismatchError,
    UnknownFamilyError,
    WeightExprError,
)
from weights.axioms import axioms_check, check_declared_flags
from weights.catalog import make_builtin
from weights.dsl import parse_weight_expr
from weights.family import (
    FamilyFlags,
    Monotonicity,
    bar_family,
    dsl_family,
    eval_weight,
    family_from_dict,
    family_to_dict,
    product_family,
    running_max_family,
    square,
)
from weights import oracle
from weights.index_set import IndexSet, cantor_pair
from weights.logvalue import LogValue, log_div, log_mul, tree_logsumexp


class TestLogValue(unittest.TestCase):
    """Test extended-real log scalars."""

    def test_zero_times_infinity_is_zero(self):
        """0 * inf = 0."""
        self.assertTrue((LogValue.zero() * LogValue.infinity()).is_zero)

    def test_division_by_zero_is_infinite(self):
        """a / 0 = +inf, including 0 / 0."""
        self.assertTrue((LogValue.from_value(3.0) / LogValue.zero()).is_infinite)
        self.assertTrue((LogValue.zero() / LogValue.zero()).is_infinite)

    def test_infinity_over_infinity(self):
        """inf / inf = +inf."""
        self.assertTrue((LogValue.infinity() / LogValue.infinity()).is_infinite)

    def test_ordering(self):
        """Order follows the represented values."""
        values = [LogValue.from_value(v) for v in (0.0, 0.5, 2.0)] + [LogValue.infinity()]
        self.assertEqual(values, sorted(reversed(values)))

    def test_dict_round_trip(self):
        """Serialized form keeps the tag."""
        for value in (LogValue.zero(), LogValue.infinity(), LogValue.from_value(7.0)):
            self.assertEqual(LogValue.from_dict(value.to_dict()), value)

    def test_array_conventions(self):
        """Array helpers follow the scalar conventions."""
        inf = float("inf")
        self.assertEqual(float(log_div(-inf, -inf)), inf)
        self.assertEqual(float(log_div(-inf, 1.0)), -inf)
        self.assertEqual(float(log_mul(-inf, inf)), -inf)

    @given(st.lists(st.floats(min_value=-50, max_value=50), min_size=1, max_size=64))
    @settings(max_examples=50, deadline=None)
    def test_tree_logsumexp_matches_direct_sum(self, logs):
        """Pairwise reduction agrees with a direct sum."""
        direct = math.log(sum(math.exp(v) for v in logs))
        self.assertAlmostEqual(tree_logsumexp(logs), direct, places=9)


class TestIndexSet(unittest.TestCase):
    """Test index sets and the Cantor enumeration."""

    def test_cantor_order(self):
        """Pairs ascend by i + j, then by i."""
        i, j = cantor_pair(np.arange(1, 7))
        self.assertEqual(list(zip(i.tolist(), j.tolist())),
                         [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)])

    @given(st.integers(min_value=1, max_value=10 ** 7))
    @settings(max_examples=200, deadline=None)
    def test_cantor_bijective(self, rank):
        """rank -> pair -> rank is the identity."""
        pairs = IndexSet.pairs()
        self.assertEqual(pairs.rank_of(pairs.index_at(rank)), rank)

    def test_finite_clamps_depth(self):
        """A finite set never enumerates past its size."""
        finite = IndexSet.finite(64)
        self.assertEqual(len(finite.enumerate(10000)), 64)
        self.assertTrue(finite.covers(64))
        self.assertFalse(IndexSet.naturals().covers(10 ** 6))

    def test_parse(self):
        """String and dict forms parse."""
        self.assertEqual(IndexSet.parse("finite(8)"), IndexSet.finite(8))
        self.assertEqual(IndexSet.parse({"kind": "natural_pairs"}), IndexSet.pairs())
        with self.assertRaises(ConfigError):
            IndexSet.parse("reals")


class TestWeightExpr(unittest.TestCase):
    """Test the weight DSL."""

    def test_rejects_negative(self):
        """0 - i evaluates to negative values."""
        with self.assertRaises(WeightExprError):
            parse_weight_expr("0 - i")

    def test_accepts_reciprocal(self):
        """i^(-1) is nonnegative."""
        expr = parse_weight_expr("i^(-1)")
        logs = expr.log_values(i=np.array([1.0, 2.0, 4.0]))
        np.testing.assert_allclose(logs, -np.log([1.0, 2.0, 4.0]))

    def test_syntax_error_has_position(self):
        """Syntax errors report where parsing stopped."""
        with self.assertRaises(WeightExprError) as ctx:
            parse_weight_expr("i^^k")
        self.assertEqual(ctx.exception.position, 2)

    def test_unknown_name(self):
        """Free names other than i, j, k are rejected."""
        with self.assertRaises(WeightExprError):
            parse_weight_expr("x + 1")

    def test_level_variable_not_allowed(self):
        """k is rejected where only the index is allowed."""
        with self.assertRaises(WeightExprError):
            parse_weight_expr("i^k", allowed=("i",))

    def test_alternating_zeros(self):
        """(-1)^(i+1) cancels exactly at even indices."""
        expr = parse_weight_expr("(1 + (-1)^(i+1))/2")
        logs = expr.log_values(i=np.arange(1.0, 7.0))
        self.assertTrue(np.all(logs[1::2] == float("-inf")))
        np.testing.assert_array_equal(logs[0::2], 0.0)

    def test_huge_values_stay_finite(self):
        """2^((k*j)^i) is representable in log-domain."""
        expr = parse_weight_expr("2^((k*j)^i)", allowed=("i", "j", "k"))
        logs = expr.log_values(i=np.array([6.0]), j=np.array([10.0]), k=np.array([8.0]))
        self.assertAlmostEqual(logs[0] / (80.0 ** 6 * math.log(2)), 1.0, places=12)

    def test_substitute(self):
        """Substituting the level keeps the other variables."""
        expr = parse_weight_expr("i^k").substitute(k=3)
        self.assertEqual(expr.variables, frozenset({"i"}))
        self.assertAlmostEqual(expr.log_values(i=np.array([2.0]))[0], 3 * math.log(2))


class TestBuiltins(unittest.TestCase):
    """Test builtin families and pointwise evaluation."""

    def test_l1_single_level(self):
        """l1 is the single weight 1."""
        l1 = make_builtin("l1")
        self.assertEqual(l1.level_count, 1)
        self.assertEqual(eval_weight(l1, 1, 10 ** 6).log, 0.0)

    def test_s_level_two_index_three(self):
        """s at level 2, index 3 is 9."""
        self.assertAlmostEqual(eval_weight(make_builtin("s"), 2, 3).to_float(), 9.0)

    def test_log_weights_cache_keeps_longest_prefix(self):
        """Shorter prefixes are slices of the longest one computed."""
        family = dsl_family("powers", IndexSet.naturals(), "i^k")
        long = family.log_weights(2, 500)
        short = family.log_weights(2, 100)
        self.assertEqual(list(family._cache), [2])
        self.assertEqual(len(family._cache[2]), 500)
        np.testing.assert_array_equal(short, long[:100])
        self.assertFalse(short.flags.writeable)
        self.assertEqual(len(family.log_weights(2, 800)), 800)
        self.assertEqual(len(family._cache[2]), 800)

    def test_entire(self):
        """entire at level 3, index 4 is 3^4."""
        self.assertAlmostEqual(eval_weight(make_builtin("entire"), 3, 4).log, 4 * math.log(3))

    def test_matrix_example_values(self):
        """Both branches of the matrix family."""
        matrix = make_builtin("matrix_example")
        self.assertEqual(matrix.index_set, IndexSet.pairs())
        self.assertAlmostEqual(eval_weight(matrix, 1, (1, 1)).to_float(), 4.0)
        self.assertAlmostEqual(eval_weight(matrix, 2, (3, 1)).log, 2 * math.log(4))

    def test_agrees_with_high_precision(self):
        """Log weights match mpmath to 1e-12 relative."""
        cases = [
            ("s", lambda k, i: k * mpmath.log(i)),
            ("entire", lambda k, i: i * mpmath.log(k)),
            ("hadamard_disk(2)", lambda k, i: i * mpmath.log(mpmath.mpf(2) * k / (k + 1))),
        ]
        for family_id, reference in cases:
            family = make_builtin(family_id)
            for k in (2, 3, 7):
                logs = family.log_weights(k, 10000)
                for i in (2, 17, 999, 10000):
                    expected = float(reference(k, i))
                    self.assertLessEqual(abs(logs[i - 1] - expected), 1e-12 * abs(expected),
                                         f"{family_id} k={k} i={i}")

    def test_power_series_flags(self):
        """Monotone direction follows the radius."""
        self.assertEqual(make_builtin("hadamard_disk(1)").flags.monotone_in_index,
                         Monotonicity.NONINCREASING)
        self.assertEqual(make_builtin("hadamard_disk(2)").flags.monotone_in_index,
                         Monotonicity.NONDECREASING)
        self.assertEqual(make_builtin("power_series(3/2, i)").flags.monotone_in_index,
                         Monotonicity.NONE)

    def test_power_series_facts(self):
        """Analytic facts of the Hadamard disk algebras."""
        self.assertTrue(make_builtin("hadamard_disk(1)").fact("unital").value)
        self.assertFalse(make_builtin("hadamard_disk(2)").fact("biprojective").value)
        self.assertFalse(make_builtin("hadamard_disk(1/2)").fact("algebra").value)
        self.assertTrue(make_builtin("power_series", {"R": "inf", "alpha": "i"}).fact("nuclear").value)

    def test_power_series_fact_table(self):
        """
        Facts over R in {1/2, 1, 2, inf} and four growth rates of alpha.

        With c = lim (log n)/alpha_n (0, 1, 1/10 and inf for the four alphas):
        - algebra iff R >= 1
        - unital iff R <= 1 and log R <= -c, since r^(alpha_n) ~ n^(log(r)/c);
          at R = 1/2 that holds for c = 0 and c = 1/10 but not for c = 1
        - nuclear iff c < inf (R = inf) or c = 0 (R finite)
        - biprojective iff R = 1 or R = inf
        - log criterion (weights >= 1 only, R >= 2) iff c < inf
        """
        alphas = ("i", "log(i+1)", "10*log(i+1)", "log(log(i+2))")
        expected = {
            # R: {fact: values per alpha}
            "1/2": {"algebra": (False,) * 4, "unital": (True, False, True, False),
                    "nuclear": (True, False, False, False), "biprojective": (False,) * 4,
                    "log_criterion": (None,) * 4},
            "1": {"algebra": (True,) * 4, "unital": (True, False, False, False),
                  "nuclear": (True, False, False, False), "biprojective": (True,) * 4,
                  "log_criterion": (None,) * 4},
            "2": {"algebra": (True,) * 4, "unital": (False,) * 4,
                  "nuclear": (True, False, False, False), "biprojective": (False,) * 4,
                  "log_criterion": (True, True, True, False)},
            "inf": {"algebra": (True,) * 4, "unital": (False,) * 4,
                    "nuclear": (True, True, True, False), "biprojective": (True,) * 4,
                    "log_criterion": (True, True, True, False)},
        }
        for radius, facts in expected.items():
            for column, alpha in enumerate(alphas):
                family = make_builtin("power_series", {"R": radius, "alpha": alpha})
                for name, values in facts.items():
                    known = family.fact(name)
                    got = None if known is None else known.value
                    self.assertEqual(got, values[column], f"R={radius} alpha={alpha} {name}")

    def test_unital_below_one_is_not_exact_failure(self):
        """A fast alpha inside the disk of radius 1/2 gives a unital algebra."""
        family = make_builtin("power_series(1/2, 10*log(i+1))")
        self.assertTrue(family.fact("unital").value)
        self.assertIn("log R <= -lim", family.fact("unital").rule)

    def test_invalid_parameters(self):
        """Bad radius, alpha or id are rejected."""
        with self.assertRaises(ConfigError):
            make_builtin("hadamard_disk(0)")
        with self.assertRaises(ConfigError):
            make_builtin("power_series(2, 1)")
        with self.assertRaises(ConfigError):
            make_builtin("power_series(inf, 1/i)")
        with self.assertRaises(UnknownFamilyError):
            make_builtin("bergman")


class TestLevelSupremum(unittest.TestCase):
    """Test the pointwise limit over levels."""

    def test_finite_supremum(self):
        self.assertEqual(oracle.level_supremum(2 - 1 / oracle.K), 2)

    def test_constant_in_level(self):
        self.assertEqual(oracle.level_supremum(oracle.I ** 2), oracle.I ** 2)

    def test_infinite_limits_are_rejected(self):
        """(i/2)^(k/100) blows up for i > 2, whatever form the limit takes."""
        self.assertIsNone(oracle.level_supremum((oracle.I / 2) ** (oracle.K / 100)))
        self.assertIsNone(oracle.level_supremum(oracle.K * oracle.I))


class TestDerivedFamilies(unittest.TestCase):
    """Test products, squares, bar-P and running maxima."""

    def test_product_of_l1(self):
        """l1 * l1 is the constant 1."""
        l1 = make_builtin("l1")
        prod = product_family(l1, l1)
        np.testing.assert_array_equal(prod.log_weights(1, 100), 0.0)

    def test_product_is_sum_of_logs(self):
        """Product levels add log-weights exactly."""
        s, entire = make_builtin("s"), make_builtin("entire")
        prod = product_family(s, entire)
        for rank in range(1, 7):
            a, b = prod.levels.pair(rank)
            np.testing.assert_array_equal(
                prod.log_weights(rank, 500),
                s.log_weights(a, 500) + entire.log_weights(b, 500))

    def test_square_of_s(self):
        """square(s) at level k is i^(2k)."""
        sq = square(make_builtin("s"))
        np.testing.assert_allclose(sq.log_weights(3, 50), 6 * np.log(np.arange(1, 51)))

    def test_index_set_mismatch(self):
        """Families on different index sets do not multiply."""
        with self.assertRaises(IndexSetMismatchError):
            product_family(make_builtin("s"), make_builtin("matrix_example"))

    def test_bar_of_s_is_one(self):
        """All i^k >= 1, so bar(s) is the constant 1."""
        bar = bar_family(make_builtin("s"))
        np.testing.assert_array_equal(bar.log_weights(4, 1000), 0.0)
        self.assertFalse(bar.fact("nuclear").value)

    def test_bar_idempotent(self):
        """bar(bar(P)) = bar(P)."""
        bar = bar_family(make_builtin("hadamard_disk(2)"))
        self.assertIs(bar_family(bar), bar)

    def test_bar_of_unit_disk(self):
        """bar(hadamard_disk(1)) keeps (m/(m+1))^i."""
        disk = make_builtin("hadamard_disk(1)")
        np.testing.assert_array_equal(bar_family(disk).log_weights(3, 100), disk.log_weights(3, 100))

    def test_running_max(self):
        """Running maxima order the levels."""
        family = dsl_family("swap", IndexSet.naturals(), ["i", "1/i", "1"])
        ordered = running_max_family(family)
        self.assertTrue(ordered.flags.running_max)
        np.testing.assert_array_equal(ordered.log_weights(2, 10), np.abs(np.log(np.arange(1, 11))))
        s = make_builtin("s")
        self.assertIs(running_max_family(s), s)

    def test_serialization(self):
        """Families rebuild from their JSON documents."""
        originals = [
            make_builtin("hadamard_disk(1/2)"),
            dsl_family("custom", IndexSet.naturals(), "(i+1)^k"),
            square(make_builtin("entire")),
        ]
        for family in originals:
            rebuilt = family_from_dict(family_to_dict(family))
            np.testing.assert_array_equal(rebuilt.log_weights(2, 64), family.log_weights(2, 64))


class TestAxioms(unittest.TestCase):
    """Test (P1), (P2) and flag checks."""

    def test_s_holds(self):
        """s satisfies both axioms."""
        self.assertTrue(axioms_check(make_builtin("s"), 1000).is_holds)

    def test_zero_at_even_indices(self):
        """{(1,0,1,0,...)} alone fails (P1) at index 2."""
        family = dsl_family("alternating", IndexSet.naturals(), ["(1 + (-1)^(i+1))/2"])
        verdict = axioms_check(family, 100)
        self.assertTrue(verdict.is_fails)
        self.assertEqual(verdict.details["index"], "2")

    def test_incomparable_levels(self):
        """Two incomparable levels leave (P2) undecided."""
        family = dsl_family("incomparable", IndexSet.naturals(), ["i", "4/2^i"])
        verdict = axioms_check(family, 100)
        self.assertTrue(verdict.is_unknown)
        self.assertEqual(verdict.details["axiom"], "P2")

    def test_declared_flags_agree(self):
        """Builtin flags agree with evaluation."""
        for family_id in ("l1", "s", "entire", "hadamard_disk(1)", "hadamard_disk(2)",
                          "matrix_example", "finite_dim(64)"):
            self.assertEqual(check_declared_flags(make_builtin(family_id), 2000), [], family_id)

    def test_declared_flags_disagree(self):
        """A false ge-one declaration is reported."""
        flags = FamilyFlags(pointwise_ordered=True, all_weights_ge_one=True)
        family = dsl_family("small", IndexSet.naturals(), "k/i", flags)
        problems = check_declared_flags(family, 100)
        self.assertTrue(any(p.startswith("all_weights_ge_one") for p in problems))


if __name__ == "__main__":
    unittest.main()
