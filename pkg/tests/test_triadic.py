"""
Tests for the triadic construction of w_k.
"""

import unittest
from fractions import Fraction

from weightlab.constant import Closure, SignRule
from weightlab.errors import SizeLimit
from weightlab.maximal import maximal_exact
from weightlab.measure import PiecewiseMeasure, RationalInterval
from weightlab.transform import hilbert_ratio_on_residuals
from weightlab.triadic import (ConstructionState, TriadicTree, build_tree, build_w_k, place_residual, residual_count,
                               select_sign)
from .test_data import FIRST_STAGE, UNIT


class TestTriadicConstruction(unittest.TestCase):

    def test_001_00_first_stage(self):
        tree, w = build_w_k(1, 0)
        self.assertEqual(w, FIRST_STAGE)
        generation = tree.generations[0]
        self.assertEqual(generation.J, [UNIT.middle_child])
        self.assertEqual(generation.residuals, [RationalInterval(Fraction(0), Fraction(1, 3))])
        self.assertEqual(generation.signs, [1])

    def test_001_01_second_stage_geometry(self):
        tree, w = build_w_k(1, 1, SignRule.ALL_PLUS)
        second = tree.generations[1]
        self.assertEqual(second.K, [RationalInterval(Fraction(1, 3), Fraction(2, 3))])
        self.assertEqual(second.J, [RationalInterval(Fraction(4, 9), Fraction(5, 9))])
        self.assertEqual(second.residuals, [RationalInterval(Fraction(1, 3), Fraction(4, 9))])
        self.assertEqual(w.total_mass(), 1)
        self.assertEqual(w.density_at(Fraction(1, 6)), Fraction(3, 2))
        self.assertEqual(w.density_at(Fraction(1, 2)), Fraction(9, 4))

    def test_001_02_mass_is_one(self):
        for k in (1, 2, 3):
            for depth in (0, 1, 2):
                _, w = build_w_k(k, depth)
                self.assertEqual(w.total_mass(), 1)

    def test_001_03_counts(self):
        self.assertEqual(residual_count(2, 0), 1)
        self.assertEqual(residual_count(2, 2), 1 + 3 + 9)
        tree = build_tree(2, 2)
        self.assertEqual(tree.residual_count, 13)
        self.assertEqual([len(g.J) for g in tree.generations], [1, 3, 9])

    def test_001_04_size_limit(self):
        with self.assertRaises(SizeLimit):
            build_w_k(6, 3, cap=1000)
        with self.assertRaises(ValueError):
            build_w_k(0, 1)

    def test_001_05_residuals_sit_next_to_J(self):
        tree, _ = build_w_k(2, 2)
        for generation in tree.generations:
            for K, J, residual, sign in zip(generation.K, generation.J, generation.residuals, generation.signs):
                self.assertEqual(residual, place_residual(J, residual.length, sign))
                self.assertTrue(K.contains_interval(residual))
                self.assertEqual(residual.length, K.length / 9)

    def test_001_06_all_minus(self):
        tree, _ = build_w_k(2, 1, SignRule.ALL_MINUS)
        for generation in tree.generations:
            for J, residual in zip(generation.J, generation.residuals):
                self.assertEqual(residual.a, J.b)

    def test_001_07_residual_closure(self):
        _, stage = build_w_k(2, 1, closure=Closure.STAGE)
        tree, closed = build_w_k(2, 1, closure=Closure.RESIDUAL)
        self.assertEqual(closed.total_mass(), 1)
        self.assertNotEqual(stage, closed)
        last = tree.generations[-1]
        for J in last.J:
            self.assertEqual(closed.measure_of(J), 0)

    def test_001_08_middle_thirds_carry_a_third(self):
        tree, w = build_w_k(2, 2)
        residual_mass = sum(w.measure_of(residual) for _, _, residual, _ in tree.residual_supports())
        middle_mass = sum(w.measure_of(middle) for _, _, _, middle in tree.residual_supports())
        self.assertEqual(3 * middle_mass, residual_mass)

    def test_001_09_dict(self):
        tree, _ = build_w_k(1, 1)
        data = tree.to_dict()
        self.assertEqual(data["k"], 1)
        self.assertEqual(len(data["generations"]), 2)
        self.assertEqual(data["generations"][0]["residuals"], [{"a": "0/1", "b": "1/3"}])

    def test_001_10_stage_keeps_mass_of_each_K(self):
        for i in (1, 2):
            tree, stage = build_w_k(2, i)
            _, previous = build_w_k(2, i - 1)
            for K in tree.generations[i].K:
                self.assertEqual(stage.measure_of(K), previous.measure_of(K))
        _, first = build_w_k(2, 0)
        self.assertEqual(first.measure_of(UNIT), 1)


class TestSignSelection(unittest.TestCase):

    J = RationalInterval(Fraction(1, 3), Fraction(2, 3))

    def state(self, *pieces):
        partial = PiecewiseMeasure([(RationalInterval(a, b), Fraction(1)) for a, b in pieces])
        return ConstructionState(TriadicTree(1, 0, SignRule.GREEDY), partial, 1)

    def test_002_00_tie_goes_to_plus(self):
        # mass on both sides of [0, 1), symmetric about the center of J
        state = self.state((Fraction(-1), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(1), Fraction(2)))
        self.assertEqual(select_sign(state, self.J), 1)
        self.assertEqual(select_sign(self.state((Fraction(0), Fraction(1))), self.J), 1)

    def test_002_01_one_sided_mass(self):
        self.assertEqual(select_sign(self.state((Fraction(1), Fraction(2))), self.J), 1)
        self.assertEqual(select_sign(self.state((Fraction(-1), Fraction(0))), self.J), -1)

    def test_002_02_build_follows_select_sign(self):
        tree, _ = build_w_k(2, 1)
        _, stage = build_w_k(2, 0)
        state = ConstructionState(tree, stage, 1)
        expected = [select_sign(state, J) for J in tree.generations[1].J]
        self.assertEqual(tree.generations[1].signs, expected)
        self.assertEqual(expected, [1, -1, -1])


class TestTriadicEstimates(unittest.TestCase):

    def test_003_00_maximal_bound(self):
        tree, w = build_w_k(2, 2)
        for _, _, residual, _ in tree.residual_supports():
            x = residual.center
            self.assertLessEqual(maximal_exact(w, x), 13 * w.density_at(x))

    def test_003_01_hilbert_ratio_positive(self):
        tree, w = build_w_k(4, 1)
        ratios = hilbert_ratio_on_residuals(tree, w, 8)
        self.assertGreater(ratios.global_min, 0)
        self.assertEqual(len(ratios.per_generation_min), 2)
        self.assertEqual(ratios.total_residuals, 28)


if __name__ == '__main__':
    unittest.main()
