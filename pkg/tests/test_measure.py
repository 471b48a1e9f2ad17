"""
Tests for RationalInterval and PiecewiseMeasure.
"""

import unittest
from fractions import Fraction

from hypothesis import given, settings

from weightlab.errors import AtomAtPoint, AtomicPart, NonRationalPower
from weightlab.measure import PiecewiseMeasure, RationalInterval, rational_power, uniform
from .test_data import FIRST_STAGE, STEP, UNIT, measures, rationals


class TestRationalInterval(unittest.TestCase):

    def test_001_00_half_open(self):
        self.assertTrue(UNIT.contains(Fraction(0)))
        self.assertFalse(UNIT.contains(Fraction(1)))
        self.assertEqual(UNIT.length, 1)
        self.assertEqual(UNIT.center, Fraction(1, 2))

    def test_001_01_children(self):
        children = UNIT.children()
        self.assertEqual(len(children), 3)
        self.assertEqual(children[1], UNIT.middle_child)
        self.assertEqual(UNIT.middle_child, RationalInterval(Fraction(1, 3), Fraction(2, 3)))

    def test_001_02_intersection(self):
        left = RationalInterval(Fraction(0), Fraction(1, 2))
        right = RationalInterval(Fraction(1, 2), Fraction(1))
        self.assertIsNone(left.intersection(right))
        self.assertEqual(left.overlap(right), 0)
        self.assertEqual(UNIT.intersection(left), left)
        self.assertTrue(UNIT.contains_interval(left))

    def test_001_03_dict(self):
        interval = RationalInterval(Fraction(-1, 3), Fraction(5, 7))
        self.assertEqual(RationalInterval.from_dict(interval.to_dict()), interval)


class TestPiecewiseMeasure(unittest.TestCase):

    def test_002_00_mass(self):
        self.assertEqual(FIRST_STAGE.total_mass(), 1)
        self.assertEqual(STEP.total_mass(), Fraction(1, 2) + Fraction(1, 8) + Fraction(3, 4))
        self.assertEqual(STEP.measure_of(RationalInterval(Fraction(1, 8), Fraction(7, 8))),
                         Fraction(1, 4) + Fraction(1, 8) + Fraction(3, 8))

    def test_002_01_density(self):
        self.assertEqual(STEP.density_at(Fraction(1, 4)), Fraction(1, 2))
        self.assertEqual(STEP.density_at(Fraction(5, 8)), 0)
        self.assertEqual(STEP.piece_index(Fraction(5, 8)), -1)
        self.assertEqual(STEP.piece_index(Fraction(7, 8)), 2)

    def test_002_02_merges_equal_neighbours(self):
        measure = PiecewiseMeasure([
            (RationalInterval(Fraction(0), Fraction(1, 3)), Fraction(3, 2)),
            (RationalInterval(Fraction(1, 3), Fraction(2, 3)), Fraction(3, 2)),
        ])
        self.assertEqual(measure, FIRST_STAGE)
        self.assertEqual(len(measure), 1)

    def test_002_03_rejects_overlap(self):
        with self.assertRaises(ValueError):
            PiecewiseMeasure([(UNIT, 1), (RationalInterval(Fraction(1, 2), Fraction(2)), 1)])
        with self.assertRaises(ValueError):
            PiecewiseMeasure([(UNIT, -1)])

    def test_002_04_support(self):
        support = STEP.support()
        self.assertEqual(support, [RationalInterval(Fraction(0), Fraction(1, 2)),
                                   RationalInterval(Fraction(3, 4), Fraction(1))])

    def test_002_05_power_weight(self):
        weight = STEP.power_weight(-1)
        self.assertTrue(weight.exact)
        self.assertEqual(weight.density_at(Fraction(0)), Fraction(1, 2))
        self.assertEqual(rational_power(Fraction(9, 4), Fraction(1, 2)), Fraction(3, 2))
        self.assertIsNone(rational_power(Fraction(2), Fraction(1, 2)))

    def test_002_06_power_weight_inexact(self):
        with self.assertRaises(NonRationalPower):
            STEP.power_weight(Fraction(-1, 2))
        weight = STEP.power_weight(Fraction(-1, 2), allow_inexact=True)
        self.assertFalse(weight.exact)
        self.assertAlmostEqual(float(weight.density_at(Fraction(0))), 2 ** -0.5, places=14)

    def test_002_07_atoms(self):
        measure = PiecewiseMeasure([(UNIT, 1)], [(Fraction(2), Fraction(1, 4))])
        self.assertEqual(measure.total_mass(), Fraction(5, 4))
        self.assertEqual(measure.measure_of(RationalInterval(Fraction(2), Fraction(3))), Fraction(1, 4))
        with self.assertRaises(AtomAtPoint):
            measure.density_at(Fraction(2))
        with self.assertRaises(AtomicPart):
            measure.power_weight(-1)

    def test_002_08_translate_and_reflect(self):
        moved = STEP.translate(3)
        self.assertEqual(moved.total_mass(), STEP.total_mass())
        self.assertEqual(moved.density_at(Fraction(3)), 2)
        mirrored = STEP.reflect(Fraction(1, 2))
        self.assertEqual(mirrored.density_at(Fraction(1, 8)), 3)

    def test_002_09_add(self):
        total = FIRST_STAGE + uniform(UNIT, 1)
        self.assertEqual(total.total_mass(), 2)
        self.assertEqual(total.density_at(Fraction(1, 2)), Fraction(5, 2))
        self.assertEqual(total.density_at(Fraction(5, 6)), 1)

    def test_002_10_restrict(self):
        half = RationalInterval(Fraction(1, 2), Fraction(1))
        self.assertEqual(STEP.restrict(half).total_mass() + STEP.restrict_complement(half).total_mass(),
                         STEP.total_mass())

    def test_002_11_dict(self):
        self.assertEqual(PiecewiseMeasure.from_dict(STEP.to_dict()), STEP)
        data = STEP.to_dict()
        self.assertEqual(data["pieces"][0], {"a": "0/1", "b": "1/4", "d": "2/1"})

    @settings(max_examples=60, deadline=None)
    @given(measures(), rationals, rationals)
    def test_002_12_measure_is_additive(self, measure, a, b):
        lo, hi = min(a, b), max(a, b)
        mid = (lo + hi) / 2
        whole = measure.measure_of(RationalInterval(lo, hi)) if lo < hi else 0
        if lo < hi:
            parts = measure.measure_of(RationalInterval(lo, mid)) + measure.measure_of(RationalInterval(mid, hi))
            self.assertEqual(whole, parts)
        self.assertEqual(measure.cumulative(Fraction(10)), measure.total_mass())


if __name__ == '__main__':
    unittest.main()
