"""
Tests for the Hilbert transform evaluators.
"""

import math
import random
import unittest
from fractions import Fraction

import numpy as np
from hypothesis import given, settings

from weightlab.constant import ValueKind
from weightlab.errors import AtomAtPoint
from weightlab.measure import PiecewiseMeasure, RationalInterval
from weightlab.transform import HilbertEvaluator, hilbert_exact, hilbert_quadrature_oracle, residual_sample_points
from .test_data import FIRST_STAGE, STEP, UNIT, measures, off_breakpoints, random_measure, rationals, uniform_unit


class TestHilbertExact(unittest.TestCase):

    def test_001_00_uniform_values(self):
        w = uniform_unit()
        self.assertEqual(float(hilbert_exact(w, Fraction(1, 2)).value), 0.0)
        self.assertAlmostEqual(float(hilbert_exact(w, Fraction(2)).value), -math.log(2), places=14)
        self.assertAlmostEqual(float(hilbert_exact(w, Fraction(-1)).value), math.log(2), places=14)
        self.assertAlmostEqual(float(hilbert_exact(w, Fraction(1, 4)).value), math.log(3), places=14)

    def test_001_01_jumps_are_infinite(self):
        w = uniform_unit()
        left = hilbert_exact(w, Fraction(0))
        right = hilbert_exact(w, Fraction(1))
        self.assertIs(left.kind, ValueKind.PLUS_INFINITY)
        self.assertIs(right.kind, ValueKind.MINUS_INFINITY)

    def test_001_02_breakpoint_kinds(self):
        measure = PiecewiseMeasure([
            (RationalInterval(Fraction(0), Fraction(1, 2)), Fraction(1)),
            (RationalInterval(Fraction(1, 2), Fraction(1)), Fraction(2)),
            (RationalInterval(Fraction(1), Fraction(2)), Fraction(1)),
        ])
        value = hilbert_exact(measure, Fraction(1, 2))
        self.assertIs(value.kind, ValueKind.PLUS_INFINITY)
        flat = PiecewiseMeasure([(RationalInterval(Fraction(0), Fraction(1, 2)), Fraction(1)),
                                 (RationalInterval(Fraction(1, 2), Fraction(2)), Fraction(1))])
        self.assertIs(hilbert_exact(flat, Fraction(1, 2)).kind, ValueKind.FINITE)

    def test_001_03_atoms(self):
        measure = PiecewiseMeasure((), [(Fraction(1), Fraction(1, 2))])
        self.assertAlmostEqual(float(hilbert_exact(measure, Fraction(0)).value), 0.5, places=14)
        with self.assertRaises(AtomAtPoint):
            hilbert_exact(measure, Fraction(1))

    def test_001_04_symmetry(self):
        # first stage of w_1 is symmetric about 1/3
        a = hilbert_exact(FIRST_STAGE, Fraction(1, 3) - Fraction(1, 10)).value
        b = hilbert_exact(FIRST_STAGE, Fraction(1, 3) + Fraction(1, 10)).value
        self.assertAlmostEqual(float(a), -float(b), places=14)

    @settings(max_examples=40, deadline=None)
    @given(measures())
    def test_001_05_reflection_flips_sign(self, measure):
        x = Fraction(7, 3)
        mirrored = measure.reflect(Fraction(1, 2))
        self.assertAlmostEqual(float(hilbert_exact(measure, x).value),
                               -float(hilbert_exact(mirrored, 1 - x).value), places=12)

    @settings(max_examples=40, deadline=None)
    @given(measures(), rationals)
    def test_001_06_translation_covariant(self, measure, x):
        t = Fraction(5, 3)
        here = hilbert_exact(measure, x)
        moved = hilbert_exact(measure.translate(t), x + t)
        self.assertIs(moved.kind, here.kind)
        if here.kind is ValueKind.FINITE:
            self.assertAlmostEqual(float(moved.value), float(here.value), places=10)


class TestOracle(unittest.TestCase):

    def test_002_00_random_measures_agree(self):
        rng = random.Random(7)
        for _ in range(10):
            measure = random_measure(rng)
            for x in off_breakpoints(measure, rng, 5):
                exact = hilbert_exact(measure, x)
                oracle = hilbert_quadrature_oracle(measure, x)
                self.assertLessEqual(abs(float(exact.value) - oracle.value),
                                     1e-9 + exact.error_bound + oracle.error_bound)

    def test_002_01_rejects_breakpoints(self):
        with self.assertRaises(ValueError):
            hilbert_quadrature_oracle(uniform_unit(), Fraction(0))


class TestHilbertEvaluator(unittest.TestCase):

    def test_003_00_matches_exact(self):
        rng = random.Random(11)
        measure = random_measure(rng, 6)
        points = off_breakpoints(measure, rng, 40)
        values, errors = HilbertEvaluator(measure).at_points(points)
        for x, value, error in zip(points, values, errors):
            exact = float(hilbert_exact(measure, x).value)
            self.assertLessEqual(abs(value - exact), error + 1e-9)

    def test_003_01_offsets_from_anchor(self):
        evaluator = HilbertEvaluator(STEP)
        anchors = [Fraction(1, 2), Fraction(1, 2)]
        offsets = np.array([1e-3, -1e-3])
        values, _ = evaluator.evaluate(anchors, offsets)
        self.assertAlmostEqual(values[0], float(hilbert_exact(STEP, Fraction(1, 2) + Fraction(1, 1000)).value),
                               places=9)

    def test_003_02_sample_points(self):
        points = residual_sample_points(UNIT, 4)
        self.assertEqual(points, [Fraction(1, 8), Fraction(3, 8), Fraction(5, 8), Fraction(7, 8)])


if __name__ == '__main__':
    unittest.main()
